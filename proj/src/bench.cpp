#include "sparseatt/bench.hpp"

#include <chrono>
#include <stdexcept>

#include "sparseatt/brute_force.hpp"
#include "sparseatt/grover.hpp"
#include "sparseatt/hsr_tree.hpp"
#include "sparseatt/rng.hpp"
#include "sparseatt/sparse_b.hpp"

namespace sparseatt {

std::string method_name(Method m) {
  switch (m) {
    case Method::kExact: return "exact";
    case Method::kBrute: return "brute";
    case Method::kHsr: return "hsr";
    case Method::kGroverSampled: return "grover-sampled";
    case Method::kGroverAnalytic: return "grover-analytic";
    case Method::kSparse: return "sparse";
  }
  return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "exact") return Method::kExact;
  if (name == "brute") return Method::kBrute;
  if (name == "hsr") return Method::kHsr;
  if (name == "grover-sampled") return Method::kGroverSampled;
  if (name == "grover-analytic") return Method::kGroverAnalytic;
  if (name == "sparse") return Method::kSparse;
  return std::nullopt;
}

PipelineResult run_pipeline(const Instance& instance, Method method, std::uint64_t run_seed) {
  PipelineResult result;
  result.method = method;
  auto t0 = std::chrono::steady_clock::now();

  switch (method) {
    case Method::kExact:
      result.output =
          exact_attention(instance.q, instance.k_mat, instance.v, &result.attention_ledger);
      break;
    case Method::kSparse:
      result.support = instance.truth;
      break;
    case Method::kBrute:
      result.support = brute_force_support(instance.q, instance.k_mat, instance.spec.tau,
                                           result.finder_ledger);
      break;
    case Method::kHsr:
      result.support =
          build_support_hsr(instance.q, instance.k_mat, instance.spec.tau, result.finder_ledger);
      break;
    case Method::kGroverSampled:
    case Method::kGroverAnalytic: {
      GroverConfig cfg;
      cfg.mode = method == Method::kGroverSampled ? GroverConfig::Mode::kSampled
                                                  : GroverConfig::Mode::kAnalytic;
      cfg.seed = run_seed;
      result.support = build_support_grover(instance.q, instance.k_mat, instance.spec.tau, cfg,
                                            result.finder_ledger);
      break;
    }
  }

  if (method != Method::kExact) {
    SparseB b = build_B(*result.support);
    result.output = sparse_attention(b, instance.v, result.attention_ledger);
  }

  auto t1 = std::chrono::steady_clock::now();
  result.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return result;
}

std::uint64_t bench_cell_seed(std::uint64_t base_seed, std::size_t n, std::size_t k,
                              std::size_t d, std::uint64_t repeat) {
  std::uint64_t cell = derive_seed(base_seed, StreamTag::kBench, n);
  cell = derive_seed(cell, StreamTag::kBench, k);
  cell = derive_seed(cell, StreamTag::kBench, d);
  return derive_seed(cell, StreamTag::kBench, repeat);
}

}  // namespace sparseatt
