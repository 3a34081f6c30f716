#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "sparseatt/instance.hpp"
#include "sparseatt/ledger.hpp"
#include "sparseatt/reference_attention.hpp"
#include "sparseatt/support_set.hpp"

namespace sparseatt {

/// Pipelines the CLI and the benchmark grid can run. `kSparse` measures the
/// attention stage alone, taking the supports from the instance truth; the
/// finder methods run their support search first and then the same sparse
/// attention stage.
enum class Method { kExact, kBrute, kHsr, kGroverSampled, kGroverAnalytic, kSparse };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

struct PipelineResult {
  Method method = Method::kExact;
  AttentionOutput output;
  QueryCostLedger finder_ledger;     // support search cost (empty for exact/sparse)
  QueryCostLedger attention_ledger;  // attention-stage cost
  std::optional<SupportSets> support;
  double wall_ms = 0.0;

  QueryCostLedger total_ledger() const { return finder_ledger + attention_ledger; }
};

/// Runs one method end to end on an instance. `run_seed` seeds the sampled
/// search; the other methods ignore it.
PipelineResult run_pipeline(const Instance& instance, Method method, std::uint64_t run_seed);

/// Deterministic per-cell instance seed for benchmark grids.
std::uint64_t bench_cell_seed(std::uint64_t base_seed, std::size_t n, std::size_t k,
                              std::size_t d, std::uint64_t repeat);

}  // namespace sparseatt
