// Command-line front end: generate instances, run attention pipelines,
// verify the certification inequalities, and benchmark scaling grids.
// Output is JSON-lines on stdout (CSV for bench); exit codes are
// 0 = success, 1 = usage error, 2 = verification failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparseatt/bench.hpp"
#include "sparseatt/brute_force.hpp"
#include "sparseatt/digest.hpp"
#include "sparseatt/goodness.hpp"
#include "sparseatt/instance.hpp"
#include "sparseatt/sparse_b.hpp"
#include "sparseatt/stats.hpp"
#include "sparseatt/support_set.hpp"

namespace {

using nlohmann::json;
using namespace sparseatt;

json goodness_to_json(const GoodnessReport& report) {
  return json{
      {"is_good", report.is_good},
      {"max_row_support", report.max_row_support},
      {"min_on_support_score", report.min_on_support_score},
      {"max_off_support_score", report.max_off_support_score},
      {"min_off_support_score", report.min_off_support_score},
  };
}

json ledger_to_json(const QueryCostLedger& ledger) {
  return json{
      {"oracle_calls", ledger.oracle_calls},
      {"grover_iterations", ledger.grover_iterations},
      {"dot_product_flops", ledger.dot_product_flops},
      {"classical_scan_calls", ledger.classical_scan_calls},
  };
}

int cmd_generate(const InstanceSpec& raw_spec, bool tau_given, const std::string& out_path) {
  InstanceSpec spec = raw_spec;
  if (!tau_given) spec.tau = 2.0 * std::log(static_cast<double>(std::max<std::size_t>(spec.n, 1)));
  Instance inst;
  try {
    inst = generate(spec);
  } catch (const std::exception& e) {
    std::cerr << "generate: " << e.what() << "\n";
    return 1;
  }
  try {
    write_instance(out_path, inst);
  } catch (const std::exception& e) {
    std::cerr << "generate: " << e.what() << "\n";
    return 1;
  }
  GoodnessReport report =
      check_goodness(inst.q, inst.k_mat, inst.spec.tau, inst.spec.k, inst.spec.eta);
  json record = goodness_to_json(report);
  record["schema"] = "goodness-v1";
  record["out"] = out_path;
  record["n"] = inst.spec.n;
  record["d"] = inst.spec.d;
  record["k"] = inst.spec.k;
  record["tau"] = inst.spec.tau;
  record["eta"] = inst.spec.eta;
  record["seed"] = inst.spec.seed;
  record["mode"] = mode_name(inst.spec.mode);
  std::cout << record.dump() << "\n";
  return 0;
}

int cmd_run(const std::string& instance_path, const std::string& method_str,
            std::uint64_t seed) {
  auto method = method_from_name(method_str);
  if (!method) {
    std::cerr << "run: unknown method '" << method_str << "'\n";
    return 1;
  }
  Instance inst;
  try {
    inst = read_instance(instance_path);
  } catch (const std::exception& e) {
    std::cerr << "run: " << e.what() << "\n";
    return 1;
  }

  PipelineResult result = run_pipeline(inst, *method, seed);

  json record{
      {"schema", "run-v1"},
      {"instance", instance_path},
      {"method", method_name(*method)},
      {"seed", seed},
      {"n", inst.spec.n},
      {"d", inst.spec.d},
      {"k", inst.spec.k},
      {"tau", inst.spec.tau},
      {"eta", inst.spec.eta},
      {"mode", mode_name(inst.spec.mode)},
      {"output_checksum", output_checksum(result.output)},
      {"wall_ms", result.wall_ms},
      {"ledger", ledger_to_json(result.total_ledger())},
  };

  if (result.support.has_value()) {
    std::size_t bad_rows = mismatched_rows(*result.support, inst.truth);
    record["support_match"] = (bad_rows == 0);
    record["mismatched_rows"] = bad_rows;
  }

  if (*method != Method::kExact) {
    if (inst.spec.n <= kDenseGuardMaxRows) {
      try {
        SparseB b = build_B(*result.support);
        ErrorReport err = error_report(inst.q, inst.k_mat, inst.v, b, inst.spec.tau,
                                       inst.spec.k, inst.spec.eta);
        record["error"] = json{
            {"eta", err.eta},
            {"lhs_no_v", err.lhs_no_v},
            {"lhs_with_v", err.lhs_with_v},
            {"bound_no_v", err.bound_no_v},
            {"bound_with_v", err.bound_with_v},
            {"diag_rel_err", err.diag_rel_err},
            {"entry_err", err.entry_err},
        };
      } catch (const std::exception& e) {
        record["note"] = std::string("error fields unavailable: ") + e.what();
      }
    } else {
      record["note"] = "dense comparison skipped: instance exceeds the dense guard";
    }
  }

  std::cout << record.dump() << "\n";
  return 0;
}

struct VerifyLine {
  std::string name;
  double measured;
  double bound;
  bool pass;
};

int cmd_verify(const std::string& instance_path) {
  Instance inst;
  try {
    inst = read_instance(instance_path);
  } catch (const std::exception& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return 1;
  }
  if (inst.spec.n > kDenseGuardMaxRows) {
    std::cerr << "verify: instance exceeds the dense materialization guard\n";
    return 1;
  }

  QueryCostLedger ledger;
  SupportSets found = brute_force_support(inst.q, inst.k_mat, inst.spec.tau, ledger);
  SparseB b = build_B(found);

  CertificationReport report;
  try {
    report = certify_instance(inst.q, inst.k_mat, inst.v, b, inst.spec.tau, inst.spec.k,
                              inst.spec.eta);
  } catch (const std::domain_error& e) {
    std::cerr << "verify: refused: " << e.what() << "\n";
    return 2;
  }

  const auto& parts = report.perturbation;
  const auto& err = report.error;
  const double slack = fp_slack(inst.spec.n);
  double v_inf = 0.0;
  for (double x : inst.v.data()) v_inf = std::max(v_inf, std::fabs(x));

  std::vector<VerifyLine> lines;
  lines.push_back({"truth_support_match", static_cast<double>(mismatched_rows(found, inst.truth)),
                   0.0, mismatched_rows(found, inst.truth) == 0});
  lines.push_back({"support_size_max", static_cast<double>(found.max_row_size()),
                   static_cast<double>(inst.spec.k),
                   found.max_row_size() <= inst.spec.k});
  lines.push_back({"off_support_entry_gap", parts.max_off_support_entry_gap,
                   parts.off_support_entry_bound + slack, parts.off_support_within_bound});
  lines.push_back({"on_support_entry_match",
                   parts.on_support_entries_identical ? 0.0 : 1.0, 0.0,
                   parts.on_support_entries_identical});
  lines.push_back({"row_sum_gap", parts.max_row_sum_gap, parts.row_sum_gap_bound,
                   parts.row_sum_gap_within_bound});
  lines.push_back({"row_sum_floor_margin", parts.min_row_sum_minus_floor, 0.0,
                   parts.row_sum_floor_within_bound});
  lines.push_back({"row_sum_floor_vs_2n", parts.min_floor_minus_2n, 0.0,
                   parts.row_sum_floor_within_bound});
  lines.push_back({"row_sum_rel_gap", parts.max_row_sum_rel_gap, inst.spec.eta + slack,
                   parts.row_sum_rel_within_bound});
  lines.push_back({"normalized_gap_no_v", err.lhs_no_v, err.bound_no_v + slack,
                   err.lhs_no_v <= err.bound_no_v + slack});
  double with_v_bound = err.bound_with_v + slack * std::max(1.0, v_inf);
  lines.push_back({"output_gap_with_v", err.lhs_with_v, with_v_bound,
                   err.lhs_with_v <= with_v_bound});
  if (inst.spec.eta > 0.0 && v_inf > 0.0) {
    // Decoupled form of the same inequality: the gap divided by eta * |V|_inf
    // stays below the constant 3 regardless of how |V|_inf relates to eta.
    double ratio = err.lhs_with_v / (inst.spec.eta * v_inf);
    lines.push_back({"output_gap_per_eta_vinf", ratio, 3.0 + slack, ratio <= 3.0 + slack});
  }
  if (inst.spec.eta == 0.0) {
    lines.push_back({"eta_zero_exactness",
                     std::max({err.lhs_no_v, err.lhs_with_v, err.entry_err}), 0.0,
                     err.lhs_no_v == 0.0 && err.lhs_with_v == 0.0 && err.entry_err == 0.0});
  }

  bool all_pass = true;
  for (const auto& line : lines) {
    // floor lines are lower bounds: measured must stay >= bound
    std::ostringstream margin;
    bool lower_bound = line.name.rfind("row_sum_floor", 0) == 0;
    double m = lower_bound ? line.measured - line.bound : line.bound - line.measured;
    margin.precision(12);
    margin << m;
    std::cout << line.name << " measured=" << json(line.measured).dump()
              << " bound=" << json(line.bound).dump() << " margin=" << margin.str() << " "
              << (line.pass ? "PASS" : "FAIL") << "\n";
    all_pass = all_pass && line.pass;
  }
  std::cout << (all_pass ? "VERIFY PASS" : "VERIFY FAIL") << " (" << lines.size()
            << " checks)\n";
  return all_pass ? 0 : 2;
}

struct GridSpec {
  std::vector<std::size_t> n, k, d;
};

bool parse_grid(const std::string& text, GridSpec& grid, std::string& error) {
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    auto eq = part.find('=');
    if (eq == std::string::npos) {
      error = "grid term missing '=': " + part;
      return false;
    }
    std::string key = part.substr(0, eq);
    std::vector<std::size_t>* target = nullptr;
    if (key == "n") target = &grid.n;
    else if (key == "k") target = &grid.k;
    else if (key == "d") target = &grid.d;
    else {
      error = "unknown grid dimension '" + key + "'";
      return false;
    }
    std::stringstream values(part.substr(eq + 1));
    std::string v;
    while (std::getline(values, v, ',')) {
      try {
        target->push_back(std::stoull(v));
      } catch (...) {
        error = "bad grid value '" + v + "'";
        return false;
      }
    }
  }
  if (grid.n.empty()) {
    error = "grid must list at least one n";
    return false;
  }
  if (grid.k.empty()) grid.k.push_back(8);
  if (grid.d.empty()) grid.d.push_back(16);
  return true;
}

int cmd_bench(const std::string& grid_text, std::vector<std::string> method_names,
              std::uint64_t base_seed, std::uint64_t repeats, const std::string& mode_str) {
  GridSpec grid;
  std::string error;
  if (!parse_grid(grid_text, grid, error)) {
    std::cerr << "bench: " << error << "\n";
    return 1;
  }
  if (method_names.empty()) method_names = {"brute", "sparse", "exact"};
  std::vector<Method> methods;
  for (const auto& name : method_names) {
    auto m = method_from_name(name);
    if (!m) {
      std::cerr << "bench: unknown method '" << name << "'\n";
      return 1;
    }
    methods.push_back(*m);
  }
  InstanceMode mode;
  try {
    mode = mode_from_name(mode_str);
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 1;
  }
  if (repeats == 0) repeats = 1;

  struct Row {
    std::size_t n, k, d;
    Method method;
    std::uint64_t seed;
    QueryCostLedger finder, attention;
    double wall_ms;
    int support_match;  // 1/0, -1 = not applicable
  };
  std::vector<Row> rows;

  for (std::size_t n : grid.n) {
    for (std::size_t k : grid.k) {
      for (std::size_t d : grid.d) {
        for (std::uint64_t rep = 0; rep < repeats; ++rep) {
          InstanceSpec spec;
          spec.n = n;
          spec.k = std::min(k, n);
          spec.d = d;
          spec.mode = mode;
          spec.tau = 2.0 * std::log(static_cast<double>(n));
          spec.eta = 0.01;
          spec.seed = bench_cell_seed(base_seed, n, k, d, rep);
          Instance inst;
          try {
            inst = generate(spec);
          } catch (const std::exception& e) {
            std::cerr << "bench: generate failed for n=" << n << " k=" << k << " d=" << d
                      << ": " << e.what() << "\n";
            return 1;
          }
          for (Method method : methods) {
            PipelineResult result = run_pipeline(inst, method, spec.seed);
            Row row{n, spec.k, inst.spec.d, method, spec.seed,
                    result.finder_ledger, result.attention_ledger, result.wall_ms, -1};
            if (result.support.has_value()) {
              row.support_match = mismatched_rows(*result.support, inst.truth) == 0 ? 1 : 0;
            }
            rows.push_back(row);
          }
        }
      }
    }
  }

  std::cout << "# bench-csv-v1\n";
  std::cout << "n,k,d,method,seed,oracle_calls,flops,wall_ms,support_match\n";
  for (const auto& row : rows) {
    // For finder methods flops cover the whole pipeline; method=sparse and
    // method=exact isolate the attention stage.
    std::uint64_t flops = row.finder.dot_product_flops + row.attention.dot_product_flops;
    std::uint64_t calls = row.finder.oracle_calls;
    char wall[32];
    std::snprintf(wall, sizeof(wall), "%.3f", row.wall_ms);
    std::cout << row.n << "," << row.k << "," << row.d << "," << method_name(row.method) << ","
              << row.seed << "," << calls << "," << flops << "," << wall << ","
              << (row.support_match < 0 ? std::string("na")
                                        : std::to_string(row.support_match))
              << "\n";
  }

  // Summary block: per-method log-log slopes and scaling fits.
  std::map<Method, std::map<std::size_t, std::vector<double>>> calls_by_n, flops_by_n;
  std::map<Method, std::vector<double>> fit_terms;
  for (const auto& row : rows) {
    double flops = static_cast<double>(row.finder.dot_product_flops +
                                       row.attention.dot_product_flops);
    calls_by_n[row.method][row.n].push_back(static_cast<double>(row.finder.oracle_calls) /
                                            static_cast<double>(row.n));
    flops_by_n[row.method][row.n].push_back(flops);
    double denom = row.method == Method::kExact
                       ? static_cast<double>(row.n) * static_cast<double>(row.n) *
                             static_cast<double>(row.d)
                       : static_cast<double>(row.n) * static_cast<double>(row.k) *
                             static_cast<double>(row.d);
    fit_terms[row.method].push_back(flops / denom);
  }
  double c_sparse = 0.0, c_exact = 0.0;
  for (const auto& [method, by_n] : calls_by_n) {
    std::vector<double> ns, call_means, flop_means;
    for (const auto& [n, samples] : by_n) {
      ns.push_back(static_cast<double>(n));
      call_means.push_back(mean(samples));
      flop_means.push_back(mean(flops_by_n[method][n]));
    }
    std::ostringstream line;
    line << "# summary method=" << method_name(method) << " points=" << ns.size();
    if (ns.size() >= 2) {
      bool calls_positive = true;
      for (double c : call_means) calls_positive = calls_positive && c > 0.0;
      if (calls_positive) {
        line << " slope_oracle_per_row=" << loglog_slope(ns, call_means);
      }
      line << " slope_flops=" << loglog_slope(ns, flop_means);
    }
    const auto& terms = fit_terms[method];
    double c = mean(terms);
    double dev = 0.0;
    for (double t : terms) dev = std::max(dev, std::fabs(t - c) / c);
    const char* unit = method == Method::kExact ? "flops_per_n2d" : "flops_per_nkd";
    line << " " << unit << "=" << c << " max_rel_dev=" << dev;
    std::cout << line.str() << "\n";
    if (method == Method::kSparse) c_sparse = c;
    if (method == Method::kExact) c_exact = c;
  }
  if (c_sparse > 0.0 && c_exact > 0.0 && grid.k.size() == 1) {
    double n_star = c_sparse * static_cast<double>(grid.k[0]) / c_exact;
    std::cout << "# crossover sparse_vs_exact k=" << grid.k[0] << " n_star=" << n_star << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold-sparse softmax attention toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a seeded instance file");
  InstanceSpec spec;
  spec.n = 0;
  spec.d = 16;
  spec.k = 8;
  spec.eta = 0.01;
  std::string gen_mode = "gram_exact";
  std::string out_path;
  double tau_flag = 0.0;
  gen->add_option("--n", spec.n, "Problem size")->required();
  gen->add_option("--d", spec.d, "Embedding dimension (random_embed only)");
  gen->add_option("--k", spec.k, "Support bound per row");
  auto* tau_opt = gen->add_option("--tau", tau_flag, "Score threshold (default 2 ln n)");
  gen->add_option("--eta", spec.eta, "Off-support magnitude bound");
  gen->add_option("--seed", spec.seed, "Generator seed");
  gen->add_option("--mode", gen_mode, "gram_exact | random_embed");
  gen->add_option("--out", out_path, "Output instance path")->required();

  // run
  auto* run = app.add_subcommand("run", "Run one pipeline on an instance");
  std::string run_instance, run_method = "exact";
  std::uint64_t run_seed = 0;
  run->add_option("instance", run_instance, "Instance file")->required();
  run->add_option("--method", run_method,
                  "exact | brute | hsr | grover-sampled | grover-analytic | sparse");
  run->add_option("--seed", run_seed, "Seed for the sampled search");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the certification suite on an instance");
  std::string verify_instance;
  verify->add_option("instance", verify_instance, "Instance file")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Run a scaling grid and emit CSV");
  std::string grid_text;
  std::vector<std::string> bench_methods;
  std::uint64_t bench_seed = 0, repeats = 1;
  std::string bench_mode = "random_embed";
  bench->add_option("--grid", grid_text, "e.g. n=512,1024,2048;k=8;d=16")->required();
  bench->add_option("--method", bench_methods, "Methods to run (repeatable)");
  bench->add_option("--seed", bench_seed, "Base seed");
  bench->add_option("--repeats", repeats, "Seeds per grid cell");
  bench->add_option("--mode", bench_mode, "Instance mode for the grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) {
      try {
        spec.mode = mode_from_name(gen_mode);
      } catch (const std::exception& e) {
        std::cerr << "generate: " << e.what() << "\n";
        return 1;
      }
      if (*tau_opt) spec.tau = tau_flag;
      return cmd_generate(spec, !!*tau_opt, out_path);
    }
    if (run->parsed()) return cmd_run(run_instance, run_method, run_seed);
    if (verify->parsed()) return cmd_verify(verify_instance);
    if (bench->parsed())
      return cmd_bench(grid_text, bench_methods, bench_seed, repeats, bench_mode);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
