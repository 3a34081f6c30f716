#include "sparseatt/grover.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sparseatt/parallel.hpp"
#include "sparseatt/rng.hpp"

namespace sparseatt {

std::size_t default_fail_streak_limit(std::size_t n) {
  if (n <= 1) return 3;
  std::size_t bits = static_cast<std::size_t>(std::bit_width(n - 1));  // ceil(log2 n)
  return 3 * std::max<std::size_t>(1, bits);
}

GroverConfig GroverConfig::resolved_for(std::size_t n) const {
  GroverConfig out = *this;
  if (out.fail_streak_limit == 0) out.fail_streak_limit = default_fail_streak_limit(n);
  return out;
}

void GroverConfig::validate() const {
  if (!(lambda > 1.0 && lambda < 4.0 / 3.0)) {
    throw std::invalid_argument("GroverConfig: lambda must lie in (1, 4/3)");
  }
  if (fail_streak_limit < 1) {
    throw std::invalid_argument("GroverConfig: fail_streak_limit must be >= 1");
  }
}

double grover_success_prob(std::size_t n, std::size_t t, std::size_t j) {
  if (n == 0) throw std::invalid_argument("grover_success_prob: n must be >= 1");
  if (t > n) throw std::invalid_argument("grover_success_prob: t must be <= n");
  if (t == 0) return 0.0;
  double theta = std::asin(std::sqrt(static_cast<double>(t) / static_cast<double>(n)));
  double s = std::sin((2.0 * static_cast<double>(j) + 1.0) * theta);
  return s * s;
}

RotationModelReport validate_rotation_model(std::size_t n, std::vector<std::size_t> marked,
                                            std::size_t j) {
  if (n == 0 || n > 1024) {
    throw std::length_error("validate_rotation_model: n must lie in [1, 1024]");
  }
  if (!std::has_single_bit(n)) {
    throw std::invalid_argument("validate_rotation_model: n must be a power of two");
  }
  std::sort(marked.begin(), marked.end());
  marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
  if (!marked.empty() && marked.back() >= n) {
    throw std::invalid_argument("validate_rotation_model: marked index out of range");
  }

  std::vector<double> amps(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (std::size_t round = 0; round < j; ++round) {
    for (std::size_t m : marked) amps[m] = -amps[m];  // oracle reflection
    double sum = 0.0;
    for (double a : amps) sum += a;
    double twice_mean = 2.0 * (sum / static_cast<double>(n));
    for (double& a : amps) a = twice_mean - a;  // inversion about the mean
  }

  RotationModelReport report;
  for (std::size_t m : marked) report.statevector_mass += amps[m] * amps[m];
  report.predicted = grover_success_prob(n, marked.size(), j);
  report.difference = std::fabs(report.statevector_mass - report.predicted);
  return report;
}

std::vector<std::size_t> find_all_marked(std::size_t n,
                                         const std::function<bool(std::size_t)>& membership,
                                         const GroverConfig& cfg, QueryCostLedger& ledger) {
  if (n == 0) throw std::invalid_argument("find_all_marked: n must be >= 1");
  GroverConfig resolved = cfg.resolved_for(n);
  resolved.validate();

  // The simulator needs the exact marked set to reproduce the measurement
  // distribution. This hidden pass is bookkeeping, not modeled oracle cost.
  std::vector<std::size_t> unfound;
  for (std::size_t j = 0; j < n; ++j) {
    if (membership(j)) unfound.push_back(j);
  }
  ledger.classical_scan_calls += n;

  if (resolved.mode == GroverConfig::Mode::kAnalytic) {
    double charge = 0.0;
    const double dn = static_cast<double>(n);
    for (std::size_t t = 1; t <= unfound.size(); ++t) {
      charge += (9.0 / 4.0) * std::sqrt(dn / static_cast<double>(t));
    }
    ledger.oracle_calls += static_cast<std::uint64_t>(std::ceil(charge));
    return unfound;  // already sorted
  }

  SplitMix64 rng = stream_for(resolved.seed, StreamTag::kGroverSearch, 0);
  const double cap = std::ceil(std::sqrt(static_cast<double>(n)));
  double m_cap = 1.0;
  std::size_t streak = 0;
  std::vector<std::size_t> found;

  while (streak < resolved.fail_streak_limit) {
    auto m_bound = static_cast<std::uint64_t>(std::ceil(m_cap));
    std::uint64_t m = rng.uniform_int(std::max<std::uint64_t>(1, m_bound));
    std::size_t t = unfound.size();
    ledger.oracle_calls += m + 1;  // m amplification queries + 1 verification
    ledger.grover_iterations += m;
    double p = (t == 0) ? 0.0 : grover_success_prob(n, t, static_cast<std::size_t>(m));
    if (rng.next_double() < p) {
      std::size_t pick = static_cast<std::size_t>(rng.uniform_int(t));
      found.push_back(unfound[pick]);
      unfound.erase(unfound.begin() + static_cast<std::ptrdiff_t>(pick));
      streak = 0;
      m_cap = 1.0;
    } else {
      // The measurement lands on a non-target (unmarked or already found)
      // index; the draw is consumed to keep the stream aligned, the value
      // itself changes nothing observable.
      (void)rng.uniform_int(std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n - t)));
      streak += 1;
      m_cap = std::min(m_cap * resolved.lambda, cap);
    }
  }

  std::sort(found.begin(), found.end());
  return found;
}

SupportSets build_support_grover(const DenseMatrix& q, const DenseMatrix& k_mat, double tau,
                                 const GroverConfig& cfg, QueryCostLedger& ledger) {
  if (q.cols() != k_mat.cols()) {
    throw std::invalid_argument("build_support_grover: Q and K must share the column dimension");
  }
  const std::size_t n_rows = q.rows();
  const std::size_t n = k_mat.rows();
  const std::size_t d = q.cols();

  SupportSets support;
  support.n = n;
  support.tau = tau;
  support.rows.resize(n_rows);
  support.scores.resize(n_rows);

  std::vector<QueryCostLedger> row_ledgers(n_rows);
  parallel_for(n_rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto lhs = q.row(i);
      GroverConfig row_cfg = cfg.resolved_for(n);
      row_cfg.seed = derive_seed(cfg.seed, StreamTag::kGroverSearch, i);
      QueryCostLedger& rl = row_ledgers[i];
      std::uint64_t calls_before = rl.oracle_calls;
      support.rows[i] = find_all_marked(
          n, [&](std::size_t j) { return dot(lhs, k_mat.row(j)) >= tau; }, row_cfg, rl);
      rl.dot_product_flops += d * (rl.oracle_calls - calls_before);
      auto& row_scores = support.scores[i];
      row_scores.reserve(support.rows[i].size());
      for (std::size_t j : support.rows[i]) {
        row_scores.push_back(dot(lhs, k_mat.row(j)));
        rl.dot_product_flops += d;
      }
    }
  });
  for (const auto& rl : row_ledgers) ledger += rl;
  return support;
}

}  // namespace sparseatt
