#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "sparseatt/dense_matrix.hpp"
#include "sparseatt/ledger.hpp"
#include "sparseatt/support_set.hpp"

namespace sparseatt {

/// Configuration for the simulated search over an unknown number of marked
/// items. The iteration count of each run is drawn uniformly from
/// [0, ceil(M)) where the cap M starts at 1, grows by `lambda` after every
/// failed run (clamped at ceil(sqrt(n))), and resets to 1 after a success.
/// The search stops after `fail_streak_limit` consecutive runs that produce
/// no new item; 0 means "use the default 3 * ceil(log2 n)".
struct GroverConfig {
  enum class Mode { kSampled, kAnalytic };

  Mode mode = Mode::kSampled;
  double lambda = 6.0 / 5.0;            // growth factor, must lie in (1, 4/3)
  std::size_t fail_streak_limit = 0;    // 0 -> default for the given n
  std::uint64_t seed = 0;

  /// Resolved copy with the fail-streak default filled in for domain size n.
  GroverConfig resolved_for(std::size_t n) const;

  /// Throws std::invalid_argument unless lambda is in (1, 4/3) and
  /// fail_streak_limit >= 1.
  void validate() const;
};

/// Default fail-streak budget, 3 * ceil(log2 n) (at least 1).
std::size_t default_fail_streak_limit(std::size_t n);

/// Probability that measuring after j Grover iterations over n items with t
/// of them marked yields a marked item: sin^2((2j+1) * asin(sqrt(t/n))).
/// Returns 0 for t = 0 by convention (detection of the empty case is the
/// fail-streak's job). Requires t <= n >= 1.
double grover_success_prob(std::size_t n, std::size_t t, std::size_t j);

/// Cross-validation of the two-dimensional rotation model against an
/// explicit n-amplitude statevector run of j oracle+diffusion rounds.
struct RotationModelReport {
  double statevector_mass = 0.0;  // probability mass on marked indices
  double predicted = 0.0;         // grover_success_prob(n, |marked|, j)
  double difference = 0.0;        // absolute gap
};

/// Requires n a power of two and n <= 1024 (std::length_error above,
/// std::invalid_argument for non powers of two or out-of-range indices).
/// Duplicate marked indices are collapsed.
RotationModelReport validate_rotation_model(std::size_t n, std::vector<std::size_t> marked,
                                            std::size_t j);

/// Finds every index in [0, n) accepted by `membership`.
///
/// Sampled mode simulates the search run by run: iteration count m is drawn
/// from the schedule above, the run succeeds with probability
/// sin^2((2m+1) * asin(sqrt(t/n))) where t counts the still-unfound marked
/// items (found items are excluded classically), a success reveals a
/// uniformly random unfound marked item, and every run charges m+1 oracle
/// calls. The simulator recovers the true marked set with one hidden scan up
/// front, metered as n classical_scan_calls but not as oracle cost.
///
/// Analytic mode deterministically returns the true marked set and charges
/// ceil(sum_{t=1..T} (9/4) sqrt(n/t)) oracle calls, the expected-cost model
/// of the sampled schedule.
///
/// Returned indices are sorted. Identical (cfg.seed, inputs) give identical
/// output and ledger.
std::vector<std::size_t> find_all_marked(std::size_t n,
                                         const std::function<bool(std::size_t)>& membership,
                                         const GroverConfig& cfg, QueryCostLedger& ledger);

/// Support-finder pipeline over rows: membership(j) := <Q_i, K_j> >= tau.
/// Each charged oracle call additionally costs d flops; scores of found
/// indices are recomputed with the shared dot product. Per-row searches use
/// streams derived from (cfg.seed, i).
SupportSets build_support_grover(const DenseMatrix& q, const DenseMatrix& k_mat, double tau,
                                 const GroverConfig& cfg, QueryCostLedger& ledger);

}  // namespace sparseatt
