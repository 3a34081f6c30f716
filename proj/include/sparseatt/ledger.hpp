#pragma once

#include <cstdint>

namespace sparseatt {

// Work accounting shared by every support finder and attention path.
//
// An oracle call is one evaluation of the membership predicate for a row,
// i.e. one d-length dot product plus a threshold test. It is the unit in
// which classical and Grover-style query counts are compared.
// dot_product_flops meters the multiply-add work the modeled algorithm
// performs. classical_scan_calls meters bookkeeping passes that are not part
// of the modeled cost (for example the simulator's hidden scan that recovers
// the true marked set, or tree-node box evaluations).
struct QueryCostLedger {
  std::uint64_t oracle_calls = 0;
  std::uint64_t grover_iterations = 0;
  std::uint64_t dot_product_flops = 0;
  std::uint64_t classical_scan_calls = 0;

  QueryCostLedger& operator+=(const QueryCostLedger& other) {
    oracle_calls += other.oracle_calls;
    grover_iterations += other.grover_iterations;
    dot_product_flops += other.dot_product_flops;
    classical_scan_calls += other.classical_scan_calls;
    return *this;
  }

  friend QueryCostLedger operator+(QueryCostLedger a, const QueryCostLedger& b) {
    a += b;
    return a;
  }

  bool operator==(const QueryCostLedger&) const = default;
};

}  // namespace sparseatt
