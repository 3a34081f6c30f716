#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sparseatt/dense_matrix.hpp"
#include "sparseatt/ledger.hpp"
#include "sparseatt/support_set.hpp"

namespace sparseatt {

/// Visit counters for a single half-space query. nodes_visited counts nodes
/// where a box decision was evaluated; leaves_scanned counts leaves whose
/// points were tested individually; point_tests counts those individual dot
/// products. Subtrees accepted wholesale contribute to reported only.
struct QueryStats {
  std::uint64_t nodes_visited = 0;
  std::uint64_t leaves_scanned = 0;
  std::uint64_t point_tests = 0;
  std::uint64_t reported = 0;
};

/// Dynamic half-space reporting structure: stores d-dimensional points under
/// stable ids and answers Query(b, c) = { id : point alive, <b, point> >= c }
/// exactly (ties included).
///
/// Layout is a bounding-box tree: median split on the widest box dimension,
/// leaves hold up to kLeafSize points. A subtree is pruned when the maximum
/// of the query functional over its box falls below c, and accepted without
/// per-point tests when the minimum clears c. Removals tombstone the id and
/// trigger a full rebuild once tombstones outnumber live points; inserts
/// enlarge boxes along the descent path and trigger a rebuild when the live
/// count has doubled since the last rebuild, so boxes stay tight up to that
/// deferred slack (and are exact right after a rebuild).
class HsrTree {
 public:
  static constexpr std::size_t kLeafSize = 16;

  explicit HsrTree(std::size_t dim);
  /// Builds over the rows of a matrix; row index becomes the point id.
  explicit HsrTree(const DenseMatrix& points);

  std::size_t dim() const { return dim_; }
  std::size_t live_count() const { return live_; }
  std::size_t tombstone_count() const { return dead_; }

  /// Inserts a point and returns its id (ids are assigned sequentially and
  /// never reused, so duplicates remain distinguishable).
  std::size_t insert(std::span<const double> z);

  /// Tombstones a live point. Unknown or already-removed ids are rejected
  /// with std::out_of_range.
  void remove(std::size_t id);

  /// Exact half-space report, ids sorted ascending.
  std::vector<std::size_t> query(std::span<const double> b, double c,
                                 QueryStats* stats = nullptr) const;

  /// Longest chain of internal nodes from the root to any leaf.
  std::size_t internal_depth() const;

  /// Root bounding box (lo, hi); empty vectors for an empty tree.
  std::pair<std::vector<double>, std::vector<double>> root_box() const;

  /// When enabled, every prune / bulk-accept decision is re-checked against
  /// a linear scan of the subtree and a violation throws std::logic_error.
  /// Meant for tests; turns queries quadratic.
  void set_audit(bool enabled) { audit_ = enabled; }

 private:
  struct Node {
    std::vector<double> lo, hi;
    std::int32_t left = -1, right = -1;
    std::uint32_t split_dim = 0;
    double split_val = 0.0;
    std::vector<std::uint32_t> ids;  // leaf payload (may include tombstones)
    bool leaf() const { return left < 0; }
  };

  std::span<const double> point(std::size_t id) const {
    return std::span<const double>(coords_.data() + id * dim_, dim_);
  }

  std::int32_t build_subtree(std::vector<std::uint32_t>& ids, std::size_t begin, std::size_t end);
  void split_leaf(std::int32_t node_index);
  void rebuild();
  void collect_live(std::int32_t node_index, std::vector<std::size_t>& out) const;
  void query_node(std::int32_t node_index, std::span<const double> b, double c,
                  std::vector<std::size_t>& out, QueryStats& stats) const;
  void audit_decision(std::int32_t node_index, std::span<const double> b, double c,
                      bool pruned) const;

  std::size_t dim_ = 0;
  std::vector<double> coords_;  // flat, id * dim_
  std::vector<char> alive_;
  std::size_t live_ = 0;
  std::size_t dead_ = 0;
  std::size_t live_at_rebuild_ = 1;
  std::int32_t root_ = -1;
  std::vector<Node> nodes_;
  bool audit_ = false;
};

/// Classical support-finder pipeline: builds an HsrTree over the rows of K,
/// then queries with b = Q_i, c = tau for each row. Scores of reported ids
/// are recomputed with the shared dot product. Per-point tests are charged
/// as oracle calls; node box evaluations are charged as classical scans plus
/// 2d flops each.
SupportSets build_support_hsr(const DenseMatrix& q, const DenseMatrix& k_mat, double tau,
                              QueryCostLedger& ledger,
                              std::vector<QueryStats>* per_row_stats = nullptr);

}  // namespace sparseatt
