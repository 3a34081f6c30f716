#include "sparseatt/hsr_tree.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "sparseatt/parallel.hpp"

namespace sparseatt {

namespace {

// Extremes of the linear functional <b, .> over an axis-aligned box, picked
// coordinatewise from the sign of b.
void functional_extremes(std::span<const double> b, const std::vector<double>& lo,
                         const std::vector<double>& hi, double& out_min, double& out_max) {
  double mn = 0.0, mx = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    double bk = b[k];
    if (bk >= 0.0) {
      mx += bk * hi[k];
      mn += bk * lo[k];
    } else {
      mx += bk * lo[k];
      mn += bk * hi[k];
    }
  }
  out_min = mn;
  out_max = mx;
}

}  // namespace

HsrTree::HsrTree(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw std::invalid_argument("HsrTree: dimension must be >= 1");
}

HsrTree::HsrTree(const DenseMatrix& points) : HsrTree(points.cols()) {
  coords_ = points.data();
  alive_.assign(points.rows(), 1);
  live_ = points.rows();
  std::vector<std::uint32_t> ids(points.rows());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::uint32_t>(i);
  if (!ids.empty()) root_ = build_subtree(ids, 0, ids.size());
  live_at_rebuild_ = std::max<std::size_t>(1, live_);
}

std::int32_t HsrTree::build_subtree(std::vector<std::uint32_t>& ids, std::size_t begin,
                                    std::size_t end) {
  Node node;
  node.lo.assign(dim_, std::numeric_limits<double>::infinity());
  node.hi.assign(dim_, -std::numeric_limits<double>::infinity());
  for (std::size_t t = begin; t < end; ++t) {
    auto p = point(ids[t]);
    for (std::size_t k = 0; k < dim_; ++k) {
      node.lo[k] = std::min(node.lo[k], p[k]);
      node.hi[k] = std::max(node.hi[k], p[k]);
    }
  }

  std::size_t widest = 0;
  double width = -1.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    double w = node.hi[k] - node.lo[k];
    if (w > width) {
      width = w;
      widest = k;
    }
  }

  // Identical points cannot be separated; keep them in one oversized leaf.
  if (end - begin <= kLeafSize || width <= 0.0) {
    node.ids.assign(ids.begin() + begin, ids.begin() + end);
    nodes_.push_back(std::move(node));
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::size_t mid = begin + (end - begin) / 2;
  auto cmp = [this, widest](std::uint32_t a, std::uint32_t b) {
    double ca = point(a)[widest];
    double cb = point(b)[widest];
    if (ca != cb) return ca < cb;
    return a < b;  // deterministic tie-break
  };
  std::nth_element(ids.begin() + begin, ids.begin() + mid, ids.begin() + end, cmp);
  node.split_dim = static_cast<std::uint32_t>(widest);
  node.split_val = point(ids[mid])[widest];

  std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(std::move(node));
  std::int32_t left = build_subtree(ids, begin, mid);
  std::int32_t right = build_subtree(ids, mid, end);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

std::size_t HsrTree::insert(std::span<const double> z) {
  if (z.size() != dim_) throw std::invalid_argument("HsrTree::insert: dimension mismatch");
  std::size_t id = alive_.size();
  coords_.insert(coords_.end(), z.begin(), z.end());
  alive_.push_back(1);
  ++live_;

  if (root_ < 0) {
    Node leaf;
    leaf.lo.assign(z.begin(), z.end());
    leaf.hi.assign(z.begin(), z.end());
    leaf.ids.push_back(static_cast<std::uint32_t>(id));
    nodes_.push_back(std::move(leaf));
    root_ = static_cast<std::int32_t>(nodes_.size() - 1);
  } else {
    std::int32_t cur = root_;
    while (true) {
      Node& node = nodes_[cur];
      for (std::size_t k = 0; k < dim_; ++k) {
        node.lo[k] = std::min(node.lo[k], z[k]);
        node.hi[k] = std::max(node.hi[k], z[k]);
      }
      if (node.leaf()) break;
      cur = (z[node.split_dim] < node.split_val) ? node.left : node.right;
    }
    nodes_[cur].ids.push_back(static_cast<std::uint32_t>(id));
    if (nodes_[cur].ids.size() > kLeafSize) split_leaf(cur);
  }

  if (live_ >= 2 * live_at_rebuild_) rebuild();
  return id;
}

void HsrTree::split_leaf(std::int32_t node_index) {
  // One median split; an overflowing leaf holds kLeafSize + 1 ids, so both
  // halves fit in fresh leaves. Degenerate (zero-width) leaves stay as is.
  std::vector<std::uint32_t> ids = std::move(nodes_[node_index].ids);
  nodes_[node_index].ids.clear();

  // Pick the widest spread of the stored points themselves; the node box may
  // carry stale slack from earlier inserts.
  std::vector<double> lo(dim_, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim_, -std::numeric_limits<double>::infinity());
  for (std::uint32_t id : ids) {
    auto p = point(id);
    for (std::size_t k = 0; k < dim_; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  std::size_t widest = 0;
  double width = -1.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    double w = hi[k] - lo[k];
    if (w > width) {
      width = w;
      widest = k;
    }
  }
  if (!(width > 0.0)) {  // all stored points identical; keep the oversized leaf
    nodes_[node_index].ids = std::move(ids);
    return;
  }

  std::size_t mid = ids.size() / 2;
  auto cmp = [this, widest](std::uint32_t a, std::uint32_t b) {
    double ca = point(a)[widest];
    double cb = point(b)[widest];
    if (ca != cb) return ca < cb;
    return a < b;
  };
  std::nth_element(ids.begin(), ids.begin() + mid, ids.end(), cmp);

  auto make_leaf = [this](std::vector<std::uint32_t> leaf_ids) {
    Node leaf;
    leaf.lo.assign(dim_, std::numeric_limits<double>::infinity());
    leaf.hi.assign(dim_, -std::numeric_limits<double>::infinity());
    for (std::uint32_t id : leaf_ids) {
      auto p = point(id);
      for (std::size_t k = 0; k < dim_; ++k) {
        leaf.lo[k] = std::min(leaf.lo[k], p[k]);
        leaf.hi[k] = std::max(leaf.hi[k], p[k]);
      }
    }
    leaf.ids = std::move(leaf_ids);
    nodes_.push_back(std::move(leaf));
    return static_cast<std::int32_t>(nodes_.size() - 1);
  };

  std::int32_t left = make_leaf({ids.begin(), ids.begin() + mid});
  std::int32_t right = make_leaf({ids.begin() + mid, ids.end()});
  Node& node = nodes_[node_index];
  node.split_dim = static_cast<std::uint32_t>(widest);
  node.split_val = point(ids[mid])[widest];
  node.left = left;
  node.right = right;
}

void HsrTree::remove(std::size_t id) {
  if (id >= alive_.size() || !alive_[id]) {
    throw std::out_of_range("HsrTree::remove: unknown or already-removed id " +
                            std::to_string(id));
  }
  alive_[id] = 0;
  --live_;
  ++dead_;
  if (dead_ > live_) rebuild();
}

void HsrTree::rebuild() {
  nodes_.clear();
  root_ = -1;
  std::vector<std::uint32_t> ids;
  ids.reserve(live_);
  for (std::size_t id = 0; id < alive_.size(); ++id) {
    if (alive_[id]) ids.push_back(static_cast<std::uint32_t>(id));
  }
  dead_ = 0;  // tombstones are purged from the tree
  if (!ids.empty()) root_ = build_subtree(ids, 0, ids.size());
  live_at_rebuild_ = std::max<std::size_t>(1, live_);
}

void HsrTree::collect_live(std::int32_t node_index, std::vector<std::size_t>& out) const {
  const Node& node = nodes_[node_index];
  if (node.leaf()) {
    for (std::uint32_t id : node.ids) {
      if (alive_[id]) out.push_back(id);
    }
    return;
  }
  collect_live(node.left, out);
  collect_live(node.right, out);
}

void HsrTree::audit_decision(std::int32_t node_index, std::span<const double> b, double c,
                             bool pruned) const {
  std::vector<std::size_t> members;
  collect_live(node_index, members);
  for (std::size_t id : members) {
    bool satisfies = dot(b, point(id)) >= c;
    if (pruned && satisfies) {
      throw std::logic_error("HsrTree audit: pruned subtree contains a reporting point");
    }
    if (!pruned && !satisfies) {
      throw std::logic_error("HsrTree audit: bulk-accepted subtree contains a non-reporting point");
    }
  }
}

void HsrTree::query_node(std::int32_t node_index, std::span<const double> b, double c,
                         std::vector<std::size_t>& out, QueryStats& stats) const {
  const Node& node = nodes_[node_index];
  stats.nodes_visited += 1;
  double fmin = 0.0, fmax = 0.0;
  functional_extremes(b, node.lo, node.hi, fmin, fmax);
  if (fmax < c) {
    if (audit_) audit_decision(node_index, b, c, /*pruned=*/true);
    return;
  }
  if (fmin >= c) {
    if (audit_) audit_decision(node_index, b, c, /*pruned=*/false);
    std::size_t before = out.size();
    collect_live(node_index, out);
    stats.reported += out.size() - before;
    return;
  }
  if (node.leaf()) {
    stats.leaves_scanned += 1;
    for (std::uint32_t id : node.ids) {
      if (!alive_[id]) continue;
      stats.point_tests += 1;
      if (dot(b, point(id)) >= c) {
        out.push_back(id);
        stats.reported += 1;
      }
    }
    return;
  }
  query_node(node.left, b, c, out, stats);
  query_node(node.right, b, c, out, stats);
}

std::vector<std::size_t> HsrTree::query(std::span<const double> b, double c,
                                        QueryStats* stats) const {
  if (b.size() != dim_) throw std::invalid_argument("HsrTree::query: dimension mismatch");
  std::vector<std::size_t> out;
  QueryStats local;
  if (root_ >= 0) query_node(root_, b, c, out, local);
  std::sort(out.begin(), out.end());
  if (stats != nullptr) *stats = local;
  return out;
}

std::size_t HsrTree::internal_depth() const {
  if (root_ < 0) return 0;
  // Iterative DFS to avoid recursion bookkeeping on the hot path types.
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{root_, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [idx, depth] = stack.back();
    stack.pop_back();
    const Node& node = nodes_[idx];
    if (node.leaf()) continue;
    deepest = std::max(deepest, depth + 1);
    stack.push_back({node.left, depth + 1});
    stack.push_back({node.right, depth + 1});
  }
  return deepest;
}

std::pair<std::vector<double>, std::vector<double>> HsrTree::root_box() const {
  if (root_ < 0) return {};
  return {nodes_[root_].lo, nodes_[root_].hi};
}

SupportSets build_support_hsr(const DenseMatrix& q, const DenseMatrix& k_mat, double tau,
                              QueryCostLedger& ledger, std::vector<QueryStats>* per_row_stats) {
  if (q.cols() != k_mat.cols()) {
    throw std::invalid_argument("build_support_hsr: Q and K must share the column dimension");
  }
  const std::size_t n_rows = q.rows();
  const std::size_t d = q.cols();

  HsrTree tree(k_mat);

  SupportSets support;
  support.n = k_mat.rows();
  support.tau = tau;
  support.rows.resize(n_rows);
  support.scores.resize(n_rows);
  if (per_row_stats != nullptr) per_row_stats->assign(n_rows, QueryStats{});

  std::vector<QueryCostLedger> row_ledgers(n_rows);
  parallel_for(n_rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      QueryStats stats;
      support.rows[i] = tree.query(q.row(i), tau, &stats);
      auto& row_scores = support.scores[i];
      row_scores.reserve(support.rows[i].size());
      for (std::size_t j : support.rows[i]) {
        row_scores.push_back(dot(q.row(i), k_mat.row(j)));
      }
      QueryCostLedger& rl = row_ledgers[i];
      rl.oracle_calls += stats.point_tests;
      rl.dot_product_flops += d * stats.point_tests;  // per-point membership tests
      rl.dot_product_flops += 2 * d * stats.nodes_visited;  // box extremes
      rl.dot_product_flops += d * support.rows[i].size();   // score recomputation
      rl.classical_scan_calls += stats.nodes_visited;
      if (per_row_stats != nullptr) (*per_row_stats)[i] = stats;
    }
  });
  for (const auto& rl : row_ledgers) ledger += rl;
  return support;
}

}  // namespace sparseatt
