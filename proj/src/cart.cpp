#include "ethfraud/cart.hpp"

#include <algorithm>

#include "ethfraud/errors.hpp"
#include "ethfraud/transaction.hpp"

namespace ethfraud {

double gini(std::int64_t n_fraud, std::int64_t n_nonfraud) {
  const std::int64_t n = n_fraud + n_nonfraud;
  if (n <= 0) throw InputError("gini of an empty node");
  const double p_fraud = static_cast<double>(n_fraud) / static_cast<double>(n);
  const double p_nonfraud = static_cast<double>(n_nonfraud) / static_cast<double>(n);
  return p_fraud * (1.0 - p_fraud) + p_nonfraud * (1.0 - p_nonfraud);
}

std::optional<Split> best_split(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                const std::vector<int>& rows,
                                const std::vector<int>& candidate_features,
                                std::int64_t min_node_size) {
  const std::int64_t n = static_cast<std::int64_t>(rows.size());
  if (n < 2 || n <= min_node_size) return std::nullopt;

  std::int64_t parent_fraud = 0;
  for (const int r : rows) parent_fraud += (y[static_cast<std::size_t>(r)] == kFraud);
  const std::int64_t parent_nonfraud = n - parent_fraud;
  if (parent_fraud == 0 || parent_nonfraud == 0) return std::nullopt;  // pure

  const double parent_gini = gini(parent_fraud, parent_nonfraud);
  std::optional<Split> best;

  std::vector<int> feats = candidate_features;
  std::sort(feats.begin(), feats.end());  // ascending for deterministic ties

  std::vector<std::pair<double, int>> vals;  // (value, label)
  vals.reserve(rows.size());
  for (const int f : feats) {
    vals.clear();
    for (const int r : rows) {
      vals.emplace_back(X(r, f), y[static_cast<std::size_t>(r)]);
    }
    std::sort(vals.begin(), vals.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::int64_t left_fraud = 0, left_n = 0;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      left_fraud += (vals[i].second == kFraud);
      ++left_n;
      const double lo = vals[i].first;
      const double hi = vals[i + 1].first;
      if (!(lo < hi)) continue;  // same value, no boundary here

      double thr = 0.5 * (lo + hi);
      // Adjacent doubles can round the midpoint up to hi; clamp so the scan
      // partition and the <= routing rule stay consistent.
      if (!(thr < hi)) thr = lo;

      const std::int64_t right_n = n - left_n;
      const std::int64_t left_nonfraud = left_n - left_fraud;
      const std::int64_t right_fraud = parent_fraud - left_fraud;
      const std::int64_t right_nonfraud = right_n - right_fraud;
      const double decrease = parent_gini -
                              (static_cast<double>(left_n) / static_cast<double>(n)) *
                                  gini(left_fraud, left_nonfraud) -
                              (static_cast<double>(right_n) / static_cast<double>(n)) *
                                  gini(right_fraud, right_nonfraud);
      if (!best || decrease > best->decrease) {
        best = Split{f, thr, decrease};
      }
    }
  }
  return best;
}

Tree grow_tree(const Eigen::MatrixXd& X, const std::vector<int>& y, const std::vector<int>& rows,
               const GrowParams& params, Rng& rng) {
  if (rows.empty()) throw InputError("cannot grow a tree on zero rows");
  const int d = static_cast<int>(X.cols());
  const int mtry = std::min(params.mtry, d);

  Tree tree;
  struct Item {
    int node;
    std::vector<int> rows;
  };
  std::vector<Item> stack;
  tree.nodes.emplace_back();
  stack.push_back({0, rows});

  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();

    std::int64_t n_fraud = 0;
    for (const int r : item.rows) n_fraud += (y[static_cast<std::size_t>(r)] == kFraud);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(item.node)];
    node.n_rows = static_cast<std::int64_t>(item.rows.size());
    node.n_fraud = n_fraud;
    node.n_nonfraud = node.n_rows - n_fraud;

    const std::vector<int> feats = rng.sample_without_replacement(d, mtry);
    const auto split = best_split(X, y, item.rows, feats, params.min_node_size);
    if (!split) continue;  // leaf

    const int left_index = static_cast<int>(tree.nodes.size());
    const int right_index = left_index + 1;
    {
      TreeNode& n2 = tree.nodes[static_cast<std::size_t>(item.node)];
      n2.feature = split->feature;
      n2.threshold = split->threshold;
      n2.decrease = split->decrease;
      n2.left = left_index;
      n2.right = right_index;
    }
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(item.rows.size());
    for (const int r : item.rows) {
      (X(r, split->feature) <= split->threshold ? left_rows : right_rows).push_back(r);
    }
    // Left child is grown first (LIFO order); rng draws follow that order.
    stack.push_back({right_index, std::move(right_rows)});
    stack.push_back({left_index, std::move(left_rows)});
  }
  return tree;
}

namespace {

const TreeNode& route_to_leaf(const Tree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  int i = 0;
  for (;;) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(i)];
    if (node.is_leaf()) return node;
    i = x(node.feature) <= node.threshold ? node.left : node.right;
  }
}

}  // namespace

std::pair<double, double> predict_tree(const Tree& tree,
                                       const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  const TreeNode& leaf = route_to_leaf(tree, x);
  const double n = static_cast<double>(leaf.n_fraud + leaf.n_nonfraud);
  return {static_cast<double>(leaf.n_fraud) / n, static_cast<double>(leaf.n_nonfraud) / n};
}

int tree_vote(const Tree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  const TreeNode& leaf = route_to_leaf(tree, x);
  return leaf.n_nonfraud > leaf.n_fraud ? kNonFraud : kFraud;
}

}  // namespace ethfraud
