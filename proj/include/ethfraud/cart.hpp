#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "ethfraud/rng.hpp"

namespace ethfraud {

// Flat binary classification tree; nodes[0] is the root and feature == -1
// marks a leaf. Values route left when x[feature] <= threshold.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::int64_t n_rows = 0;  // training rows that reached the node
  double decrease = 0.0;    // weighted impurity decrease (internal nodes)
  std::int64_t n_fraud = 0;
  std::int64_t n_nonfraud = 0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;
};

// Binary gini impurity of a class count pair; in [0, 0.5].
double gini(std::int64_t n_fraud, std::int64_t n_nonfraud);

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;
};

// Exhaustive search over the candidate features with thresholds at midpoints
// of consecutive distinct values, maximizing
//   gini(parent) - nL/n * gini(L) - nR/n * gini(R).
// Ties break toward the lower feature index, then the lower threshold.
// Returns nullopt when the node is pure, every candidate is constant, or the
// node holds <= min_node_size rows.
std::optional<Split> best_split(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                const std::vector<int>& rows,
                                const std::vector<int>& candidate_features,
                                std::int64_t min_node_size);

struct GrowParams {
  int mtry = 3;
  std::int64_t min_node_size = 1;
};

// Unpruned recursive growth; each node draws mtry candidate features without
// replacement from `rng`. Deterministic given (rows, params, rng seed).
Tree grow_tree(const Eigen::MatrixXd& X, const std::vector<int>& y, const std::vector<int>& rows,
               const GrowParams& params, Rng& rng);

// Leaf class proportions (p_fraud, p_nonfraud) for one sample.
std::pair<double, double> predict_tree(const Tree& tree,
                                       const Eigen::Ref<const Eigen::RowVectorXd>& x);

// Majority vote of the leaf the sample lands in; leaf ties vote fraud.
int tree_vote(const Tree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& x);

}  // namespace ethfraud
