#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ethfraud/cart.hpp"
#include "ethfraud/dataset.hpp"

namespace ethfraud {

struct RFParams {
  int n_trees = 500;
  int mtry = 3;
  std::int64_t min_node_size = 1;
  double cutoff = 0.5;  // non-fraud probability threshold
  std::uint64_t seed = 0;
};

struct ForestModel {
  RFParams params;
  std::vector<std::string> feature_names;
  std::vector<Tree> trees;
};

// Bagged CART forest. Tree i draws its bootstrap sample and per-node feature
// subsets from a stream derived from (seed, i), so parallel and serial
// training produce identical forests.
ForestModel train_forest(const Dataset& train, const RFParams& params, int threads = 0);

// Fraction of trees whose leaf majority is non-fraud; resolution 1/n_trees.
double forest_proba(const ForestModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x);

std::vector<double> forest_proba_all(const ForestModel& m, const Dataset& d, int threads = 0);

// Shared cutoff rule: non-fraud iff p_nonfraud > cutoff; a tie is fraud.
inline int classify(double p_nonfraud, double cutoff) {
  return p_nonfraud > cutoff ? kNonFraud : kFraud;
}

// Per-feature mean (over trees) of reach-probability-weighted impurity
// decrease summed over the nodes that split on the feature.
Eigen::VectorXd gini_importance(const ForestModel& m);

}  // namespace ethfraud
