#include "ethfraud/forest.hpp"

#include "ethfraud/errors.hpp"
#include "ethfraud/parallel.hpp"
#include "ethfraud/rng.hpp"

namespace ethfraud {

ForestModel train_forest(const Dataset& train, const RFParams& params, int threads) {
  if (params.n_trees < 1) throw InputError("n_trees must be positive");
  if (params.mtry < 1) throw InputError("mtry must be positive");
  if (!(params.cutoff > 0.0 && params.cutoff < 1.0)) throw InputError("cutoff must lie in (0,1)");
  if (train.count(kFraud) == 0 || train.count(kNonFraud) == 0) {
    throw TrainingError("forest training requires both classes");
  }

  ForestModel model;
  model.params = params;
  model.feature_names = train.feature_names;
  model.trees.resize(static_cast<std::size_t>(params.n_trees));

  const int n = static_cast<int>(train.rows());
  const GrowParams grow{params.mtry, params.min_node_size};

  parallel_for(static_cast<std::size_t>(params.n_trees), threads, [&](std::size_t i) {
    Rng rng(derive_stream(params.seed, static_cast<std::uint64_t>(i)));
    std::vector<int> bootstrap(static_cast<std::size_t>(n));
    for (auto& r : bootstrap) {
      r = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
    }
    model.trees[i] = grow_tree(train.features, train.labels, bootstrap, grow, rng);
  });
  return model;
}

double forest_proba(const ForestModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  std::int64_t nonfraud_votes = 0;
  for (const auto& tree : m.trees) {
    if (tree_vote(tree, x) == kNonFraud) ++nonfraud_votes;
  }
  return static_cast<double>(nonfraud_votes) / static_cast<double>(m.trees.size());
}

std::vector<double> forest_proba_all(const ForestModel& m, const Dataset& d, int threads) {
  if (d.cols() != static_cast<Eigen::Index>(m.feature_names.size())) {
    throw InputError("feature width does not match the trained forest");
  }
  std::vector<double> out(static_cast<std::size_t>(d.rows()));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    out[i] = forest_proba(m, d.features.row(static_cast<Eigen::Index>(i)));
  });
  return out;
}

Eigen::VectorXd gini_importance(const ForestModel& m) {
  const auto d = static_cast<Eigen::Index>(m.feature_names.size());
  Eigen::VectorXd importance = Eigen::VectorXd::Zero(d);
  for (const auto& tree : m.trees) {
    const double root_rows = static_cast<double>(tree.nodes.front().n_rows);
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) continue;
      importance(node.feature) += (static_cast<double>(node.n_rows) / root_rows) * node.decrease;
    }
  }
  importance /= static_cast<double>(m.trees.size());
  return importance;
}

}  // namespace ethfraud
