#include "ethfraud/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ethfraud/errors.hpp"
#include "ethfraud/parallel.hpp"
#include "ethfraud/rng.hpp"

namespace ethfraud {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double logloss(double p, int y) {
  const double clamped = std::min(1.0 - 1e-15, std::max(1e-15, p));
  return y == kFraud ? -std::log(clamped) : -std::log(1.0 - clamped);
}

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  double g_left = 0.0, h_left = 0.0;
};

// Exact greedy split over the tree's feature subset. min_child_weight is a
// hard filter; among the remaining candidates the maximal gain wins with ties
// broken by (lower feature, lower threshold).
std::optional<SplitCandidate> best_xgb_split(const Eigen::MatrixXd& X,
                                             const std::vector<double>& g,
                                             const std::vector<double>& h,
                                             const std::vector<int>& rows,
                                             const std::vector<int>& features,
                                             const XGBParams& params, double g_sum, double h_sum) {
  std::optional<SplitCandidate> best;
  std::vector<std::pair<double, int>> vals;
  vals.reserve(rows.size());
  for (const int f : features) {
    vals.clear();
    for (const int r : rows) vals.emplace_back(X(r, f), r);
    std::sort(vals.begin(), vals.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double gl = 0.0, hl = 0.0;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      const int r = vals[i].second;
      gl += g[static_cast<std::size_t>(r)];
      hl += h[static_cast<std::size_t>(r)];
      const double lo = vals[i].first;
      const double hi = vals[i + 1].first;
      if (!(lo < hi)) continue;

      double thr = 0.5 * (lo + hi);
      if (!(thr < hi)) thr = lo;

      const double gr = g_sum - gl;
      const double hr = h_sum - hl;
      if (hl < params.min_child_weight || hr < params.min_child_weight) continue;
      const double gain = split_gain(gl, hl, gr, hr, params.lambda, params.gamma_pen);
      if (!best || gain > best->gain) {
        best = SplitCandidate{f, thr, gain, gl, hl};
      }
    }
  }
  return best;
}

XgbTree grow_xgb_tree(const Eigen::MatrixXd& X, const std::vector<double>& g,
                      const std::vector<double>& h, const std::vector<int>& rows,
                      const std::vector<int>& features, const XGBParams& params) {
  XgbTree tree;
  struct Item {
    int node;
    int depth;
    std::vector<int> rows;
  };
  std::vector<Item> stack;
  tree.nodes.emplace_back();
  stack.push_back({0, 0, rows});

  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();

    double g_sum = 0.0, h_sum = 0.0;
    for (const int r : item.rows) {
      g_sum += g[static_cast<std::size_t>(r)];
      h_sum += h[static_cast<std::size_t>(r)];
    }
    tree.nodes[static_cast<std::size_t>(item.node)].cover = h_sum;

    std::optional<SplitCandidate> split;
    if (item.depth < params.max_depth && item.rows.size() >= 2) {
      split = best_xgb_split(X, g, h, item.rows, features, params, g_sum, h_sum);
    }
    if (!split || !(split->gain > 0.0)) {
      tree.nodes[static_cast<std::size_t>(item.node)].value =
          params.eta * leaf_weight(g_sum, h_sum, params.lambda);
      continue;
    }

    const int left_index = static_cast<int>(tree.nodes.size());
    const int right_index = left_index + 1;
    {
      XgbNode& node = tree.nodes[static_cast<std::size_t>(item.node)];
      node.feature = split->feature;
      node.threshold = split->threshold;
      node.gain = split->gain;
      node.left = left_index;
      node.right = right_index;
    }
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(item.rows.size());
    for (const int r : item.rows) {
      (X(r, split->feature) <= split->threshold ? left_rows : right_rows).push_back(r);
    }
    stack.push_back({right_index, item.depth + 1, std::move(right_rows)});
    stack.push_back({left_index, item.depth + 1, std::move(left_rows)});
  }
  return tree;
}

double tree_value(const XgbTree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  int i = 0;
  for (;;) {
    const XgbNode& node = tree.nodes[static_cast<std::size_t>(i)];
    if (node.is_leaf()) return node.value;
    i = x(node.feature) <= node.threshold ? node.left : node.right;
  }
}

}  // namespace

std::pair<double, double> logistic_grad_hess(int y, double margin) {
  const double p = sigmoid(margin);
  const double g = p - (y == kFraud ? 1.0 : 0.0);
  const double h = std::max(p * (1.0 - p), 1e-16);
  return {g, h};
}

double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda,
                  double gamma_pen) {
  const double g_parent = g_left + g_right;
  const double h_parent = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
                g_parent * g_parent / (h_parent + lambda)) -
         gamma_pen;
}

double leaf_weight(double g_sum, double h_sum, double lambda) {
  return -g_sum / (h_sum + lambda);
}

BoostModel train_boost(const Dataset& train, const XGBParams& params) {
  if (params.n_rounds < 1) throw InputError("n_rounds must be positive");
  if (!(params.colsample > 0.0 && params.colsample <= 1.0)) {
    throw InputError("colsample must lie in (0,1]");
  }
  if (params.min_child_weight < 0.0) throw InputError("min_child_weight must be >= 0");
  const std::int64_t n_fraud = train.count(kFraud);
  const std::int64_t n_nonfraud = train.count(kNonFraud);
  if (n_fraud == 0 || n_nonfraud == 0) {
    throw TrainingError("boosting requires both classes");
  }

  const int n = static_cast<int>(train.rows());
  const int d = static_cast<int>(train.cols());

  // Internal stratified holdout for early stopping.
  std::vector<int> fit_rows, hold_rows;
  if (params.early_stop_rounds > 0) {
    std::vector<std::vector<int>> by_class(2);
    for (int i = 0; i < n; ++i) {
      by_class[static_cast<std::size_t>(train.labels[static_cast<std::size_t>(i)])].push_back(i);
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      Rng rng(derive_stream(params.seed, 0xe5c0 + c));
      rng.shuffle(by_class[c]);
      const std::size_t n_hold = by_class[c].size() / 10;
      for (std::size_t i = 0; i < by_class[c].size(); ++i) {
        (i < n_hold ? hold_rows : fit_rows).push_back(by_class[c][i]);
      }
    }
    std::sort(fit_rows.begin(), fit_rows.end());
    std::sort(hold_rows.begin(), hold_rows.end());
  }
  bool early_stop = params.early_stop_rounds > 0 && !hold_rows.empty();
  if (!early_stop) {
    fit_rows.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) fit_rows[static_cast<std::size_t>(i)] = i;
    hold_rows.clear();
  }

  BoostModel model;
  model.params = params;
  model.feature_names = train.feature_names;
  const double fraud_rate = static_cast<double>(n_fraud) / static_cast<double>(n);
  model.base_score = std::log(fraud_rate / (1.0 - fraud_rate));

  std::vector<double> margins(static_cast<std::size_t>(n), model.base_score);
  std::vector<double> g(static_cast<std::size_t>(n), 0.0), h(static_cast<std::size_t>(n), 0.0);
  const int n_cols = std::max(1, static_cast<int>(std::ceil(params.colsample * d)));

  double best_holdout = std::numeric_limits<double>::infinity();
  int rounds_since_best = 0;
  model.best_round = 0;

  for (int round = 0; round < params.n_rounds; ++round) {
    for (const int r : fit_rows) {
      const auto [gr, hr] =
          logistic_grad_hess(train.labels[static_cast<std::size_t>(r)], margins[static_cast<std::size_t>(r)]);
      g[static_cast<std::size_t>(r)] = gr;
      h[static_cast<std::size_t>(r)] = hr;
    }

    Rng col_rng(derive_stream(params.seed, 0xc01 + static_cast<std::uint64_t>(round)));
    std::vector<int> features = col_rng.sample_without_replacement(d, n_cols);
    std::sort(features.begin(), features.end());

    XgbTree tree = grow_xgb_tree(train.features, g, h, fit_rows, features, params);

    double fit_loss = 0.0;
    for (const int r : fit_rows) {
      margins[static_cast<std::size_t>(r)] += tree_value(tree, train.features.row(r));
      fit_loss += logloss(sigmoid(margins[static_cast<std::size_t>(r)]),
                          train.labels[static_cast<std::size_t>(r)]);
    }
    model.train_logloss.push_back(fit_loss / static_cast<double>(fit_rows.size()));
    model.trees.push_back(std::move(tree));

    if (early_stop) {
      double hold_loss = 0.0;
      for (const int r : hold_rows) {
        margins[static_cast<std::size_t>(r)] +=
            tree_value(model.trees.back(), train.features.row(r));
        hold_loss += logloss(sigmoid(margins[static_cast<std::size_t>(r)]),
                             train.labels[static_cast<std::size_t>(r)]);
      }
      hold_loss /= static_cast<double>(hold_rows.size());
      model.holdout_logloss.push_back(hold_loss);
      if (hold_loss < best_holdout - 1e-12) {
        best_holdout = hold_loss;
        model.best_round = round + 1;
        rounds_since_best = 0;
      } else if (++rounds_since_best >= params.early_stop_rounds) {
        break;
      }
    } else {
      model.best_round = round + 1;
    }
  }

  // Prediction stops at the best round; later trees carry no information
  // worth serializing.
  model.trees.resize(static_cast<std::size_t>(model.best_round));
  return model;
}

double boost_margin(const BoostModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  double margin = m.base_score;
  for (const auto& tree : m.trees) margin += tree_value(tree, x);
  return margin;
}

double boost_proba(const BoostModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  return 1.0 - sigmoid(boost_margin(m, x));
}

std::vector<double> boost_proba_all(const BoostModel& m, const Dataset& d, int threads) {
  if (d.cols() != static_cast<Eigen::Index>(m.feature_names.size())) {
    throw InputError("feature width does not match the trained model");
  }
  std::vector<double> out(static_cast<std::size_t>(d.rows()));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    out[i] = boost_proba(m, d.features.row(static_cast<Eigen::Index>(i)));
  });
  return out;
}

Eigen::VectorXd gain_importance(const BoostModel& m) {
  const auto d = static_cast<Eigen::Index>(m.feature_names.size());
  Eigen::VectorXd importance = Eigen::VectorXd::Zero(d);
  for (const auto& tree : m.trees) {
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf()) importance(node.feature) += node.gain;
    }
  }
  return importance;
}

}  // namespace ethfraud
