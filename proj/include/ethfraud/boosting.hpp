#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ethfraud/dataset.hpp"

namespace ethfraud {

struct XGBParams {
  int max_depth = 6;
  double colsample = 1.0;         // fraction of features sampled per tree
  double min_child_weight = 1.0;  // minimum hessian sum per child
  double eta = 0.1;
  double lambda = 1.0;     // L2 leaf penalty
  double gamma_pen = 0.0;  // per-leaf penalty subtracted from every gain
  int n_rounds = 2000;
  int early_stop_rounds = 100;  // 0 disables early stopping
  double cutoff = 0.5;
  std::uint64_t seed = 0;
};

// Regression tree node; leaves carry the eta-scaled weight added to margins.
struct XgbNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf only
  double gain = 0.0;   // internal only
  double cover = 0.0;  // hessian sum of the rows reaching the node

  bool is_leaf() const { return feature < 0; }
};

struct XgbTree {
  std::vector<XgbNode> nodes;
};

struct BoostModel {
  XGBParams params;
  std::vector<std::string> feature_names;
  double base_score = 0.0;  // initial margin: log-odds of the fraud rate
  int best_round = 0;       // trees kept after early stopping
  std::vector<XgbTree> trees;

  // Per-round diagnostics; kept in memory, not serialized.
  std::vector<double> train_logloss;
  std::vector<double> holdout_logloss;
};

// Logistic loss derivatives at a margin, fraud coded 1.
// g = sigmoid(margin) - y, h = p(1-p) clamped below at 1e-16.
std::pair<double, double> logistic_grad_hess(int y, double margin);

// Second-order split score with the parent term subtracted:
//   1/2 [ GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l) ] - gamma.
double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda,
                  double gamma_pen);

// Minimizer of the per-leaf quadratic objective: -G/(H+lambda).
double leaf_weight(double g_sum, double h_sum, double lambda);

// Second-order boosting with greedy exact splits; early stopping watches
// log-loss on a stratified 10% holdout carved from the training set.
BoostModel train_boost(const Dataset& train, const XGBParams& params);

double boost_margin(const BoostModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x);

// P(non-fraud) = 1 - sigmoid(margin).
double boost_proba(const BoostModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x);

std::vector<double> boost_proba_all(const BoostModel& m, const Dataset& d, int threads = 0);

// Per-feature sum of split gains over the kept trees.
Eigen::VectorXd gain_importance(const BoostModel& m);

}  // namespace ethfraud
