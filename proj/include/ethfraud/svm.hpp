#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ethfraud/dataset.hpp"

namespace ethfraud {

struct SVMParams {
  double cost = 1.0;   // C
  double gamma = 0.5;  // RBF width
  // Multiplier on C for fraud rows; <= 0 resolves to n_nonfraud / n_fraud of
  // the training set at fit time.
  double class_weight_fraud = 0.0;
  double tolerance = 1e-3;
  int max_passes = 10;  // unchanged full sweeps before declaring convergence
  std::uint64_t seed = 0;
};

// Kernel expansion f(x) = sum_i coef_i k(sv_i, x) + bias with coef = alpha*y,
// fraud coded +1. Support rows live in standardized space; the fitted
// standardizer travels with the model.
struct SVMModel {
  SVMParams params;  // class_weight_fraud holds the resolved value
  std::vector<std::string> feature_names;
  Standardizer standardizer;
  Eigen::MatrixXd support_x;
  Eigen::VectorXd support_coef;
  double bias = 0.0;
};

double rbf_kernel(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                  const Eigen::Ref<const Eigen::RowVectorXd>& z, double gamma);

struct SmoOptions {
  // Hard cap on optimization steps before giving up (0 = a size-derived cap).
  std::int64_t max_iterations = 0;
  // Kernel rows cached at once.
  int kernel_cache_rows = 1024;
  // Called with the dual objective after each accepted step; test hook,
  // quadratic in n, leave empty outside small problems.
  std::function<void(double)> objective_observer;
};

// SMO on the dual with per-class box constraints 0 <= alpha_i <= C_i.
// `train` must already be standardized with `standardizer`.
SVMModel train_svm(const Dataset& train, const SVMParams& params, const Standardizer& standardizer,
                   const SmoOptions& options = {});

// Convenience wrapper: fits a standardizer on raw features, then trains.
SVMModel train_svm_raw(const Dataset& raw_train, const SVMParams& params,
                       const SmoOptions& options = {});

// x must be standardized with the model's standardizer.
double decision_function(const SVMModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x);

// Fraud iff f >= 0 (fraud coded +1; ties go to fraud).
inline int classify_svm(double f) { return f >= 0.0 ? kFraud : kNonFraud; }

// Decision values for an already-standardized dataset.
std::vector<double> svm_decision_values(const SVMModel& m, const Dataset& standardized,
                                        int threads = 0);

// Labels for raw features; applies the model's standardizer internally.
std::vector<int> svm_predict_raw(const SVMModel& m, const Dataset& raw, int threads = 0);

}  // namespace ethfraud
