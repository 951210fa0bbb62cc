#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ethfraud/transaction.hpp"

namespace ethfraud {

// Labeled feature matrix; one row per account. Immutable by convention after
// construction, so it is safe to share across threads.
struct Dataset {
  std::vector<std::string> addresses;
  std::vector<int> labels;  // kFraud / kNonFraud
  Eigen::MatrixXd features;
  std::vector<std::string> feature_names;

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index cols() const { return features.cols(); }
  std::int64_t count(int label) const;

  Dataset select_rows(const std::vector<int>& idx) const;
  Dataset drop_columns(const std::vector<std::string>& names) const;

  // Shape consistency, unique addresses, finite values.
  void validate() const;
};

// Per-class proportions preserved to within one sample; deterministic in seed.
// Row order inside each part follows the original dataset order.
std::pair<Dataset, Dataset> stratified_split(const Dataset& d, double train_fraction,
                                             std::uint64_t seed);

struct Fold {
  std::vector<int> train_idx;
  std::vector<int> holdout_idx;
};

// k stratified folds: holdouts are disjoint, cover the dataset, and their
// sizes differ by at most one.
std::vector<Fold> kfold(const Dataset& d, int k, std::uint64_t seed);

// Column-wise affine transform fitted on training data (population std).
// Constant columns get std 1 so the transform stays total.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  std::vector<int> constant;  // 1 where the fitted column was constant
  std::int64_t fitted_rows = 0;
};

Standardizer fit_standardizer(const Dataset& train);
Dataset apply_standardizer(const Standardizer& s, const Dataset& d);

// Feature table CSV: address,label,IT,...,DUR with shortest-round-trip floats.
Dataset load_feature_table(const std::string& path);
void write_feature_table(const std::string& path, const Dataset& d);

}  // namespace ethfraud
