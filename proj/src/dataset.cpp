#include "ethfraud/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include "ethfraud/csv.hpp"
#include "ethfraud/errors.hpp"
#include "ethfraud/rng.hpp"

namespace ethfraud {

std::int64_t Dataset::count(int label) const {
  std::int64_t n = 0;
  for (const int l : labels) {
    if (l == label) ++n;
  }
  return n;
}

Dataset Dataset::select_rows(const std::vector<int>& idx) const {
  Dataset out;
  out.feature_names = feature_names;
  out.addresses.reserve(idx.size());
  out.labels.reserve(idx.size());
  out.features.resize(static_cast<Eigen::Index>(idx.size()), cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const int r = idx[i];
    out.addresses.push_back(addresses[static_cast<std::size_t>(r)]);
    out.labels.push_back(labels[static_cast<std::size_t>(r)]);
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(r);
  }
  return out;
}

Dataset Dataset::drop_columns(const std::vector<std::string>& names) const {
  const std::set<std::string> drop(names.begin(), names.end());
  for (const auto& n : names) {
    if (std::find(feature_names.begin(), feature_names.end(), n) == feature_names.end()) {
      throw InputError("cannot drop unknown feature: " + n);
    }
  }
  Dataset out;
  out.addresses = addresses;
  out.labels = labels;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < cols(); ++j) {
    if (drop.count(feature_names[static_cast<std::size_t>(j)]) == 0) keep.push_back(j);
  }
  out.features.resize(rows(), static_cast<Eigen::Index>(keep.size()));
  out.feature_names.reserve(keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.features.col(static_cast<Eigen::Index>(j)) = features.col(keep[j]);
    out.feature_names.push_back(feature_names[static_cast<std::size_t>(keep[j])]);
  }
  return out;
}

void Dataset::validate() const {
  if (static_cast<Eigen::Index>(addresses.size()) != rows() ||
      static_cast<Eigen::Index>(labels.size()) != rows()) {
    throw InputError("dataset row bookkeeping out of sync");
  }
  if (static_cast<Eigen::Index>(feature_names.size()) != cols()) {
    throw InputError("dataset feature name count does not match matrix width");
  }
  std::unordered_set<std::string> seen;
  for (const auto& a : addresses) {
    if (!seen.insert(a).second) throw InputError("duplicate address in dataset: " + a);
  }
  if (!features.allFinite()) throw InputError("dataset contains non-finite values");
  for (const int l : labels) {
    if (l != kFraud && l != kNonFraud) throw InputError("dataset contains an unknown label");
  }
}

namespace {

std::vector<std::vector<int>> indices_by_class(const Dataset& d) {
  std::vector<std::vector<int>> by_class(2);
  for (int i = 0; i < static_cast<int>(d.labels.size()); ++i) {
    by_class[static_cast<std::size_t>(d.labels[static_cast<std::size_t>(i)])].push_back(i);
  }
  return by_class;
}

}  // namespace

std::pair<Dataset, Dataset> stratified_split(const Dataset& d, double train_fraction,
                                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError("train fraction must lie in (0,1)");
  }
  auto by_class = indices_by_class(d);
  if (by_class[0].empty() || by_class[1].empty()) {
    throw TrainingError("stratified split requires both classes present");
  }

  std::vector<int> train_idx, val_idx;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& idx = by_class[c];
    Rng rng(derive_stream(seed, 0x5911 + c));
    rng.shuffle(idx);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < n_train ? train_idx : val_idx).push_back(idx[i]);
    }
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  return {d.select_rows(train_idx), d.select_rows(val_idx)};
}

std::vector<Fold> kfold(const Dataset& d, int k, std::uint64_t seed) {
  if (k < 2) throw InputError("k must be at least 2");
  auto by_class = indices_by_class(d);
  for (const auto& idx : by_class) {
    if (static_cast<int>(idx.size()) < k) {
      throw InputError("k exceeds the row count of a class (" + std::to_string(idx.size()) +
                       " < " + std::to_string(k) + ")");
    }
  }

  std::vector<std::vector<int>> holdouts(static_cast<std::size_t>(k));
  // Rotating the fold offset per class keeps overall fold sizes within one of
  // each other even when both classes leave remainders.
  std::size_t offset = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& idx = by_class[c];
    Rng rng(derive_stream(seed, 0xf01d + c));
    rng.shuffle(idx);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      holdouts[(j + offset) % static_cast<std::size_t>(k)].push_back(idx[j]);
    }
    offset += idx.size() % static_cast<std::size_t>(k);
  }

  std::vector<Fold> folds(static_cast<std::size_t>(k));
  for (std::size_t f = 0; f < holdouts.size(); ++f) {
    std::sort(holdouts[f].begin(), holdouts[f].end());
    folds[f].holdout_idx = holdouts[f];
    for (std::size_t g = 0; g < holdouts.size(); ++g) {
      if (g == f) continue;
      folds[f].train_idx.insert(folds[f].train_idx.end(), holdouts[g].begin(), holdouts[g].end());
    }
    std::sort(folds[f].train_idx.begin(), folds[f].train_idx.end());
  }
  return folds;
}

Standardizer fit_standardizer(const Dataset& train) {
  if (train.rows() == 0) throw InputError("cannot fit a standardizer on an empty dataset");
  Standardizer s;
  s.fitted_rows = train.rows();
  s.mean = train.features.colwise().mean();
  const Eigen::MatrixXd centered = train.features.rowwise() - s.mean.transpose();
  s.std = (centered.array().square().colwise().sum() / static_cast<double>(train.rows()))
              .sqrt()
              .matrix()
              .transpose();
  s.constant.assign(static_cast<std::size_t>(train.cols()), 0);
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    if (!(s.std(j) > 1e-12 * (1.0 + std::abs(s.mean(j))))) {
      s.std(j) = 1.0;
      s.constant[static_cast<std::size_t>(j)] = 1;
    }
  }
  return s;
}

Dataset apply_standardizer(const Standardizer& s, const Dataset& d) {
  if (s.mean.size() != d.cols()) {
    throw InputError("standardizer width does not match dataset width");
  }
  Dataset out = d;
  out.features = (d.features.rowwise() - s.mean.transpose()).array().rowwise() /
                 s.std.transpose().array();
  return out;
}

Dataset load_feature_table(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw ParseError("cannot open file: " + path);
  std::string header;
  std::getline(probe, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  probe.close();

  const auto cols = split_csv_line(header);
  if (cols.size() < 3 || cols[0] != "address" || cols[1] != "label") {
    throw ParseError(path + ": line 1: feature table header must start with address,label");
  }

  const auto rows = read_csv_rows(path, header);
  Dataset d;
  d.feature_names.assign(cols.begin() + 2, cols.end());
  d.addresses.reserve(rows.size());
  d.labels.reserve(rows.size());
  d.features.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(d.feature_names.size()));

  std::size_t line_no = 1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ++line_no;
    const std::string where = path + ": line " + std::to_string(line_no);
    const auto& f = rows[i];
    const std::string address = to_lower_ascii(f[0]);
    if (!is_address(address)) throw ParseError(where + ": malformed address '" + f[0] + "'");
    d.addresses.push_back(address);
    if (f[1] == "fraud") {
      d.labels.push_back(kFraud);
    } else if (f[1] == "nonfraud") {
      d.labels.push_back(kNonFraud);
    } else {
      throw ParseError(where + ": label must be fraud or nonfraud, got '" + f[1] + "'");
    }
    for (std::size_t j = 2; j < f.size(); ++j) {
      try {
        std::size_t used = 0;
        const double v = std::stod(f[j], &used);
        if (used != f[j].size() || !std::isfinite(v)) throw std::invalid_argument("trailing junk");
        d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - 2)) = v;
      } catch (const std::exception&) {
        throw ParseError(where + ": bad numeric value '" + f[j] + "'");
      }
    }
  }
  d.validate();
  return d;
}

void write_feature_table(const std::string& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << "address,label";
  for (const auto& n : d.feature_names) out << ',' << n;
  out << '\n';
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    out << d.addresses[static_cast<std::size_t>(i)] << ','
        << (d.labels[static_cast<std::size_t>(i)] == kFraud ? "fraud" : "nonfraud");
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      out << ',' << format_double(d.features(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

}  // namespace ethfraud
