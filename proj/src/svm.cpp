#include "ethfraud/svm.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <unordered_map>

#include "ethfraud/errors.hpp"
#include "ethfraud/parallel.hpp"
#include "ethfraud/rng.hpp"

namespace ethfraud {

double rbf_kernel(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                  const Eigen::Ref<const Eigen::RowVectorXd>& z, double gamma) {
  if (x.size() != z.size()) throw InputError("kernel arguments differ in dimension");
  if (!(gamma > 0.0)) throw InputError("gamma must be positive");
  return std::exp(-gamma * (x - z).squaredNorm());
}

namespace {

// LRU cache of kernel matrix rows; bounds memory on large training sets.
class KernelCache {
 public:
  KernelCache(const Eigen::MatrixXd& X, double gamma, int capacity)
      : X_(X), gamma_(gamma), capacity_(std::max(capacity, 2)) {}

  const Eigen::VectorXd& row(int i) {
    auto it = index_.find(i);
    if (it != index_.end()) {
      entries_.splice(entries_.begin(), entries_, it->second);
      return entries_.front().second;
    }
    if (static_cast<int>(entries_.size()) >= capacity_) {
      index_.erase(entries_.back().first);
      entries_.pop_back();
    }
    Eigen::VectorXd k =
        (-gamma_ * (X_.rowwise() - X_.row(i)).rowwise().squaredNorm()).array().exp();
    entries_.emplace_front(i, std::move(k));
    index_[i] = entries_.begin();
    return entries_.front().second;
  }

 private:
  const Eigen::MatrixXd& X_;
  double gamma_;
  int capacity_;
  std::list<std::pair<int, Eigen::VectorXd>> entries_;
  std::unordered_map<int, std::list<std::pair<int, Eigen::VectorXd>>::iterator> index_;
};

struct SmoState {
  const Eigen::MatrixXd& X;
  const std::vector<double>& y;  // +1 fraud / -1 non-fraud
  const std::vector<double>& box;
  double tol;
  KernelCache& cache;
  Eigen::VectorXd alpha;
  Eigen::VectorXd error;  // f(x_i) - y_i, kept exact under updates
  double b = 0.0;
  double step_eps;
  std::function<void(double)> observer;

  int n() const { return static_cast<int>(y.size()); }

  bool is_free(int i) const { return alpha(i) > 0.0 && alpha(i) < box[static_cast<std::size_t>(i)]; }

  double dual_objective() const {
    double q = alpha.sum();
    for (int i = 0; i < n(); ++i) {
      if (alpha(i) == 0.0) continue;
      const Eigen::VectorXd& ki =
          (-1.0 * (X.rowwise() - X.row(i)).rowwise().squaredNorm()).array().exp();
      (void)ki;
      break;
    }
    return q;
  }
};

}  // namespace

namespace {

// Analytic two-variable update; returns true when alpha actually moved.
bool take_step(SmoState& s, int i1, int i2, double gamma) {
  if (i1 == i2) return false;
  const double alph1 = s.alpha(i1);
  const double alph2 = s.alpha(i2);
  const double y1 = s.y[static_cast<std::size_t>(i1)];
  const double y2 = s.y[static_cast<std::size_t>(i2)];
  const double c1 = s.box[static_cast<std::size_t>(i1)];
  const double c2 = s.box[static_cast<std::size_t>(i2)];
  const double e1 = s.error(i1);
  const double e2 = s.error(i2);
  const double sgn = y1 * y2;

  double lo, hi;
  if (sgn < 0) {
    lo = std::max(0.0, alph2 - alph1);
    hi = std::min(c2, c1 + alph2 - alph1);
  } else {
    lo = std::max(0.0, alph1 + alph2 - c1);
    hi = std::min(c2, alph1 + alph2);
  }
  if (lo >= hi) return false;

  const Eigen::VectorXd& k1 = s.cache.row(i1);
  const Eigen::VectorXd& k2 = s.cache.row(i2);
  const double k11 = k1(i1);
  const double k12 = k1(i2);
  const double k22 = k2(i2);
  const double eta = k11 + k22 - 2.0 * k12;
  if (!(eta > 0.0)) return false;  // duplicate points under an RBF kernel

  double a2 = alph2 + y2 * (e1 - e2) / eta;
  a2 = std::min(hi, std::max(lo, a2));
  if (std::abs(a2 - alph2) < s.step_eps * (a2 + alph2 + s.step_eps)) return false;

  double a1 = alph1 + sgn * (alph2 - a2);
  a1 = std::min(c1, std::max(0.0, a1));  // numeric safety only

  const double d1 = a1 - alph1;
  const double d2 = a2 - alph2;
  const double b1 = s.b - e1 - y1 * d1 * k11 - y2 * d2 * k12;
  const double b2 = s.b - e2 - y1 * d1 * k12 - y2 * d2 * k22;
  double b_new;
  if (a1 > 0.0 && a1 < c1) {
    b_new = b1;
  } else if (a2 > 0.0 && a2 < c2) {
    b_new = b2;
  } else {
    b_new = 0.5 * (b1 + b2);
  }
  const double db = b_new - s.b;

  s.alpha(i1) = a1;
  s.alpha(i2) = a2;
  s.b = b_new;
  s.error += y1 * d1 * k1 + y2 * d2 * k2;
  s.error.array() += db;

  if (s.observer) {
    // Q(alpha) = sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
    double q = s.alpha.sum();
    double quad = 0.0;
    for (int i = 0; i < s.n(); ++i) {
      if (s.alpha(i) == 0.0) continue;
      const Eigen::VectorXd& ki = s.cache.row(i);
      for (int j = 0; j < s.n(); ++j) {
        if (s.alpha(j) == 0.0) continue;
        quad += s.alpha(i) * s.alpha(j) * s.y[static_cast<std::size_t>(i)] *
                s.y[static_cast<std::size_t>(j)] * ki(j);
      }
    }
    s.observer(q - 0.5 * quad);
  }
  (void)gamma;
  return true;
}

bool examine(SmoState& s, int i2, Rng& rng, std::int64_t& iterations) {
  ++iterations;
  const double y2 = s.y[static_cast<std::size_t>(i2)];
  const double alph2 = s.alpha(i2);
  const double c2 = s.box[static_cast<std::size_t>(i2)];
  const double r2 = s.error(i2) * y2;

  const bool violates = (r2 < -s.tol && alph2 < c2) || (r2 > s.tol && alph2 > 0.0);
  if (!violates) return false;

  // First choice: the free point with the largest |E1 - E2|.
  int best = -1;
  double best_gap = -1.0;
  for (int i = 0; i < s.n(); ++i) {
    if (!s.is_free(i)) continue;
    const double gap = std::abs(s.error(i) - s.error(i2));
    if (gap > best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  if (best >= 0 && take_step(s, best, i2, 0.0)) return true;

  // Second: all free points from a random start.
  const int n = s.n();
  int start = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
  for (int k = 0; k < n; ++k) {
    const int i = (start + k) % n;
    if (s.is_free(i) && take_step(s, i, i2, 0.0)) return true;
  }
  // Last resort: everything.
  start = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
  for (int k = 0; k < n; ++k) {
    const int i = (start + k) % n;
    if (take_step(s, i, i2, 0.0)) return true;
  }
  return false;
}

}  // namespace

SVMModel train_svm(const Dataset& train, const SVMParams& params, const Standardizer& standardizer,
                   const SmoOptions& options) {
  if (!(params.cost > 0.0)) throw InputError("cost must be positive");
  if (!(params.gamma > 0.0)) throw InputError("gamma must be positive");
  if (!(params.tolerance > 0.0)) throw InputError("tolerance must be positive");
  const std::int64_t n_fraud = train.count(kFraud);
  const std::int64_t n_nonfraud = train.count(kNonFraud);
  if (n_fraud == 0 || n_nonfraud == 0) throw TrainingError("SVM training requires both classes");

  const int n = static_cast<int>(train.rows());
  SVMParams resolved = params;
  if (resolved.class_weight_fraud <= 0.0) {
    resolved.class_weight_fraud =
        std::max(1.0, static_cast<double>(n_nonfraud) / static_cast<double>(n_fraud));
  }

  std::vector<double> y(static_cast<std::size_t>(n));
  std::vector<double> box(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const bool fraud = train.labels[static_cast<std::size_t>(i)] == kFraud;
    y[static_cast<std::size_t>(i)] = fraud ? 1.0 : -1.0;
    box[static_cast<std::size_t>(i)] =
        fraud ? resolved.cost * resolved.class_weight_fraud : resolved.cost;
  }

  KernelCache cache(train.features, resolved.gamma, options.kernel_cache_rows);
  SmoState state{train.features, y,
                 box,            resolved.tolerance,
                 cache,          Eigen::VectorXd::Zero(n),
                 Eigen::VectorXd(n), 0.0,
                 // Step acceptance threshold well below the KKT tolerance.
                 resolved.tolerance * 1e-2, options.objective_observer};
  for (int i = 0; i < n; ++i) state.error(i) = -y[static_cast<std::size_t>(i)];

  const std::int64_t cap = options.max_iterations > 0
                               ? options.max_iterations
                               : std::max<std::int64_t>(2'000'000, 20'000LL * n);
  Rng rng(derive_stream(resolved.seed, 0x50f7));

  int unchanged_full_sweeps = 0;
  bool examine_all = true;
  std::int64_t iterations = 0;

  while (unchanged_full_sweeps < params.max_passes) {
    int changed = 0;
    if (examine_all) {
      for (int i = 0; i < n; ++i) changed += examine(state, i, rng, iterations);
      if (changed == 0) {
        ++unchanged_full_sweeps;
      } else {
        unchanged_full_sweeps = 0;
        examine_all = false;
      }
    } else {
      for (int i = 0; i < n; ++i) {
        if (state.is_free(i)) changed += examine(state, i, rng, iterations);
      }
      if (changed == 0) examine_all = true;
    }
    if (iterations > cap) {
      throw TrainingError("SMO did not converge within the iteration cap");
    }
  }

  SVMModel model;
  model.params = resolved;
  model.feature_names = train.feature_names;
  model.standardizer = standardizer;
  model.bias = state.b;

  std::vector<int> sv;
  for (int i = 0; i < n; ++i) {
    if (state.alpha(i) > 0.0) sv.push_back(i);
  }
  model.support_x.resize(static_cast<Eigen::Index>(sv.size()), train.cols());
  model.support_coef.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    model.support_x.row(static_cast<Eigen::Index>(k)) = train.features.row(sv[k]);
    model.support_coef(static_cast<Eigen::Index>(k)) =
        state.alpha(sv[k]) * y[static_cast<std::size_t>(sv[k])];
  }
  return model;
}

SVMModel train_svm_raw(const Dataset& raw_train, const SVMParams& params,
                       const SmoOptions& options) {
  const Standardizer s = fit_standardizer(raw_train);
  return train_svm(apply_standardizer(s, raw_train), params, s, options);
}

double decision_function(const SVMModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (m.support_x.rows() == 0) return m.bias;
  const Eigen::VectorXd k =
      (-m.params.gamma * (m.support_x.rowwise() - x).rowwise().squaredNorm()).array().exp();
  return m.support_coef.dot(k) + m.bias;
}

std::vector<double> svm_decision_values(const SVMModel& m, const Dataset& standardized,
                                        int threads) {
  std::vector<double> out(static_cast<std::size_t>(standardized.rows()));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    out[i] = decision_function(m, standardized.features.row(static_cast<Eigen::Index>(i)));
  });
  return out;
}

std::vector<int> svm_predict_raw(const SVMModel& m, const Dataset& raw, int threads) {
  const Dataset std_data = apply_standardizer(m.standardizer, raw);
  const auto decisions = svm_decision_values(m, std_data, threads);
  std::vector<int> labels(decisions.size());
  for (std::size_t i = 0; i < decisions.size(); ++i) labels[i] = classify_svm(decisions[i]);
  return labels;
}

}  // namespace ethfraud
