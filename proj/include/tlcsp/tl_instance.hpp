#pragma once

// Instance-based transfer: source epochs are reweighted by kernel mean
// matching against the target calibration epochs, then pooled with the
// target epochs (weight 1) to train CSP and LDA.
//
// KMM solves
//   min_beta  1/2 beta^T K beta - (n/m) kappa^T beta
//   s.t.      0 <= beta_j <= b,   |sum_j beta_j - n| <= n * eps
// with a Gaussian kernel over the representation below.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "tlcsp/pipeline.hpp"

namespace tlcsp {

struct KmmConfig {
  double b = 1000.0;
  /// Defaults to (sqrt(n) - 1) / sqrt(n).
  std::optional<double> epsilon;
  /// Defaults to the median pairwise distance over source and target.
  std::optional<double> bandwidth;
  int max_iterations = 10000;
  /// Stop once an accepted step improves the objective by less than
  /// tolerance * max(1, |objective|).
  double tolerance = 1e-12;
  bool record_history = false;

  double epsilon_for(std::size_t n) const {
    if (epsilon) return *epsilon;
    const double root = std::sqrt(static_cast<double>(n));
    return (root - 1.0) / root;
  }
};

struct InstanceWeights {
  Vector beta;
  double objective = 0.0;
  double bandwidth = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> history;
};

/// Upper triangle of a normalized covariance with off-diagonals scaled by
/// sqrt(2), so Euclidean geometry matches the Frobenius one.
inline Vector kmm_representation(const Matrix& normalized_cov) {
  const Index c = normalized_cov.rows();
  Vector rep(c * (c + 1) / 2);
  Index k = 0;
  for (Index i = 0; i < c; ++i) {
    for (Index j = i; j < c; ++j) {
      rep(k++) = i == j ? normalized_cov(i, j) : std::numbers::sqrt2 * normalized_cov(i, j);
    }
  }
  return rep;
}

inline Vector kmm_representation(const Epoch& epoch) {
  return kmm_representation(epoch_covariance(epoch, true).matrix());
}

/// One representation per row.
inline Matrix kmm_representations(const CovarianceSet& set) {
  const Index c = set.channels();
  Matrix out(static_cast<Index>(set.size()), c * (c + 1) / 2);
  for (std::size_t i = 0; i < set.size(); ++i) {
    out.row(static_cast<Index>(i)) = kmm_representation(set.covs[i]).transpose();
  }
  return out;
}

namespace detail {

inline Matrix squared_distances(const Matrix& a, const Matrix& b) {
  Matrix d(a.rows(), b.rows());
  for (Index j = 0; j < b.rows(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  }
  return d;
}

inline Matrix squared_distances(const Matrix& a) {
  Matrix d = Matrix::Zero(a.rows(), a.rows());
  for (Index j = 0; j < a.rows(); ++j) {
    for (Index i = 0; i < j; ++i) {
      d(i, j) = (a.row(i) - a.row(j)).squaredNorm();
      d(j, i) = d(i, j);
    }
  }
  return d;
}

/// Median of sqrt over the given squared distances; 1 when the median is 0.
inline double median_of_sqrt(std::vector<double>& sq) {
  if (sq.empty()) throw Error(ErrorKind::insufficient_data, "median needs at least one pair");
  const std::size_t mid = sq.size() / 2;
  std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(mid), sq.end());
  double median = std::sqrt(sq[mid]);
  if (sq.size() % 2 == 0) {
    const double below = *std::max_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + std::sqrt(below));
  }
  return median > 0.0 ? median : 1.0;
}

/// Median pairwise distance over source ∪ target given the three blocks of
/// squared distances.
inline double median_bandwidth(const Matrix& d_ss, const Matrix& d_st, const Matrix& d_tt) {
  std::vector<double> sq;
  const Index n = d_ss.rows();
  const Index m = d_tt.rows();
  sq.reserve(static_cast<std::size_t>(n * (n - 1) / 2 + n * m + m * (m - 1) / 2));
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) sq.push_back(d_ss(i, j));
  }
  for (Index j = 0; j < d_st.cols(); ++j) {
    for (Index i = 0; i < d_st.rows(); ++i) sq.push_back(d_st(i, j));
  }
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < j; ++i) sq.push_back(d_tt(i, j));
  }
  return median_of_sqrt(sq);
}

/// Projection onto { 0 <= x <= b, lo <= sum x <= hi }: clamp, and if the sum
/// leaves the band, find the shift tau with sum clamp(v - tau, 0, b) equal to
/// the violated bound by bisection.
inline Vector project_box_band(const Vector& v, double b, double lo, double hi) {
  Vector x = v.cwiseMax(0.0).cwiseMin(b);
  const double s = x.sum();
  if (s >= lo && s <= hi) return x;
  const double target = s > hi ? hi : lo;
  double tau_lo = v.minCoeff() - b;
  double tau_hi = v.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double tau = 0.5 * (tau_lo + tau_hi);
    if (tau == tau_lo || tau == tau_hi) break;
    const double g = (v.array() - tau).cwiseMax(0.0).cwiseMin(b).sum();
    if (g > target) {
      tau_lo = tau;
    } else {
      tau_hi = tau;
    }
  }
  // Of the two bracketing shifts pick the one whose sum lies inside the band.
  Vector a = (v.array() - tau_lo).cwiseMax(0.0).cwiseMin(b);
  Vector c = (v.array() - tau_hi).cwiseMax(0.0).cwiseMin(b);
  const double sa = a.sum();
  if (sa >= lo && sa <= hi) return a;
  return c;
}

inline double kmm_objective(const Vector& beta, const Vector& k_beta, const Vector& linear) {
  return 0.5 * beta.dot(k_beta) - linear.dot(beta);
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration, padded
/// so the step 1/L stays a descent step.
inline double top_eigenvalue(const Matrix& k) {
  Vector v = Vector::Ones(k.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vector w = k * v;
    const double next = w.norm();
    if (!(next > 0.0)) return 0.0;
    v = w / next;
    if (std::abs(next - lambda) <= 1e-10 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return 1.05 * lambda;
}

/// Monotone accelerated projected gradient (FISTA with function-value
/// restart). Every recorded objective is <= its predecessor.
inline InstanceWeights kmm_solve(const Matrix& d_ss, const Matrix& d_st, double sigma,
                                 const KmmConfig& cfg) {
  const Index n = d_ss.rows();
  const Index m = d_st.cols();
  const double eps = cfg.epsilon_for(static_cast<std::size_t>(n));
  if (!(cfg.b > 0.0) || !(eps >= 0.0)) {
    throw Error(ErrorKind::config, "KMM needs b > 0 and epsilon >= 0");
  }
  const double lo = static_cast<double>(n) * (1.0 - eps);
  const double hi = static_cast<double>(n) * (1.0 + eps);
  if (lo > static_cast<double>(n) * cfg.b) {
    throw Error(ErrorKind::config, "KMM constraints are infeasible: n(1 - eps) > n b");
  }
  const double gamma = 1.0 / (2.0 * sigma * sigma);
  Matrix k = (-gamma * d_ss.array()).exp().matrix();
  const double ridge = 1e-8 * k.diagonal().mean();
  k.diagonal().array() += ridge;
  const Vector kappa = (-gamma * d_st.array()).exp().matrix().rowwise().sum();
  const Vector linear = (static_cast<double>(n) / static_cast<double>(m)) * kappa;

  InstanceWeights out;
  out.bandwidth = sigma;
  Vector x = project_box_band(Vector::Ones(n), cfg.b, lo, hi);
  Vector kx = k * x;
  double fx = kmm_objective(x, kx, linear);
  if (cfg.record_history) out.history.push_back(fx);

  const double lipschitz = top_eigenvalue(k);
  if (!(lipschitz > 0.0)) {
    out.beta = x;
    out.objective = fx;
    out.converged = true;
    return out;
  }
  const double step = 1.0 / lipschitz;

  Vector y = x;
  Vector ky = kx;
  double t = 1.0;
  bool restarted = false;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    out.iterations = it;
    Vector z = project_box_band(y - step * (ky - linear), cfg.b, lo, hi);
    Vector kz = k * z;
    const double fz = kmm_objective(z, kz, linear);
    if (fz <= fx) {
      const double improvement = fx - fz;
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double momentum = (t - 1.0) / t_next;
      y = z + momentum * (z - x);
      ky = kz + momentum * (kz - kx);
      x = std::move(z);
      kx = std::move(kz);
      fx = fz;
      t = t_next;
      restarted = false;
      if (cfg.record_history) out.history.push_back(fx);
      if (improvement < cfg.tolerance * std::max(1.0, std::abs(fx))) {
        out.converged = true;
        break;
      }
    } else {
      if (cfg.record_history) out.history.push_back(fx);
      // A plain gradient step from x that fails to descend means x is
      // stationary to working precision.
      if (restarted) {
        out.converged = true;
        break;
      }
      y = x;
      ky = kx;
      t = 1.0;
      restarted = true;
    }
  }
  out.beta = std::move(x);
  out.objective = fx;
  return out;
}

}  // namespace detail

/// Median pairwise Euclidean distance between the rows of `reps`; 1 if that
/// median is 0.
inline double median_bandwidth(const Matrix& reps) {
  if (reps.rows() < 2) {
    throw Error(ErrorKind::insufficient_data, "median bandwidth needs at least two vectors");
  }
  const Matrix d = detail::squared_distances(reps);
  std::vector<double> sq;
  for (Index j = 0; j < d.cols(); ++j) {
    for (Index i = 0; i < j; ++i) sq.push_back(d(i, j));
  }
  return detail::median_of_sqrt(sq);
}

/// Objective of `beta` under the same kernel problem kmm_weights solves.
inline double kmm_objective(const Matrix& source_reps, const Matrix& target_reps, double sigma,
                            const Vector& beta) {
  const double gamma = 1.0 / (2.0 * sigma * sigma);
  Matrix k = (-gamma * detail::squared_distances(source_reps).array()).exp().matrix();
  k.diagonal().array() += 1e-8 * k.diagonal().mean();
  const Vector kappa =
      (-gamma * detail::squared_distances(source_reps, target_reps).array()).exp().matrix().rowwise().sum();
  const Vector linear =
      (static_cast<double>(source_reps.rows()) / static_cast<double>(target_reps.rows())) * kappa;
  return detail::kmm_objective(beta, k * beta, linear);
}

/// Source reps are rows (n), target reps are rows (m).
inline InstanceWeights kmm_weights(const Matrix& source_reps, const Matrix& target_reps,
                                   const KmmConfig& cfg = {}) {
  if (source_reps.rows() < 1 || target_reps.rows() < 1) {
    throw Error(ErrorKind::insufficient_data, "KMM needs at least one source and one target sample");
  }
  if (source_reps.cols() != target_reps.cols()) {
    throw Error(ErrorKind::dimension, "source and target representations differ in length");
  }
  const Matrix d_ss = detail::squared_distances(source_reps);
  const Matrix d_st = detail::squared_distances(source_reps, target_reps);
  double sigma = 0.0;
  if (cfg.bandwidth) {
    sigma = *cfg.bandwidth;
    if (!(sigma > 0.0)) throw Error(ErrorKind::config, "KMM bandwidth must be positive");
  } else {
    sigma = detail::median_bandwidth(d_ss, d_st, detail::squared_distances(target_reps));
  }
  return detail::kmm_solve(d_ss, d_st, sigma, cfg);
}

/// Target epochs weigh 1, source epoch j weighs beta_j; the same weights feed
/// both class means and LDA.
inline CspLdaModel weighted_fused_training(const CovarianceSet& target_labeled,
                                           const CovarianceSet& source_labeled,
                                           const Vector& beta, int filters_per_class) {
  if (static_cast<std::size_t>(beta.size()) != source_labeled.size()) {
    throw Error(ErrorKind::dimension, "instance weight count does not match source epoch count");
  }
  CovarianceSet fused = target_labeled;
  fused.append(source_labeled);
  std::vector<double> weights(target_labeled.size(), 1.0);
  weights.insert(weights.end(), beta.data(), beta.data() + beta.size());
  return train_csp_lda(fused, weights, filters_per_class);
}

inline CspLdaModel weighted_fused_training(std::span<const LabeledEpoch> target_labeled,
                                           std::span<const LabeledEpoch> source_labeled,
                                           const Vector& beta, int filters_per_class) {
  return weighted_fused_training(covariance_set(target_labeled), covariance_set(source_labeled),
                                 beta, filters_per_class);
}

}  // namespace tlcsp
