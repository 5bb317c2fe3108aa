#pragma once

// Common spatial patterns for two classes.
//
// The generalized problem  S0 w = lambda (S0 + S1) w  is solved by whitening
// with the Cholesky factor of S0 + S1 + eps*I and a symmetric eigensolve.
// Its eigenvectors are those of S1^{-1} S0, ordered identically, so one
// decomposition yields both halves of the filter bank.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tlcsp/eeg_data.hpp"

namespace tlcsp {

inline constexpr int kDefaultFiltersPerClass = 3;

struct CspFilterBank {
  /// C x 2F; columns [0, F) favour class 0, columns [F, 2F) favour class 1.
  Matrix filters;
  int filters_per_class = 0;
  /// Eigenvalues of S1^{-1} S0 for each column: descending over the first
  /// half, ascending over the second.
  Vector eigenvalues;

  Index channels() const { return filters.rows(); }
  Index num_filters() const { return filters.cols(); }
  auto class0_filters() const { return filters.leftCols(filters_per_class); }
  auto class1_filters() const { return filters.rightCols(filters_per_class); }
};

using FeatureVector = Vector;

inline CspFilterBank compute_csp(const SpatialCovariance& sigma0, const SpatialCovariance& sigma1,
                                 int filters_per_class = kDefaultFiltersPerClass) {
  const Index c = sigma0.dim();
  if (sigma1.dim() != c) {
    throw Error(ErrorKind::dimension, "class covariances differ in size");
  }
  if (filters_per_class < 1 || 2 * filters_per_class > c) {
    throw Error(ErrorKind::dimension, "need 1 <= F and 2F <= C, got F=" +
                                          std::to_string(filters_per_class) +
                                          " C=" + std::to_string(c));
  }
  const Matrix& s0 = sigma0.matrix();
  const Matrix& s1 = sigma1.matrix();

  Matrix composite = s0 + s1;
  const double tr = composite.trace();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw Error(ErrorKind::conditioning, "composite covariance has non-positive trace");
  }
  composite.diagonal().array() += 1e-10 * tr / static_cast<double>(c);

  Eigen::LLT<Matrix> llt(composite);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::conditioning, "composite covariance is not positive definite");
  }
  const auto lower = llt.matrixL();
  // M = L^{-1} S0 L^{-T}
  Matrix m = lower.solve(s0);
  m = lower.solve(m.transpose()).transpose();
  m = 0.5 * (m + m.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::conditioning, "eigensolver failed on whitened covariance");
  }
  // w = L^{-T} v
  const Matrix all = llt.matrixU().solve(es.eigenvectors());

  const int f = filters_per_class;
  CspFilterBank bank;
  bank.filters_per_class = f;
  bank.filters.resize(c, 2 * f);
  bank.eigenvalues.resize(2 * f);
  for (int k = 0; k < f; ++k) {
    bank.filters.col(k) = all.col(c - 1 - k);  // largest first
    bank.filters.col(f + k) = all.col(k);      // smallest first
  }
  for (Index j = 0; j < bank.filters.cols(); ++j) {
    auto col = bank.filters.col(j);
    col.normalize();
    Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    if (col(arg) < 0.0) col = -col;
    // Rayleigh quotient on the unregularized pair: exact to second order in
    // the ridge.
    const double num = col.dot(s0 * col);
    const double den = col.dot(s1 * col);
    bank.eigenvalues(j) = den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
  }
  return bank;
}

/// X' = W^T X
inline Matrix apply_filters(const CspFilterBank& bank, const Epoch& epoch) {
  if (epoch.channels() != bank.channels()) {
    throw Error(ErrorKind::dimension, "epoch has " + std::to_string(epoch.channels()) +
                                          " channels, filter bank expects " +
                                          std::to_string(bank.channels()));
  }
  return bank.filters.transpose() * epoch.data();
}

namespace detail {

inline FeatureVector log_share(const Vector& power) {
  for (Index i = 0; i < power.size(); ++i) {
    if (!(power(i) > 0.0)) {
      throw Error(ErrorKind::degenerate,
                  "filtered row " + std::to_string(i) + " has zero variance");
    }
  }
  return (power / power.sum()).array().log();
}

}  // namespace detail

/// x_i = log( (X' X'^T)_ii / tr(X' X'^T) ); every entry is <= 0.
inline FeatureVector log_variance_features(const Matrix& filtered) {
  return detail::log_share(filtered.rowwise().squaredNorm());
}

/// Same features computed from the epoch covariance: diag(W^T S W) is the
/// filtered row power up to a common factor that the log-share cancels.
inline FeatureVector covariance_features(const CspFilterBank& bank, const Matrix& cov) {
  if (cov.rows() != bank.channels()) {
    throw Error(ErrorKind::dimension, "covariance size does not match filter bank");
  }
  const Matrix sw = cov * bank.filters;
  return detail::log_share(bank.filters.cwiseProduct(sw).colwise().sum().transpose());
}

/// Features for every covariance in the set, one row per epoch.
inline Matrix covariance_features(const CspFilterBank& bank, const CovarianceSet& set) {
  Matrix out(static_cast<Index>(set.size()), bank.num_filters());
  for (std::size_t i = 0; i < set.size(); ++i) {
    out.row(static_cast<Index>(i)) = covariance_features(bank, set.covs[i]).transpose();
  }
  return out;
}

}  // namespace tlcsp
