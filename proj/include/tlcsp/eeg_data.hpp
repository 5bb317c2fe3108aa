#pragma once

// Epoch and dataset types plus the covariance estimators every other module
// consumes. Epochs are assumed zero-mean (band-passed EEG); no centering is
// applied before forming X * X^T.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tlcsp/error.hpp"

namespace tlcsp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class Label : std::uint8_t { zero = 0, one = 1 };

constexpr int index_of(Label label) { return static_cast<int>(label); }

inline Label label_from_int(int value) {
  if (value != 0 && value != 1) {
    throw Error(ErrorKind::label, "label must be 0 or 1, got " + std::to_string(value));
  }
  return static_cast<Label>(value);
}

/// One C x T block of band-passed samples.
class Epoch {
 public:
  explicit Epoch(Matrix data) : data_(std::move(data)) {
    if (data_.rows() < 2 || data_.cols() < 2) {
      throw Error(ErrorKind::dimension, "epoch needs at least 2 channels and 2 samples, got " +
                                            std::to_string(data_.rows()) + "x" +
                                            std::to_string(data_.cols()));
    }
    if (!data_.allFinite()) {
      throw Error(ErrorKind::degenerate, "epoch contains non-finite samples");
    }
  }

  Index channels() const { return data_.rows(); }
  Index samples() const { return data_.cols(); }
  const Matrix& data() const { return data_; }

 private:
  Matrix data_;
};

struct LabeledEpoch {
  Epoch epoch;
  Label label;
};

struct SubjectDataset {
  std::string subject_id;
  std::vector<LabeledEpoch> epochs;

  Index channels() const { return epochs.empty() ? 0 : epochs.front().epoch.channels(); }
  Index samples() const { return epochs.empty() ? 0 : epochs.front().epoch.samples(); }

  std::size_t count(Label label) const {
    std::size_t n = 0;
    for (const auto& e : epochs) n += (e.label == label);
    return n;
  }

  /// Nonempty with homogeneous shape.
  void validate() const {
    if (epochs.empty()) {
      throw Error(ErrorKind::config, "subject '" + subject_id + "' has no epochs");
    }
    for (const auto& e : epochs) {
      if (e.epoch.channels() != channels() || e.epoch.samples() != samples()) {
        throw Error(ErrorKind::dimension,
                    "subject '" + subject_id + "' mixes epoch shapes");
      }
    }
  }
};

/// Symmetric C x C matrix, optionally trace-normalized.
class SpatialCovariance {
 public:
  SpatialCovariance(Matrix matrix, bool normalized)
      : matrix_(std::move(matrix)), normalized_(normalized) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
      throw Error(ErrorKind::dimension, "covariance must be square and nonempty");
    }
    const double scale = std::max(matrix_.cwiseAbs().maxCoeff(), 1e-300);
    if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw Error(ErrorKind::degenerate, "covariance is not symmetric");
    }
  }

  const Matrix& matrix() const { return matrix_; }
  bool normalized() const { return normalized_; }
  Index dim() const { return matrix_.rows(); }
  double trace() const { return matrix_.trace(); }

  /// min eigenvalue >= -tol * trace
  bool is_psd(double tol = 1e-10) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol * std::abs(matrix_.trace());
  }

 private:
  Matrix matrix_;
  bool normalized_;
};

namespace detail {

// Lower triangle via a rank update, mirrored, so (i,j) and (j,i) are the
// same computed value.
inline Matrix gram(const Matrix& x) {
  Matrix s = Matrix::Zero(x.rows(), x.rows());
  s.selfadjointView<Eigen::Lower>().rankUpdate(x);
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return s;
}

}  // namespace detail

inline SpatialCovariance epoch_covariance(const Epoch& epoch, bool normalize) {
  Matrix s = detail::gram(epoch.data());
  if (normalize) {
    const double tr = s.trace();
    if (!(tr > 0.0)) {
      throw Error(ErrorKind::degenerate, "epoch has zero power, cannot trace-normalize");
    }
    s /= tr;
  }
  return SpatialCovariance(std::move(s), normalize);
}

/// Per-epoch trace-normalized covariances and labels. Everything downstream of
/// the raw samples (class means, CSP features, KMM representations) needs only
/// these, so datasets are converted once and reused.
struct CovarianceSet {
  std::vector<Matrix> covs;
  std::vector<Label> labels;

  std::size_t size() const { return covs.size(); }
  bool empty() const { return covs.empty(); }
  Index channels() const { return covs.empty() ? 0 : covs.front().rows(); }

  void push_back(Matrix cov, Label label) {
    covs.push_back(std::move(cov));
    labels.push_back(label);
  }

  void append(const CovarianceSet& other) {
    covs.insert(covs.end(), other.covs.begin(), other.covs.end());
    labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  }

  std::size_t count(Label label) const {
    std::size_t n = 0;
    for (auto l : labels) n += (l == label);
    return n;
  }

  CovarianceSet subset(std::span<const std::size_t> indices) const {
    CovarianceSet out;
    out.covs.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (auto i : indices) out.push_back(covs[i], labels[i]);
    return out;
  }
};

inline CovarianceSet covariance_set(std::span<const LabeledEpoch> epochs) {
  CovarianceSet set;
  set.covs.reserve(epochs.size());
  set.labels.reserve(epochs.size());
  for (const auto& e : epochs) {
    set.push_back(epoch_covariance(e.epoch, true).matrix(), e.label);
  }
  return set;
}

inline CovarianceSet covariance_set(const SubjectDataset& dataset) {
  return covariance_set(std::span<const LabeledEpoch>(dataset.epochs));
}

/// Weighted Euclidean mean of the normalized covariances of one class.
/// Empty `weights` means unit weights.
inline SpatialCovariance class_mean_covariance(const CovarianceSet& set, Label cls,
                                               std::span<const double> weights = {}) {
  if (!weights.empty() && weights.size() != set.size()) {
    throw Error(ErrorKind::dimension, "weight count does not match epoch count");
  }
  Matrix acc;
  double total = 0.0;
  bool seen = false;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.labels[i] != cls) continue;
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w < 0.0 || !std::isfinite(w)) {
      throw Error(ErrorKind::config, "epoch weights must be finite and nonnegative");
    }
    if (!seen) {
      acc = Matrix::Zero(set.covs[i].rows(), set.covs[i].cols());
      seen = true;
    }
    acc += w * set.covs[i];
    total += w;
  }
  if (!seen) {
    throw Error(ErrorKind::empty_class,
                "no epoch of class " + std::to_string(index_of(cls)));
  }
  if (!(total > 0.0)) {
    throw Error(ErrorKind::zero_weight,
                "all epochs of class " + std::to_string(index_of(cls)) + " have zero weight");
  }
  acc /= total;
  return SpatialCovariance(std::move(acc), true);
}

inline SpatialCovariance class_mean_covariance(std::span<const LabeledEpoch> epochs, Label cls,
                                               std::span<const double> weights = {}) {
  return class_mean_covariance(covariance_set(epochs), cls, weights);
}

/// Label-free mean of all normalized covariances in the set.
inline SpatialCovariance pooled_covariance(const CovarianceSet& set) {
  if (set.empty()) throw Error(ErrorKind::empty_class, "cannot pool an empty epoch set");
  Matrix acc = Matrix::Zero(set.channels(), set.channels());
  for (const auto& c : set.covs) acc += c;
  acc /= static_cast<double>(set.size());
  return SpatialCovariance(std::move(acc), true);
}

}  // namespace tlcsp
