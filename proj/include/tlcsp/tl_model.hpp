#pragma once

// Model-based transfer: one CSP+LDA model per source subject, combined by
// simplex-constrained weights fitted to the target calibration epochs under
// squared loss on +/-1 coded outputs.

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tlcsp/pipeline.hpp"

namespace tlcsp {

struct SourceModelBank {
  std::vector<CspLdaModel> models;

  std::size_t size() const { return models.size(); }
};

struct EnsembleWeights {
  Vector w;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> history;  // objective per iterate, when requested
};

struct SimplexFitOptions {
  int max_iterations = 5000;
  double tolerance = 1e-12;
  bool record_history = false;
};

inline SourceModelBank train_source_models(std::span<const CovarianceSet> sources,
                                           int filters_per_class,
                                           std::span<const std::string> ids = {}) {
  if (sources.empty()) throw Error(ErrorKind::config, "no source subjects");
  SourceModelBank bank;
  bank.models.reserve(sources.size());
  for (std::size_t z = 0; z < sources.size(); ++z) {
    if (sources[z].channels() != sources.front().channels()) {
      throw Error(ErrorKind::dimension, "source subjects differ in channel count");
    }
    try {
      bank.models.push_back(train_csp_lda(sources[z], {}, filters_per_class));
    } catch (const Error& e) {
      const std::string who = z < ids.size() ? ids[z] : "#" + std::to_string(z);
      throw Error(e.kind(), "source subject " + who + ": " + e.message());
    }
  }
  return bank;
}

inline SourceModelBank train_source_models(std::span<const SubjectDataset> sources,
                                           int filters_per_class) {
  std::vector<CovarianceSet> sets;
  std::vector<std::string> ids;
  for (const auto& s : sources) {
    sets.push_back(covariance_set(s));
    ids.push_back(s.subject_id);
  }
  return train_source_models(sets, filters_per_class, ids);
}

inline double signed_label(Label label) { return label == Label::one ? 1.0 : -1.0; }

inline Vector signed_labels(std::span<const Label> labels) {
  Vector y(static_cast<Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Index>(i)) = signed_label(labels[i]);
  return y;
}

/// Entry (j, z) is model z's hard prediction on epoch j, coded +/-1.
inline Matrix prediction_matrix(const SourceModelBank& bank, const CovarianceSet& epochs) {
  Matrix p(static_cast<Index>(epochs.size()), static_cast<Index>(bank.size()));
  for (std::size_t z = 0; z < bank.size(); ++z) {
    for (std::size_t j = 0; j < epochs.size(); ++j) {
      p(static_cast<Index>(j), static_cast<Index>(z)) =
          signed_label(bank.models[z].predict(epochs.covs[j]).label);
    }
  }
  return p;
}

inline Matrix prediction_matrix(const SourceModelBank& bank, std::span<const LabeledEpoch> epochs) {
  Matrix p(static_cast<Index>(epochs.size()), static_cast<Index>(bank.size()));
  for (std::size_t z = 0; z < bank.size(); ++z) {
    for (std::size_t j = 0; j < epochs.size(); ++j) {
      p(static_cast<Index>(j), static_cast<Index>(z)) =
          signed_label(bank.models[z].predict(epochs[j].epoch).label);
    }
  }
  return p;
}

/// Euclidean projection onto { w >= 0, sum w = 1 } (sort-and-threshold).
inline Vector project_onto_simplex(const Vector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

inline double ensemble_objective(const Matrix& p, const Vector& y, const Vector& w) {
  return (p * w - y).squaredNorm();
}

/// Projected gradient with step 1/L, L = 2 * lambda_max(P^T P); the step
/// guarantees monotone descent. Starts from uniform weights.
inline EnsembleWeights optimize_weights(const Matrix& p, const Vector& y,
                                        const SimplexFitOptions& opts = {}) {
  if (p.rows() == 0) throw Error(ErrorKind::insufficient_data, "no calibration epochs");
  if (p.cols() == 0) throw Error(ErrorKind::config, "no source models");
  if (y.size() != p.rows()) throw Error(ErrorKind::dimension, "labels and predictions differ in count");

  const Index z = p.cols();
  EnsembleWeights out;
  out.w = Vector::Constant(z, 1.0 / static_cast<double>(z));
  out.objective = ensemble_objective(p, y, out.w);
  if (opts.record_history) out.history.push_back(out.objective);

  const Matrix gram = p.transpose() * p;
  const double top = Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .maxCoeff();
  if (z == 1 || !(top > 0.0)) {
    out.converged = true;
    return out;
  }
  const double step = 1.0 / (2.0 * top);
  const Vector pty = p.transpose() * y;

  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Vector grad = 2.0 * (gram * out.w - pty);
    Vector next = project_onto_simplex(out.w - step * grad);
    const double f = ensemble_objective(p, y, next);
    out.iterations = it;
    const double improvement = out.objective - f;
    if (f <= out.objective) {
      out.w = std::move(next);
      out.objective = f;
    }
    if (opts.record_history) out.history.push_back(out.objective);
    if (improvement < opts.tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

/// Score = sum_z w_z f_z(x) with f_z in {-1, +1}; class 1 iff score > 0.
inline Prediction ensemble_predict(const SourceModelBank& bank, const EnsembleWeights& weights,
                                   const Matrix& cov) {
  if (static_cast<std::size_t>(weights.w.size()) != bank.size()) {
    throw Error(ErrorKind::dimension, "ensemble weight count does not match model count");
  }
  double score = 0.0;
  for (std::size_t z = 0; z < bank.size(); ++z) {
    score += weights.w(static_cast<Index>(z)) * signed_label(bank.models[z].predict(cov).label);
  }
  return {score > 0.0 ? Label::one : Label::zero, score};
}

inline Prediction ensemble_predict(const SourceModelBank& bank, const EnsembleWeights& weights,
                                   const Epoch& epoch) {
  if (static_cast<std::size_t>(weights.w.size()) != bank.size()) {
    throw Error(ErrorKind::dimension, "ensemble weight count does not match model count");
  }
  double score = 0.0;
  for (std::size_t z = 0; z < bank.size(); ++z) {
    score += weights.w(static_cast<Index>(z)) * signed_label(bank.models[z].predict(epoch).label);
  }
  return {score > 0.0 ? Label::one : Label::zero, score};
}

inline EnsembleWeights uniform_weights(std::size_t num_models) {
  EnsembleWeights out;
  out.w = Vector::Constant(static_cast<Index>(num_models), 1.0 / static_cast<double>(num_models));
  out.converged = true;
  return out;
}

}  // namespace tlcsp
