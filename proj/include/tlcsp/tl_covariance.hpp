#pragma once

// Covariance-fusion transfer: KL-affinity weighting of all sources (CM1) and
// averaging over a greedily selected source subset (CM2).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "tlcsp/pipeline.hpp"

namespace tlcsp {

struct Cm1Config {
  double lambda = 0.5;

  void validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw Error(ErrorKind::config, "CM1 lambda must lie in [0, 1]");
    }
  }
};

struct SourceAffinity {
  Vector alpha;  // sums to 1
  Vector kl;
};

inline constexpr double kChanceAccuracy = 0.5;

namespace detail {

inline Eigen::LLT<Matrix> ridged_cholesky(const Matrix& m, const char* which) {
  Matrix a = m;
  const double tr = a.trace();
  a.diagonal().array() += 1e-10 * tr / static_cast<double>(a.rows());
  Eigen::LLT<Matrix> llt(a);
  if (!(tr > 0.0) || llt.info() != Eigen::Success) {
    throw Error(ErrorKind::conditioning, std::string(which) + " covariance is not positive definite");
  }
  return llt;
}

inline double log_det(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace detail

/// KL(N(0, S_s) || N(0, S_t)) = 1/2 { log(|S_t|/|S_s|) + tr(S_t^{-1} S_s) - C }.
inline double kl_divergence_gaussian(const SpatialCovariance& sigma_s,
                                     const SpatialCovariance& sigma_t) {
  if (sigma_s.dim() != sigma_t.dim()) {
    throw Error(ErrorKind::dimension, "KL divergence needs equally sized covariances");
  }
  const auto ls = detail::ridged_cholesky(sigma_s.matrix(), "source");
  const auto lt = detail::ridged_cholesky(sigma_t.matrix(), "target");
  const Matrix ls_lower = ls.matrixL();
  const double tr = lt.matrixL().solve(ls_lower).squaredNorm();
  const double kl =
      0.5 * (detail::log_det(lt) - detail::log_det(ls) + tr - static_cast<double>(sigma_s.dim()));
  return std::max(kl, 0.0);
}

/// alpha_z proportional to 1 / KL_z, with KL clamped below at 1e-12.
inline SourceAffinity affinities_from_kl(const Vector& kl) {
  if (kl.size() == 0) throw Error(ErrorKind::affinity, "no source subjects");
  SourceAffinity out;
  out.kl = kl;
  out.alpha.resize(kl.size());
  for (Index z = 0; z < kl.size(); ++z) {
    out.alpha(z) = 1.0 / std::max(kl(z), 1e-12);
  }
  const double gamma = out.alpha.sum();
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::affinity, "every source KL divergence is infinite");
  }
  out.alpha /= gamma;
  return out;
}

inline SourceAffinity cm1_affinities(std::span<const SpatialCovariance> source_pooled,
                                     const SpatialCovariance& target_pooled) {
  Vector kl(static_cast<Index>(source_pooled.size()));
  for (std::size_t z = 0; z < source_pooled.size(); ++z) {
    kl(static_cast<Index>(z)) = kl_divergence_gaussian(source_pooled[z], target_pooled);
  }
  return affinities_from_kl(kl);
}

/// (1 - lambda) S_t + lambda * sum_z alpha_z S_z, applied per class.
inline SpatialCovariance cm1_combine(const SpatialCovariance& sigma_t_class,
                                     std::span<const SpatialCovariance> sigma_s_class,
                                     const SourceAffinity& affinity, const Cm1Config& cfg) {
  cfg.validate();
  if (static_cast<Index>(sigma_s_class.size()) != affinity.alpha.size()) {
    throw Error(ErrorKind::dimension, "affinity length does not match source count");
  }
  Matrix fused = (1.0 - cfg.lambda) * sigma_t_class.matrix();
  for (std::size_t z = 0; z < sigma_s_class.size(); ++z) {
    if (sigma_s_class[z].dim() != sigma_t_class.dim()) {
      throw Error(ErrorKind::dimension, "source covariance size mismatch");
    }
    fused += cfg.lambda * affinity.alpha(static_cast<Index>(z)) * sigma_s_class[z].matrix();
  }
  return SpatialCovariance(std::move(fused), sigma_t_class.normalized());
}

/// Three-case rule; the first matching case wins.
inline double cm2_lambda(double target_acc, double selected_acc,
                         double rand_acc = kChanceAccuracy) {
  if (!(rand_acc < 1.0)) throw Error(ErrorKind::config, "chance accuracy must be < 1");
  if (target_acc <= rand_acc) return 1.0;
  if (target_acc >= selected_acc) return 0.0;
  return std::clamp((selected_acc - target_acc) / (1.0 - rand_acc), 0.0, 1.0);
}

/// (1 - lambda) S_t + lambda * mean of the selected source covariances.
inline SpatialCovariance cm2_combine(const SpatialCovariance& sigma_t_class,
                                     std::span<const SpatialCovariance> selected,
                                     double lambda) {
  if (selected.empty()) throw Error(ErrorKind::config, "CM2 needs at least one selected source");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorKind::config, "CM2 lambda must lie in [0, 1]");
  }
  Matrix mean = Matrix::Zero(sigma_t_class.dim(), sigma_t_class.dim());
  for (const auto& s : selected) {
    if (s.dim() != sigma_t_class.dim()) {
      throw Error(ErrorKind::dimension, "source covariance size mismatch");
    }
    mean += s.matrix();
  }
  Matrix fused = (1.0 - lambda) * sigma_t_class.matrix() +
                 (lambda / static_cast<double>(selected.size())) * mean;
  return SpatialCovariance(std::move(fused), sigma_t_class.normalized());
}

/// Greedy forward selection of source subjects. `model_for` maps a sorted
/// list of source indices to a CSP+LDA model trained on their union; each
/// round adds the candidate with the highest accuracy on `target` (lowest
/// index on ties) and stops once accuracy no longer strictly improves.
template <class ModelFor>
std::vector<std::size_t> select_subjects_greedy(const CovarianceSet& target,
                                                std::size_t num_sources, ModelFor&& model_for) {
  if (num_sources == 0) throw Error(ErrorKind::config, "CM2 selection needs source subjects");
  std::vector<std::size_t> selected;
  std::vector<bool> taken(num_sources, false);
  double best = -std::numeric_limits<double>::infinity();
  while (selected.size() < num_sources) {
    std::size_t pick = num_sources;
    double pick_acc = -std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z < num_sources; ++z) {
      if (taken[z]) continue;
      std::vector<std::size_t> trial = selected;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), z), z);
      const double acc = accuracy(model_for(trial), target);
      if (acc > pick_acc) {
        pick_acc = acc;
        pick = z;
      }
    }
    if (!(pick_acc > best)) break;
    best = pick_acc;
    taken[pick] = true;
    selected.insert(std::upper_bound(selected.begin(), selected.end(), pick), pick);
  }
  return selected;
}

/// Unit-weight CSP+LDA on the union of the listed sources.
inline CspLdaModel train_on_sources(std::span<const CovarianceSet> sources,
                                    std::span<const std::size_t> which, int filters_per_class) {
  CovarianceSet pooled;
  for (auto z : which) pooled.append(sources[z]);
  return train_csp_lda(pooled, {}, filters_per_class);
}

inline std::vector<std::size_t> cm2_select_subjects(const SubjectDataset& target_labeled,
                                                    std::span<const SubjectDataset> sources,
                                                    int filters_per_class) {
  std::vector<CovarianceSet> sets;
  sets.reserve(sources.size());
  for (const auto& s : sources) sets.push_back(covariance_set(s));
  const CovarianceSet target = covariance_set(target_labeled);
  return select_subjects_greedy(target, sets.size(), [&](const std::vector<std::size_t>& which) {
    return train_on_sources(sets, which, filters_per_class);
  });
}

}  // namespace tlcsp
