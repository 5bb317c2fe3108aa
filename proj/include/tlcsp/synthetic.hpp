#pragma once

// Synthetic multi-subject corpus with planted spatial patterns.
//
// A shared orthogonal mixing matrix A is drawn once. Subject z mixes with
// A_z = R_z * A, where R_z = exp(theta * S_z) for a random skew-symmetric S_z
// of unit spectral norm, so theta is the largest principal rotation angle.
// Latent 0 has variance hi under class 0 and lo under class 1, latent 1 the
// reverse, and the remaining latents carry `noise_floor` under both classes.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "tlcsp/eeg_data.hpp"
#include "tlcsp/seeding.hpp"

namespace tlcsp {

struct SynthConfig {
  std::size_t num_subjects = 9;
  Index channels = 22;
  Index samples = 250;
  std::size_t epochs_per_class = 72;
  double sigma_hi = 4.0;  // variance, not standard deviation
  double sigma_lo = 1.0;
  double divergence = 0.2;  // radians
  double noise_floor = 1.0;
  std::uint64_t seed = 1;

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::config, m); };
    if (num_subjects < 1) fail("num_subjects must be >= 1");
    if (epochs_per_class < 1) fail("epochs_per_class must be >= 1");
    if (channels < 2) fail("channels must be >= 2 (two discriminative latents)");
    if (samples < 2) fail("samples must be >= 2");
    if (!(sigma_lo > 0.0)) fail("sigma_lo must be > 0");
    if (!(sigma_hi > sigma_lo)) fail("sigma_hi must exceed sigma_lo");
    if (!(divergence >= 0.0)) fail("divergence must be >= 0");
    if (!(noise_floor >= 0.0)) fail("noise_floor must be >= 0");
  }
};

struct SyntheticCorpus {
  std::vector<SubjectDataset> subjects;
  Matrix base_mixing;
  std::vector<Matrix> mixing;  // A_z per subject

  /// A_z^{-1}; rows 0 and 1 are the planted discriminative filters.
  Matrix unmixing(std::size_t subject) const { return mixing.at(subject).inverse(); }

  /// Planted filter for latent `k` (0: class-0 dominant, 1: class-1 dominant).
  Vector planted_filter(std::size_t subject, Index k) const {
    return unmixing(subject).row(k).transpose();
  }
};

namespace detail {

inline Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

inline Matrix random_orthogonal(Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(n, n, rng));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

inline Matrix random_rotation(Index n, double angle, std::mt19937_64& rng) {
  const Matrix g = gaussian_matrix(n, n, rng);
  if (angle == 0.0) return Matrix::Identity(n, n);
  Matrix skew = 0.5 * (g - g.transpose());
  Eigen::JacobiSVD<Matrix> svd(skew);
  skew /= svd.singularValues()(0);
  const Matrix scaled = angle * skew;
  return scaled.exp();
}

}  // namespace detail

inline SyntheticCorpus generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  const Index c = cfg.channels;

  SyntheticCorpus corpus;
  std::mt19937_64 base_rng(mix_seed(cfg.seed, 0));
  corpus.base_mixing = detail::random_orthogonal(c, base_rng);

  Vector var0 = Vector::Constant(c, cfg.noise_floor);
  Vector var1 = var0;
  var0(0) = cfg.sigma_hi;
  var0(1) = cfg.sigma_lo;
  var1(0) = cfg.sigma_lo;
  var1(1) = cfg.sigma_hi;
  const Vector sd0 = var0.cwiseSqrt();
  const Vector sd1 = var1.cwiseSqrt();

  const int id_width = cfg.num_subjects > 99 ? 3 : 2;
  for (std::size_t z = 0; z < cfg.num_subjects; ++z) {
    std::mt19937_64 rng(mix_seed(cfg.seed, 1 + z));
    const Matrix rotation = detail::random_rotation(c, cfg.divergence, rng);
    Matrix mixing = rotation * corpus.base_mixing;

    char id[16];
    std::snprintf(id, sizeof id, "S%0*zu", id_width, z + 1);
    SubjectDataset ds;
    ds.subject_id = id;
    ds.epochs.reserve(2 * cfg.epochs_per_class);
    for (std::size_t k = 0; k < 2 * cfg.epochs_per_class; ++k) {
      const Label label = (k % 2 == 0) ? Label::zero : Label::one;
      const Vector& sd = label == Label::zero ? sd0 : sd1;
      Matrix latent = detail::gaussian_matrix(c, cfg.samples, rng);
      latent = sd.asDiagonal() * latent;
      // Round through float32 so the in-memory corpus equals its EEGX image.
      Matrix x = (mixing * latent).cast<float>().cast<double>();
      ds.epochs.push_back({Epoch(std::move(x)), label});
    }
    corpus.subjects.push_back(std::move(ds));
    corpus.mixing.push_back(std::move(mixing));
  }
  return corpus;
}

}  // namespace tlcsp
