#pragma once

#include <span>
#include <string>
#include <vector>

#include "tlcsp/eeg_data.hpp"

namespace tlcsp {

/// Binary LDA: score = w^T x + bias, class 1 iff score > 0.
struct LdaModel {
  Vector weights;
  double bias = 0.0;

  Index dim() const { return weights.size(); }
};

struct Prediction {
  Label label;
  double score;
};

/// Features are rows of `features`. Means and pooled scatter are weighted
/// (empty `weights` = unit weights); the scatter is divided by the total
/// weight so integer weights behave exactly like replicated rows. A ridge of
/// 1e-6 * trace/dim keeps tiny calibration sets solvable.
inline LdaModel lda_train(const Matrix& features, std::span<const Label> labels,
                          std::span<const double> weights = {}) {
  const Index n = features.rows();
  const Index d = features.cols();
  if (static_cast<std::size_t>(n) != labels.size()) {
    throw Error(ErrorKind::dimension, "feature rows and labels differ in count");
  }
  if (!weights.empty() && weights.size() != labels.size()) {
    throw Error(ErrorKind::dimension, "weights and labels differ in count");
  }
  Vector sum[2] = {Vector::Zero(d), Vector::Zero(d)};
  double mass[2] = {0.0, 0.0};
  for (Index i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
    if (w < 0.0 || !std::isfinite(w)) {
      throw Error(ErrorKind::config, "sample weights must be finite and nonnegative");
    }
    const int c = index_of(labels[static_cast<std::size_t>(i)]);
    sum[c] += w * features.row(i).transpose();
    mass[c] += w;
  }
  for (int c = 0; c < 2; ++c) {
    if (!(mass[c] > 0.0)) {
      throw Error(ErrorKind::empty_class, "LDA needs positive weight in class " + std::to_string(c));
    }
  }
  const Vector mu0 = sum[0] / mass[0];
  const Vector mu1 = sum[1] / mass[1];

  Matrix scatter = Matrix::Zero(d, d);
  for (Index i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
    const Vector& mu = labels[static_cast<std::size_t>(i)] == Label::zero ? mu0 : mu1;
    const Vector r = features.row(i).transpose() - mu;
    scatter.noalias() += w * r * r.transpose();
  }
  scatter /= (mass[0] + mass[1]);
  const double tr = scatter.trace();
  // A zero scatter (one sample per class) has no scale; any ridge gives the
  // same decision rule there.
  const double ridge = 1e-6 * (tr > 0.0 ? tr / static_cast<double>(d) : 1.0);
  scatter.diagonal().array() += ridge;

  LdaModel model;
  model.weights = scatter.llt().solve(mu1 - mu0);
  model.bias = -0.5 * model.weights.dot(mu0 + mu1);
  return model;
}

inline Prediction lda_predict(const LdaModel& model, const Vector& feature) {
  if (feature.size() != model.dim()) {
    throw Error(ErrorKind::dimension, "feature dimension " + std::to_string(feature.size()) +
                                          " does not match model dimension " +
                                          std::to_string(model.dim()));
  }
  const double score = model.weights.dot(feature) + model.bias;
  return {score > 0.0 ? Label::one : Label::zero, score};
}

/// Leave-one-out accuracy of LDA on fixed features. Requires two samples per
/// class so every fold still sees both classes.
inline double loo_accuracy(const Matrix& features, std::span<const Label> labels) {
  const Index n = features.rows();
  std::size_t count[2] = {0, 0};
  for (auto l : labels) ++count[index_of(l)];
  if (count[0] < 2 || count[1] < 2) {
    throw Error(ErrorKind::insufficient_data,
                "leave-one-out needs at least 2 samples per class");
  }
  std::size_t correct = 0;
  Matrix train(n - 1, features.cols());
  std::vector<Label> train_labels(static_cast<std::size_t>(n - 1));
  for (Index held = 0; held < n; ++held) {
    Index r = 0;
    for (Index i = 0; i < n; ++i) {
      if (i == held) continue;
      train.row(r) = features.row(i);
      train_labels[static_cast<std::size_t>(r)] = labels[static_cast<std::size_t>(i)];
      ++r;
    }
    const LdaModel model = lda_train(train, train_labels);
    correct += lda_predict(model, features.row(held).transpose()).label ==
               labels[static_cast<std::size_t>(held)];
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace tlcsp
