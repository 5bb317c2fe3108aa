#pragma once

// CSP followed by LDA on log-variance features, trained from per-epoch
// normalized covariances.

#include <span>
#include <vector>

#include "tlcsp/csp.hpp"
#include "tlcsp/lda.hpp"

namespace tlcsp {

struct CspLdaModel {
  CspFilterBank bank;
  LdaModel lda;

  Prediction predict(const Matrix& cov) const {
    return lda_predict(lda, covariance_features(bank, cov));
  }

  Prediction predict(const Epoch& epoch) const {
    return lda_predict(lda, log_variance_features(apply_filters(bank, epoch)));
  }
};

/// CSP from the given class means, LDA on `lda_set` with `lda_weights`.
inline CspLdaModel train_csp_lda(const SpatialCovariance& sigma0, const SpatialCovariance& sigma1,
                                 const CovarianceSet& lda_set,
                                 std::span<const double> lda_weights, int filters_per_class) {
  CspLdaModel model;
  model.bank = compute_csp(sigma0, sigma1, filters_per_class);
  model.lda = lda_train(covariance_features(model.bank, lda_set), lda_set.labels, lda_weights);
  return model;
}

/// Weighted class means feed CSP; the same weights feed LDA.
inline CspLdaModel train_csp_lda(const CovarianceSet& set, std::span<const double> weights,
                                 int filters_per_class) {
  return train_csp_lda(class_mean_covariance(set, Label::zero, weights),
                       class_mean_covariance(set, Label::one, weights), set, weights,
                       filters_per_class);
}

inline double accuracy(const CspLdaModel& model, const CovarianceSet& test) {
  if (test.empty()) throw Error(ErrorKind::config, "empty test set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    correct += model.predict(test.covs[i]).label == test.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

/// Leave-one-out accuracy of the whole CSP+LDA pipeline: each fold refits
/// the filters as well, so the held-out epoch never shapes its own features.
inline double pipeline_loo_accuracy(const CovarianceSet& set, int filters_per_class) {
  if (set.count(Label::zero) < 2 || set.count(Label::one) < 2) {
    throw Error(ErrorKind::insufficient_data, "leave-one-out needs at least 2 samples per class");
  }
  std::size_t correct = 0;
  std::vector<std::size_t> keep;
  keep.reserve(set.size() - 1);
  for (std::size_t held = 0; held < set.size(); ++held) {
    keep.clear();
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (i != held) keep.push_back(i);
    }
    const CspLdaModel model = train_csp_lda(set.subset(keep), {}, filters_per_class);
    correct += model.predict(set.covs[held]).label == set.labels[held];
  }
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

}  // namespace tlcsp
