#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "tlcsp/lda.hpp"

namespace {

using namespace tlcsp;
using tlcsp::testing::error_kind;

struct Data {
  Matrix x;
  std::vector<Label> y;
};

Data gaussian_two_class(std::mt19937_64& rng, Index n_per_class, Index dim, double sep) {
  Data d;
  d.x = tlcsp::testing::random_matrix(2 * n_per_class, dim, rng);
  for (Index i = 0; i < 2 * n_per_class; ++i) {
    const bool one = i % 2 == 1;
    d.x(i, 0) += one ? sep : -sep;
    d.y.push_back(one ? Label::one : Label::zero);
  }
  return d;
}

TEST(Lda, SymmetricMeans) {
  Matrix x(4, 2);
  x << -1, 1, -1, -1, 1, 1, 1, -1;
  const std::vector<Label> y{Label::zero, Label::zero, Label::one, Label::one};
  const auto model = lda_train(x, y);
  EXPECT_GT(model.weights(0), 0.0);
  EXPECT_NEAR(model.weights(1), 0.0, 1e-12);
  EXPECT_NEAR(model.bias, 0.0, 1e-12);
  Vector p(2);
  p << 2, 0;
  EXPECT_EQ(lda_predict(model, p).label, Label::one);
}

TEST(Lda, CramerOracle) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 20; ++t) {
    const Data d = gaussian_two_class(rng, 15, 2, 0.7);
    std::vector<std::array<double, 2>> pts;
    std::vector<int> ys;
    for (Index i = 0; i < d.x.rows(); ++i) {
      pts.push_back({d.x(i, 0), d.x(i, 1)});
      ys.push_back(index_of(d.y[static_cast<std::size_t>(i)]));
    }
    const auto oracle = tlcsp::testing::cramer_lda(pts, ys);
    const auto model = lda_train(d.x, d.y);
    EXPECT_NEAR(model.weights(0), oracle.w0, 1e-12 * std::max(1.0, std::abs(oracle.w0)));
    EXPECT_NEAR(model.weights(1), oracle.w1, 1e-12 * std::max(1.0, std::abs(oracle.w1)));
    EXPECT_NEAR(model.bias, oracle.bias, 1e-12 * std::max(1.0, std::abs(oracle.bias)));
  }
}

TEST(Lda, DuplicationLeavesModelUnchanged) {
  std::mt19937_64 rng(45);
  const Data d = gaussian_two_class(rng, 10, 3, 1.0);
  Matrix x2(2 * d.x.rows(), d.x.cols());
  x2 << d.x, d.x;
  std::vector<Label> y2 = d.y;
  y2.insert(y2.end(), d.y.begin(), d.y.end());
  const auto a = lda_train(d.x, d.y);
  const auto b = lda_train(x2, y2);
  EXPECT_LE((a.weights - b.weights).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(a.bias, b.bias, 1e-10);
}

TEST(Lda, IntegerWeightsEqualReplication) {
  std::mt19937_64 rng(46);
  const Data d = gaussian_two_class(rng, 8, 3, 1.0);
  std::vector<double> w;
  std::vector<Index> rows;
  std::vector<Label> y;
  for (Index i = 0; i < d.x.rows(); ++i) {
    const int k = static_cast<int>(i % 3);
    w.push_back(k);
    for (int r = 0; r < k; ++r) {
      rows.push_back(i);
      y.push_back(d.y[static_cast<std::size_t>(i)]);
    }
  }
  Matrix rep(static_cast<Index>(rows.size()), d.x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) rep.row(static_cast<Index>(r)) = d.x.row(rows[r]);
  const auto a = lda_train(d.x, d.y, w);
  const auto b = lda_train(rep, y);
  EXPECT_LE((a.weights - b.weights).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(a.bias, b.bias, 1e-10);
}

TEST(Lda, OrderInvariant) {
  std::mt19937_64 rng(47);
  const Data d = gaussian_two_class(rng, 12, 4, 0.5);
  std::vector<Index> perm(static_cast<std::size_t>(d.x.rows()));
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Index>(i);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix x(d.x.rows(), d.x.cols());
  std::vector<Label> y;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    x.row(static_cast<Index>(i)) = d.x.row(perm[i]);
    y.push_back(d.y[static_cast<std::size_t>(perm[i])]);
  }
  const auto a = lda_train(d.x, d.y);
  const auto b = lda_train(x, y);
  EXPECT_LE((a.weights - b.weights).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(a.bias, b.bias, 1e-10);
}

TEST(Lda, AffineShiftMovesBiasOnly) {
  std::mt19937_64 rng(48);
  const Data d = gaussian_two_class(rng, 12, 3, 0.6);
  Vector c(3);
  c << 5.0, -2.0, 0.25;
  const Matrix shifted = d.x.rowwise() + c.transpose();
  const auto a = lda_train(d.x, d.y);
  const auto b = lda_train(shifted, d.y);
  EXPECT_LE((a.weights - b.weights).cwiseAbs().maxCoeff(), 1e-10);
  for (int t = 0; t < 50; ++t) {
    const Vector p = tlcsp::testing::random_matrix(3, 1, rng);
    const auto pa = lda_predict(a, p);
    const auto pb = lda_predict(b, p + c);
    EXPECT_NEAR(pa.score, pb.score, 1e-9);
    if (std::abs(pa.score) > 1e-8) EXPECT_EQ(pa.label, pb.label);
  }
}

TEST(Lda, SingleClassIsEmptyClassError) {
  Matrix x = Matrix::Ones(3, 2);
  const std::vector<Label> y(3, Label::one);
  EXPECT_EQ(error_kind([&] { lda_train(x, y); }), ErrorKind::empty_class);
  const std::vector<Label> mixed{Label::zero, Label::one, Label::one};
  const std::vector<double> w{0.0, 1.0, 1.0};
  EXPECT_EQ(error_kind([&] { lda_train(x, mixed, w); }), ErrorKind::empty_class);
}

TEST(Lda, SingleSamplePerClassStillSolves) {
  Matrix x(2, 2);
  x << 0, 0, 1, 1;
  const auto model = lda_train(x, std::vector<Label>{Label::zero, Label::one});
  EXPECT_TRUE(model.weights.allFinite());
  EXPECT_EQ(lda_predict(model, x.row(1).transpose()).label, Label::one);
  EXPECT_EQ(lda_predict(model, x.row(0).transpose()).label, Label::zero);
}

TEST(LdaPredict, Examples) {
  LdaModel m{Vector::Zero(2), 0.0};
  m.weights << 1, 0;
  Vector x(2);
  x << -3, 7;
  const auto p = lda_predict(m, x);
  EXPECT_DOUBLE_EQ(p.score, -3.0);
  EXPECT_EQ(p.label, Label::zero);
  x << 0, 100;
  EXPECT_EQ(lda_predict(m, x).label, Label::zero);  // score exactly 0
  EXPECT_EQ(error_kind([&] { lda_predict(m, Vector::Zero(3)); }), ErrorKind::dimension);
}

TEST(LdaPredict, NegatedModelFlipsScore) {
  std::mt19937_64 rng(49);
  const Data d = gaussian_two_class(rng, 10, 2, 1.0);
  const auto m = lda_train(d.x, d.y);
  const LdaModel neg{-m.weights, -m.bias};
  for (Index i = 0; i < d.x.rows(); ++i) {
    const Vector x = d.x.row(i).transpose();
    EXPECT_DOUBLE_EQ(lda_predict(neg, x).score, -lda_predict(m, x).score);
  }
}

TEST(Loo, SeparatedClassesScorePerfectly) {
  Matrix x(6, 2);
  x << -10, 0, -11, 1, -9, -1, 10, 0, 11, 1, 9, -1;
  const std::vector<Label> y{Label::zero, Label::zero, Label::zero, Label::one, Label::one, Label::one};
  EXPECT_DOUBLE_EQ(loo_accuracy(x, y), 1.0);
}

TEST(Loo, IdenticalFeaturesStayInRange) {
  const Matrix x = Matrix::Ones(6, 2);
  std::mt19937_64 rng(50);
  std::vector<Label> y{Label::zero, Label::zero, Label::one, Label::one, Label::zero, Label::one};
  std::shuffle(y.begin(), y.end(), rng);
  const double acc = loo_accuracy(x, y);
  EXPECT_GE(acc, 0.0);
  EXPECT_LE(acc, 1.0);
}

TEST(Loo, ManualFoldsWithCramerOracle) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 20; ++t) {
    const Data d = gaussian_two_class(rng, 2, 2, 0.5);
    int correct = 0;
    for (Index held = 0; held < 4; ++held) {
      std::vector<std::array<double, 2>> pts;
      std::vector<int> ys;
      for (Index i = 0; i < 4; ++i) {
        if (i == held) continue;
        pts.push_back({d.x(i, 0), d.x(i, 1)});
        ys.push_back(index_of(d.y[static_cast<std::size_t>(i)]));
      }
      const auto o = tlcsp::testing::cramer_lda(pts, ys);
      const double score = o.w0 * d.x(held, 0) + o.w1 * d.x(held, 1) + o.bias;
      correct += (score > 0.0 ? 1 : 0) == index_of(d.y[static_cast<std::size_t>(held)]);
    }
    EXPECT_DOUBLE_EQ(loo_accuracy(d.x, d.y), correct / 4.0);
  }
}

TEST(Loo, NeedsTwoPerClass) {
  const Matrix x = Matrix::Ones(3, 2);
  const std::vector<Label> y{Label::zero, Label::one, Label::one};
  EXPECT_EQ(error_kind([&] { loo_accuracy(x, y); }), ErrorKind::insufficient_data);
}

}  // namespace
