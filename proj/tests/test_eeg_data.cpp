#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "test_support.hpp"
#include "tlcsp/eegx_io.hpp"
#include "tlcsp/synthetic.hpp"

namespace {

using namespace tlcsp;
using tlcsp::testing::error_kind;

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tlcsp_test_eeg_data";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& b) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

SubjectDataset small_dataset(std::uint64_t seed, std::size_t epochs, Index c, Index t) {
  std::mt19937_64 rng(seed);
  SubjectDataset ds;
  ds.subject_id = "subj-" + std::to_string(seed);
  for (std::size_t k = 0; k < epochs; ++k) {
    Matrix x = tlcsp::testing::random_matrix(c, t, rng).cast<float>().cast<double>();
    ds.epochs.push_back({Epoch(std::move(x)), k % 2 ? Label::one : Label::zero});
  }
  return ds;
}

TEST(EpochCovariance, IdentityRaw) {
  const auto s = epoch_covariance(Epoch(Matrix::Identity(2, 2)), false);
  EXPECT_TRUE(s.matrix().isApprox(Matrix::Identity(2, 2)));
}

TEST(EpochCovariance, IdentityNormalized) {
  const auto s = epoch_covariance(Epoch(Matrix::Identity(2, 2)), true);
  EXPECT_DOUBLE_EQ(s.matrix()(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(s.matrix()(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(s.matrix()(0, 1), 0.0);
}

TEST(EpochCovariance, HandProduct) {
  const auto s = epoch_covariance(Epoch(mat2(1, 2, 3, 4)), false);
  EXPECT_EQ(s.matrix(), mat2(5, 11, 11, 25));
}

TEST(EpochCovariance, ZeroEpochNormalizedIsDegenerate) {
  EXPECT_EQ(error_kind([] { epoch_covariance(Epoch(Matrix::Zero(3, 4)), true); }),
            ErrorKind::degenerate);
}

TEST(EpochCovariance, ExactlySymmetric) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = tlcsp::testing::random_matrix(7, 33, rng);
    for (bool norm : {false, true}) {
      const Matrix s = epoch_covariance(Epoch(x), norm).matrix();
      for (Index i = 0; i < s.rows(); ++i) {
        for (Index j = 0; j < s.cols(); ++j) ASSERT_EQ(s(i, j), s(j, i));
      }
    }
  }
}

TEST(EpochCovariance, MatchesNaiveProduct) {
  std::mt19937_64 rng(6);
  const Matrix x = tlcsp::testing::random_matrix(5, 40, rng);
  const Matrix oracle = tlcsp::testing::naive_multiply(x, x.transpose());
  EXPECT_LE((epoch_covariance(Epoch(x), false).matrix() - oracle).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(epoch_covariance(Epoch(x), true).matrix().trace(), 1.0, 1e-12);
}

TEST(Epoch, RejectsTinyAndNonFinite) {
  EXPECT_EQ(error_kind([] { Epoch(Matrix::Zero(1, 5)); }), ErrorKind::dimension);
  Matrix bad = Matrix::Ones(2, 2);
  bad(1, 1) = std::nan("");
  EXPECT_EQ(error_kind([&] { Epoch{bad}; }), ErrorKind::degenerate);
}

TEST(ClassMean, IdenticalEpochsGiveTheSummand) {
  CovarianceSet set;
  set.push_back(mat2(0.7, 0.1, 0.1, 0.3), Label::zero);
  set.push_back(mat2(0.7, 0.1, 0.1, 0.3), Label::zero);
  EXPECT_TRUE(class_mean_covariance(set, Label::zero).matrix().isApprox(mat2(0.7, 0.1, 0.1, 0.3)));
}

TEST(ClassMean, ZeroWeightExcludes) {
  CovarianceSet set;
  set.push_back(mat2(0.8, 0, 0, 0.2), Label::zero);
  set.push_back(mat2(0.2, 0, 0, 0.8), Label::zero);
  const std::vector<double> w{1.0, 0.0};
  EXPECT_EQ(class_mean_covariance(set, Label::zero, w).matrix(), mat2(0.8, 0, 0, 0.2));
}

TEST(ClassMean, SymmetricPairAverages) {
  CovarianceSet set;
  set.push_back(mat2(0.8, 0, 0, 0.2), Label::zero);
  set.push_back(mat2(0.2, 0, 0, 0.8), Label::zero);
  set.push_back(mat2(0.9, 0, 0, 0.1), Label::one);
  EXPECT_TRUE(class_mean_covariance(set, Label::zero).matrix().isApprox(mat2(0.5, 0, 0, 0.5)));
}

TEST(ClassMean, Errors) {
  CovarianceSet set;
  set.push_back(mat2(0.8, 0, 0, 0.2), Label::zero);
  EXPECT_EQ(error_kind([&] { class_mean_covariance(set, Label::one); }), ErrorKind::empty_class);
  const std::vector<double> zero{0.0};
  EXPECT_EQ(error_kind([&] { class_mean_covariance(set, Label::zero, zero); }),
            ErrorKind::zero_weight);
}

TEST(ClassMean, PermutationInvariant) {
  const auto ds = small_dataset(11, 12, 4, 30);
  const auto set = covariance_set(ds);
  std::vector<std::size_t> perm(set.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::mt19937_64 rng(3);
  for (int t = 0; t < 5; ++t) {
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto shuffled = set.subset(perm);
    for (Label l : {Label::zero, Label::one}) {
      const Matrix a = class_mean_covariance(set, l).matrix();
      const Matrix b = class_mean_covariance(shuffled, l).matrix();
      EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(ClassMean, LabeledEpochOverloadMatchesSetPath) {
  const auto ds = small_dataset(12, 6, 3, 20);
  const auto a = class_mean_covariance(std::span<const LabeledEpoch>(ds.epochs), Label::one);
  const auto b = class_mean_covariance(covariance_set(ds), Label::one);
  EXPECT_EQ(a.matrix(), b.matrix());
}

TEST(Eegx, FileSizeOfSingleSmallEpoch) {
  SubjectDataset ds;
  ds.epochs.push_back({Epoch(Matrix::Ones(2, 3)), Label::one});
  const auto path = temp_path("one.eegx");
  save_subject(ds, path);
  EXPECT_EQ(std::filesystem::file_size(path), 46u);
  EXPECT_EQ(kEegxHeaderBytes + 1 + 6 * 4, 46u);
}

TEST(Eegx, RoundTripIsBitExact) {
  const auto ds = small_dataset(21, 5, 3, 7);
  const auto path = temp_path("rt.eegx");
  save_subject(ds, path);
  const auto loaded = load_subject(path);
  ASSERT_EQ(loaded.subject_id, ds.subject_id);
  ASSERT_EQ(loaded.epochs.size(), ds.epochs.size());
  for (std::size_t k = 0; k < ds.epochs.size(); ++k) {
    EXPECT_EQ(loaded.epochs[k].label, ds.epochs[k].label);
    EXPECT_EQ(loaded.epochs[k].epoch.data(), ds.epochs[k].epoch.data());
  }
  const auto path2 = temp_path("rt2.eegx");
  save_subject(loaded, path2);
  EXPECT_EQ(read_bytes(path), read_bytes(path2));
}

TEST(Eegx, BadMagicIsFormatError) {
  auto bytes = encode_subject(small_dataset(1, 2, 2, 2));
  bytes[0] = bytes[1] = bytes[2] = bytes[3] = 'X';
  EXPECT_EQ(error_kind([&] { decode_subject(bytes); }), ErrorKind::format);
  const auto path = temp_path("magic.eegx");
  write_bytes(path, bytes);
  EXPECT_EQ(error_kind([&] { load_subject(path); }), ErrorKind::format);
}

TEST(Eegx, BadVersionNamesOffset) {
  auto bytes = encode_subject(small_dataset(1, 2, 2, 2));
  bytes[4] = 9;
  try {
    decode_subject(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::format);
    EXPECT_NE(std::string(e.what()).find("offset 4"), std::string::npos) << e.what();
  }
}

TEST(Eegx, TruncationNamesOffset) {
  const auto full = encode_subject(small_dataset(2, 3, 2, 3));
  for (std::size_t cut : {std::size_t{3}, std::size_t{10}, kEegxHeaderBytes + 5, full.size() - 1}) {
    std::vector<std::uint8_t> bytes(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(cut));
    try {
      decode_subject(bytes);
      FAIL() << "cut " << cut;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::format);
      EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos) << e.what();
    }
  }
}

TEST(Eegx, BadLabelIsLabelError) {
  SubjectDataset ds;
  ds.epochs.push_back({Epoch(Matrix::Ones(2, 3)), Label::one});
  auto bytes = encode_subject(ds);
  bytes[kEegxHeaderBytes] = 2;
  EXPECT_EQ(error_kind([&] { decode_subject(bytes); }), ErrorKind::label);
}

TEST(Eegx, TrailingBytesRejected) {
  auto bytes = encode_subject(small_dataset(3, 2, 2, 2));
  bytes.push_back(0);
  EXPECT_EQ(error_kind([&] { decode_subject(bytes); }), ErrorKind::format);
}

TEST(Eegx, MissingFileIsIoError) {
  EXPECT_EQ(error_kind([] { load_subject(temp_path("does-not-exist.eegx")); }), ErrorKind::io);
}

TEST(Eegx, DirectoryLoadIsSortedByName) {
  const auto dir = temp_path("dir");
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto b = small_dataset(4, 2, 2, 2);
  b.subject_id = "B";
  auto a = small_dataset(5, 2, 2, 2);
  a.subject_id = "A";
  save_subject(b, dir / "b.eegx");
  save_subject(a, dir / "a.eegx");
  std::ofstream(dir / "notes.txt") << "ignored";
  const auto all = load_directory(dir);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].subject_id, "A");
  EXPECT_EQ(all[1].subject_id, "B");
}

TEST(Synthetic, ZeroDivergenceSharesMixing) {
  SynthConfig cfg;
  cfg.num_subjects = 4;
  cfg.channels = 5;
  cfg.samples = 10;
  cfg.epochs_per_class = 2;
  cfg.divergence = 0.0;
  const auto corpus = generate_synthetic(cfg);
  for (const auto& m : corpus.mixing) EXPECT_EQ(m, corpus.mixing.front());
  EXPECT_EQ(corpus.mixing.front(), corpus.base_mixing);
}

TEST(Synthetic, PositiveDivergenceSeparatesSubjects) {
  SynthConfig cfg;
  cfg.num_subjects = 3;
  cfg.channels = 6;
  cfg.samples = 10;
  cfg.epochs_per_class = 2;
  cfg.divergence = 0.3;
  const auto corpus = generate_synthetic(cfg);
  const double gap = (corpus.mixing[0] - corpus.mixing[1]).norm();
  EXPECT_GT(gap, 0.05);
  for (const auto& m : corpus.mixing) {
    EXPECT_LE((m.transpose() * m - Matrix::Identity(6, 6)).norm(), 1e-10);
  }
}

TEST(Synthetic, SameSeedIsBitIdentical) {
  SynthConfig cfg;
  cfg.num_subjects = 2;
  cfg.channels = 4;
  cfg.samples = 20;
  cfg.epochs_per_class = 3;
  const auto a = generate_synthetic(cfg);
  const auto b = generate_synthetic(cfg);
  for (std::size_t z = 0; z < 2; ++z) {
    EXPECT_EQ(encode_subject(a.subjects[z]), encode_subject(b.subjects[z]));
  }
  cfg.seed = 2;
  EXPECT_NE(encode_subject(generate_synthetic(cfg).subjects[0]), encode_subject(a.subjects[0]));
}

TEST(Synthetic, UnmixedClassCovarianceMatchesPlantedVariances) {
  SynthConfig cfg;
  cfg.num_subjects = 1;
  cfg.channels = 4;
  cfg.samples = 200;
  cfg.epochs_per_class = 100;
  cfg.sigma_hi = 4.0;
  cfg.sigma_lo = 1.0;
  cfg.noise_floor = 0.1;
  const auto corpus = generate_synthetic(cfg);
  const Matrix unmix = corpus.unmixing(0);
  Matrix mean = Matrix::Zero(4, 4);
  std::size_t n = 0;
  for (const auto& e : corpus.subjects[0].epochs) {
    if (e.label != Label::zero) continue;
    mean += epoch_covariance(e.epoch, false).matrix() / static_cast<double>(cfg.samples);
    ++n;
  }
  mean /= static_cast<double>(n);
  const Matrix latent = unmix * mean * unmix.transpose();
  const double expected[4] = {4.0, 1.0, 0.1, 0.1};
  for (Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(latent(i, i), expected[i], 0.15 * expected[i]) << "latent " << i;
  }
}

TEST(Synthetic, ClassMeansCommuteInUnmixedBasis) {
  SynthConfig cfg;
  cfg.num_subjects = 1;
  cfg.channels = 6;
  cfg.samples = 250;
  cfg.epochs_per_class = 100;
  cfg.divergence = 0.0;
  cfg.noise_floor = 0.0;
  const auto corpus = generate_synthetic(cfg);
  const auto set = covariance_set(corpus.subjects[0]);
  const Matrix a_inv = corpus.unmixing(0);
  for (Label l : {Label::zero, Label::one}) {
    const Matrix u = a_inv * class_mean_covariance(set, l).matrix() * a_inv.transpose();
    const Matrix off = u - Matrix(u.diagonal().asDiagonal());
    EXPECT_LE(off.norm() / u.norm(), 0.2);
  }
}

TEST(Synthetic, InvalidConfigs) {
  SynthConfig cfg;
  cfg.sigma_hi = 0.5;
  EXPECT_EQ(error_kind([&] { generate_synthetic(cfg); }), ErrorKind::config);
  cfg = {};
  cfg.channels = 1;
  EXPECT_EQ(error_kind([&] { generate_synthetic(cfg); }), ErrorKind::config);
  cfg = {};
  cfg.divergence = -1;
  EXPECT_EQ(error_kind([&] { generate_synthetic(cfg); }), ErrorKind::config);
  cfg = {};
  cfg.epochs_per_class = 0;
  EXPECT_EQ(error_kind([&] { generate_synthetic(cfg); }), ErrorKind::config);
}

TEST(Synthetic, TwoChannelCorpusIsAllowed) {
  SynthConfig cfg;
  cfg.num_subjects = 1;
  cfg.channels = 2;
  cfg.samples = 5;
  cfg.epochs_per_class = 1;
  EXPECT_EQ(generate_synthetic(cfg).subjects[0].channels(), 2);
}

}  // namespace
