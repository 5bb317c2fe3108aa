#pragma once

// Incremental-calibration benchmark. Each subject in turn is the target and
// the others are sources. Per repetition a class-balanced calibration pool is
// drawn from the target; the rest is the test set. Calibration sets grow by
// prefixes of the interleaved pool (one epoch per class per step of 2), and
// every strategy is scored at every calibration size.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tlcsp/seeding.hpp"
#include "tlcsp/tl_covariance.hpp"
#include "tlcsp/tl_instance.hpp"
#include "tlcsp/tl_model.hpp"

namespace tlcsp {

enum class StrategyId { BL1, BL2, BL3, CM1, CM2, MA, IA };

inline constexpr std::array<StrategyId, 7> kAllStrategies = {
    StrategyId::BL1, StrategyId::BL2, StrategyId::BL3, StrategyId::CM1,
    StrategyId::CM2, StrategyId::MA,  StrategyId::IA};

inline std::string_view strategy_name(StrategyId id) {
  switch (id) {
    case StrategyId::BL1: return "BL1";
    case StrategyId::BL2: return "BL2";
    case StrategyId::BL3: return "BL3";
    case StrategyId::CM1: return "CM1";
    case StrategyId::CM2: return "CM2";
    case StrategyId::MA: return "MA";
    case StrategyId::IA: return "IA";
  }
  return "?";
}

inline StrategyId parse_strategy(std::string_view text) {
  for (auto id : kAllStrategies) {
    if (strategy_name(id) == text) return id;
  }
  throw Error(ErrorKind::config, "unknown strategy '" + std::string(text) + "'");
}

/// Comma-separated list, e.g. "BL1,IA".
inline std::vector<StrategyId> parse_strategy_list(std::string_view text) {
  std::vector<StrategyId> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto token = text.substr(start, comma == std::string_view::npos ? text.size() - start
                                                                           : comma - start);
    if (!token.empty()) {
      const auto id = parse_strategy(token);
      if (std::find(out.begin(), out.end(), id) != out.end()) {
        throw Error(ErrorKind::config, "strategy listed twice: " + std::string(token));
      }
      out.push_back(id);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw Error(ErrorKind::config, "empty strategy list");
  return out;
}

struct BenchConfig {
  std::size_t pool_size = 40;
  std::size_t m_step = 2;
  std::size_t m_max = 40;
  std::size_t repetitions = 30;
  int filters_per_class = kDefaultFiltersPerClass;
  std::uint64_t base_seed = 1;
  std::vector<StrategyId> strategies{kAllStrategies.begin(), kAllStrategies.end()};
  double cm1_lambda = 0.5;
  std::size_t workers = 1;
  /// The protocol solves one n x n KMM problem per cell and calibration size;
  /// a 1e-6 relative stop keeps that tractable at n in the thousands.
  KmmConfig kmm{.tolerance = 1e-6};

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::config, m); };
    if (pool_size == 0 || pool_size % 2 != 0) fail("pool size must be even and positive");
    if (m_step == 0 || m_step % 2 != 0) fail("m step must be even and positive");
    if (m_max > pool_size) fail("m max cannot exceed the pool size");
    if (repetitions == 0) fail("repetitions must be >= 1");
    if (filters_per_class < 1) fail("filters per class must be >= 1");
    if (strategies.empty()) fail("no strategies selected");
    if (!(cm1_lambda >= 0.0 && cm1_lambda <= 1.0)) fail("CM1 lambda must lie in [0, 1]");
    if (workers == 0) fail("workers must be >= 1");
  }

  std::vector<std::size_t> m_values() const {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m <= m_max; m += m_step) out.push_back(m);
    return out;
  }
};

struct ResultRecord {
  std::string subject;
  StrategyId strategy;
  std::size_t m;
  std::size_t rep;
  double accuracy;

  bool operator==(const ResultRecord&) const = default;
};

struct ResultTable {
  std::vector<ResultRecord> records;
};

struct SummaryRow {
  StrategyId strategy;
  std::size_t m;
  double mean;
  double std;
  std::size_t count;
};

/// Source-side data for one target subject. Everything here depends only on
/// the sources, so it is built once and shared by all cells of that target.
/// The CM2 subset-model cache is the one mutable member; its entries are pure
/// functions of the subset, so lookup order cannot change results.
class SourcePool {
 public:
  SourcePool(std::vector<CovarianceSet> sources, std::vector<std::string> ids,
             const BenchConfig& cfg)
      : sources_(std::move(sources)), ids_(std::move(ids)), filters_(cfg.filters_per_class) {
    if (sources_.empty()) throw Error(ErrorKind::config, "no source subjects");
    for (std::size_t z = 0; z < sources_.size(); ++z) {
      all_.append(sources_[z]);
      try {
        mean0_.push_back(class_mean_covariance(sources_[z], Label::zero));
        mean1_.push_back(class_mean_covariance(sources_[z], Label::one));
      } catch (const Error& e) {
        throw Error(e.kind(), "source subject " + ids_[z] + ": " + e.message());
      }
      pooled_.push_back(pooled_covariance(sources_[z]));
    }
    const auto wants = [&](StrategyId id) {
      return std::find(cfg.strategies.begin(), cfg.strategies.end(), id) != cfg.strategies.end();
    };
    if (wants(StrategyId::BL2)) bl2_ = train_csp_lda(all_, {}, filters_);
    if (wants(StrategyId::MA)) bank_ = train_source_models(sources_, filters_, ids_);
    if (wants(StrategyId::IA)) {
      reps_ = kmm_representations(all_);
      d_ss_ = detail::squared_distances(reps_);
    }
  }

  std::size_t num_sources() const { return sources_.size(); }
  const CovarianceSet& source(std::size_t z) const { return sources_[z]; }
  const CovarianceSet& all() const { return all_; }
  const SpatialCovariance& class_mean(std::size_t z, Label l) const {
    return l == Label::zero ? mean0_[z] : mean1_[z];
  }
  const std::vector<SpatialCovariance>& class_means(Label l) const {
    return l == Label::zero ? mean0_ : mean1_;
  }
  const std::vector<SpatialCovariance>& pooled() const { return pooled_; }
  const std::optional<CspLdaModel>& bl2_model() const { return bl2_; }
  const SourceModelBank& bank() const { return bank_; }
  const Matrix& reps() const { return reps_; }
  const Matrix& source_distances() const { return d_ss_; }
  int filters_per_class() const { return filters_; }

  CspLdaModel subset_model(const std::vector<std::size_t>& which) const {
    {
      std::lock_guard lock(mutex_);
      if (auto it = subset_cache_.find(which); it != subset_cache_.end()) return it->second;
    }
    CspLdaModel model = train_on_sources(sources_, which, filters_);
    std::lock_guard lock(mutex_);
    subset_cache_.emplace(which, model);
    return model;
  }

 private:
  std::vector<CovarianceSet> sources_;
  std::vector<std::string> ids_;
  int filters_;
  CovarianceSet all_;
  std::vector<SpatialCovariance> mean0_;
  std::vector<SpatialCovariance> mean1_;
  std::vector<SpatialCovariance> pooled_;
  std::optional<CspLdaModel> bl2_;
  SourceModelBank bank_;
  Matrix reps_;
  Matrix d_ss_;
  mutable std::mutex mutex_;
  mutable std::map<std::vector<std::size_t>, CspLdaModel> subset_cache_;
};

namespace detail {

inline SpatialCovariance zero_covariance(Index c) {
  return SpatialCovariance(Matrix::Zero(c, c), true);
}

inline double ensemble_accuracy(const SourceModelBank& bank, const EnsembleWeights& w,
                                const CovarianceSet& test) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    correct += ensemble_predict(bank, w, test.covs[i]).label == test.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

/// Covariance fusion shared by CM1 and CM2: fused class means feed CSP, and
/// LDA sees the same mixture, target epochs sharing (1 - lambda) and source z
/// epochs sharing lambda * share[z].
inline double fused_covariance_accuracy(const CovarianceSet& target, const CovarianceSet& test,
                                        const SourcePool& pool, double lambda,
                                        const std::vector<std::size_t>& used,
                                        const Vector& share, const SpatialCovariance& fused0,
                                        const SpatialCovariance& fused1) {
  CovarianceSet lda_set = target;
  std::vector<double> weights(target.size(),
                              target.empty() ? 0.0 : (1.0 - lambda) / static_cast<double>(target.size()));
  for (std::size_t k = 0; k < used.size(); ++k) {
    const auto& src = pool.source(used[k]);
    lda_set.append(src);
    weights.insert(weights.end(), src.size(),
                   lambda * share(static_cast<Index>(k)) / static_cast<double>(src.size()));
  }
  const CspLdaModel model =
      train_csp_lda(fused0, fused1, lda_set, weights, pool.filters_per_class());
  return accuracy(model, test);
}

inline double run_cm1(const CovarianceSet& target, const CovarianceSet& test,
                      const SourcePool& pool, double cm1_lambda) {
  const std::size_t z_count = pool.num_sources();
  const Index c = pool.all().channels();
  SourceAffinity affinity;
  Cm1Config cfg{cm1_lambda};
  if (target.empty()) {
    cfg.lambda = 1.0;
    affinity.alpha = Vector::Constant(static_cast<Index>(z_count), 1.0 / static_cast<double>(z_count));
    affinity.kl = Vector::Zero(static_cast<Index>(z_count));
  } else {
    affinity = cm1_affinities(pool.pooled(), pooled_covariance(target));
  }
  const auto target_mean = [&](Label l) {
    return target.empty() ? zero_covariance(c) : class_mean_covariance(target, l);
  };
  const auto fused0 = cm1_combine(target_mean(Label::zero), pool.class_means(Label::zero), affinity, cfg);
  const auto fused1 = cm1_combine(target_mean(Label::one), pool.class_means(Label::one), affinity, cfg);
  std::vector<std::size_t> used(z_count);
  for (std::size_t z = 0; z < z_count; ++z) used[z] = z;
  return fused_covariance_accuracy(target, test, pool, cfg.lambda, used, affinity.alpha, fused0,
                                   fused1);
}

inline double run_cm2(const CovarianceSet& target, const CovarianceSet& test,
                      const SourcePool& pool) {
  const std::size_t z_count = pool.num_sources();
  const Index c = pool.all().channels();
  std::vector<std::size_t> selected;
  double lambda = 1.0;
  if (target.count(Label::zero) >= 2 && target.count(Label::one) >= 2) {
    selected = select_subjects_greedy(target, z_count, [&](const std::vector<std::size_t>& which) {
      return pool.subset_model(which);
    });
    const double target_acc = pipeline_loo_accuracy(target, pool.filters_per_class());
    const double selected_acc = accuracy(pool.subset_model(selected), target);
    lambda = cm2_lambda(target_acc, selected_acc);
  } else {
    selected.resize(z_count);
    for (std::size_t z = 0; z < z_count; ++z) selected[z] = z;
  }
  std::vector<SpatialCovariance> sel0, sel1;
  for (auto z : selected) {
    sel0.push_back(pool.class_mean(z, Label::zero));
    sel1.push_back(pool.class_mean(z, Label::one));
  }
  const auto target_mean = [&](Label l) {
    return target.empty() ? zero_covariance(c) : class_mean_covariance(target, l);
  };
  const auto fused0 = cm2_combine(target_mean(Label::zero), sel0, lambda);
  const auto fused1 = cm2_combine(target_mean(Label::one), sel1, lambda);
  const Vector share =
      Vector::Constant(static_cast<Index>(selected.size()), 1.0 / static_cast<double>(selected.size()));
  return fused_covariance_accuracy(target, test, pool, lambda, selected, share, fused0, fused1);
}

inline Vector instance_weights(const CovarianceSet& target, const SourcePool& pool,
                               const KmmConfig& kmm) {
  const Index n = static_cast<Index>(pool.all().size());
  if (target.empty()) return Vector::Ones(n);
  const Matrix target_reps = kmm_representations(target);
  const Matrix d_st = squared_distances(pool.reps(), target_reps);
  double sigma = 0.0;
  if (kmm.bandwidth) {
    sigma = *kmm.bandwidth;
  } else {
    sigma = median_bandwidth(pool.source_distances(), d_st, squared_distances(target_reps));
  }
  return kmm_solve(pool.source_distances(), d_st, sigma, kmm).beta;
}

}  // namespace detail

/// Test accuracy of one strategy trained on `target_labeled` (m epochs) plus
/// the pool's sources.
inline double run_strategy(StrategyId id, const CovarianceSet& target_labeled,
                           const CovarianceSet& target_test, const SourcePool& pool,
                           const BenchConfig& cfg) {
  if (target_test.empty()) throw Error(ErrorKind::config, "empty target test set");
  const int f = cfg.filters_per_class;
  try {
    switch (id) {
      case StrategyId::BL1:
        // No calibration data: no model can be built, score chance.
        if (target_labeled.empty()) return kChanceAccuracy;
        return accuracy(train_csp_lda(target_labeled, {}, f), target_test);
      case StrategyId::BL2:
        if (pool.bl2_model()) return accuracy(*pool.bl2_model(), target_test);
        return accuracy(train_csp_lda(pool.all(), {}, f), target_test);
      case StrategyId::BL3:
        return accuracy(weighted_fused_training(target_labeled, pool.all(),
                                                Vector::Ones(static_cast<Index>(pool.all().size())), f),
                        target_test);
      case StrategyId::CM1:
        return detail::run_cm1(target_labeled, target_test, pool, cfg.cm1_lambda);
      case StrategyId::CM2:
        return detail::run_cm2(target_labeled, target_test, pool);
      case StrategyId::MA: {
        const SourceModelBank& bank = pool.bank();
        if (bank.size() != pool.num_sources()) {
          throw Error(ErrorKind::config, "source models were not prepared for MA");
        }
        const EnsembleWeights w =
            target_labeled.empty()
                ? uniform_weights(bank.size())
                : optimize_weights(prediction_matrix(bank, target_labeled),
                                   signed_labels(target_labeled.labels));
        return detail::ensemble_accuracy(bank, w, target_test);
      }
      case StrategyId::IA: {
        if (pool.reps().rows() == 0) {
          throw Error(ErrorKind::config, "source representations were not prepared for IA");
        }
        const Vector beta = detail::instance_weights(target_labeled, pool, cfg.kmm);
        return accuracy(weighted_fused_training(target_labeled, pool.all(), beta, f), target_test);
      }
    }
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(strategy_name(id)) + ": " + e.message());
  }
  return 0.0;
}

/// Convenience form over raw datasets: builds the source pool on the fly.
inline double run_strategy(StrategyId id, std::span<const LabeledEpoch> target_labeled,
                           std::span<const LabeledEpoch> target_test,
                           std::span<const SubjectDataset> sources, const BenchConfig& cfg) {
  std::vector<CovarianceSet> sets;
  std::vector<std::string> ids;
  for (const auto& s : sources) {
    sets.push_back(covariance_set(s));
    ids.push_back(s.subject_id);
  }
  BenchConfig local = cfg;
  local.strategies = {id};
  const SourcePool pool(std::move(sets), std::move(ids), local);
  return run_strategy(id, covariance_set(target_labeled), covariance_set(target_test), pool, local);
}

/// Calibration pool (interleaved class 0 / class 1, in draw order) and test
/// indices for one (subject, repetition) cell.
struct CellSplit {
  std::vector<std::size_t> pool;
  std::vector<std::size_t> test;
};

inline CellSplit draw_split(const CovarianceSet& subject, std::size_t pool_size,
                            std::uint64_t seed) {
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < subject.size(); ++i) by_class[index_of(subject.labels[i])].push_back(i);
  const std::size_t half = pool_size / 2;
  std::mt19937_64 rng(seed);
  for (auto& idx : by_class) {
    if (idx.size() < half) {
      throw Error(ErrorKind::config, "subject has " + std::to_string(idx.size()) +
                                         " epochs in a class, pool needs " + std::to_string(half));
    }
    // Fisher-Yates with raw engine output; std::shuffle is not portable.
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[rng() % i]);
    }
  }
  CellSplit split;
  for (std::size_t k = 0; k < half; ++k) {
    split.pool.push_back(by_class[0][k]);
    split.pool.push_back(by_class[1][k]);
  }
  for (int c = 0; c < 2; ++c) {
    split.test.insert(split.test.end(), by_class[c].begin() + static_cast<std::ptrdiff_t>(half),
                      by_class[c].end());
  }
  std::sort(split.test.begin(), split.test.end());
  if (split.test.empty()) throw Error(ErrorKind::config, "no epochs left for testing");
  return split;
}

inline std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t subject, std::size_t rep) {
  return mix_seed(base_seed, {static_cast<std::uint64_t>(subject), static_cast<std::uint64_t>(rep)});
}

/// Records for one (target, repetition) cell, ordered by m then strategy.
inline std::vector<ResultRecord> run_cell(const CovarianceSet& target, const std::string& target_id,
                                          std::size_t target_index, std::size_t rep,
                                          const SourcePool& pool, const BenchConfig& cfg) {
  const CellSplit split = draw_split(target, cfg.pool_size, cell_seed(cfg.base_seed, target_index, rep));
  const CovarianceSet test = target.subset(split.test);
  std::vector<ResultRecord> out;
  for (const std::size_t m : cfg.m_values()) {
    const CovarianceSet labeled =
        target.subset(std::span<const std::size_t>(split.pool.data(), m));
    for (const auto id : cfg.strategies) {
      out.push_back({target_id, id, m, rep, run_strategy(id, labeled, test, pool, cfg)});
    }
  }
  return out;
}

namespace detail {

/// Runs `task(i)` for i in [0, count) on `workers` threads; rethrows the
/// first failure in index order.
template <class Task>
void parallel_for(std::size_t count, std::size_t workers, Task&& task) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min(workers, count);
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

inline void validate_corpus(std::span<const SubjectDataset> datasets, const BenchConfig& cfg) {
  if (datasets.size() < 2) throw Error(ErrorKind::config, "benchmark needs at least 2 subjects");
  for (const auto& d : datasets) {
    d.validate();
    if (d.channels() != datasets.front().channels()) {
      throw Error(ErrorKind::config, "subject " + d.subject_id + " has a different channel count");
    }
    const std::size_t half = cfg.pool_size / 2;
    if (d.count(Label::zero) < half || d.count(Label::one) < half ||
        d.epochs.size() <= cfg.pool_size) {
      throw Error(ErrorKind::config, "subject " + d.subject_id +
                                         " has too few epochs for a pool of " +
                                         std::to_string(cfg.pool_size) + " plus a test set");
    }
  }
}

inline ResultTable run_benchmark(std::span<const SubjectDataset> datasets, const BenchConfig& cfg) {
  cfg.validate();
  validate_corpus(datasets, cfg);
  std::vector<CovarianceSet> sets(datasets.size());
  detail::parallel_for(datasets.size(), cfg.workers,
                       [&](std::size_t s) { sets[s] = covariance_set(datasets[s]); });

  ResultTable table;
  for (std::size_t target = 0; target < datasets.size(); ++target) {
    std::vector<CovarianceSet> sources;
    std::vector<std::string> ids;
    for (std::size_t z = 0; z < datasets.size(); ++z) {
      if (z == target) continue;
      sources.push_back(sets[z]);
      ids.push_back(datasets[z].subject_id);
    }
    const SourcePool pool(std::move(sources), std::move(ids), cfg);
    std::vector<std::vector<ResultRecord>> cells(cfg.repetitions);
    detail::parallel_for(cfg.repetitions, cfg.workers, [&](std::size_t rep) {
      cells[rep] = run_cell(sets[target], datasets[target].subject_id, target, rep, pool, cfg);
    });
    for (auto& cell : cells) {
      table.records.insert(table.records.end(), cell.begin(), cell.end());
    }
  }
  return table;
}

/// Mean and sample standard deviation per (strategy, m), strategies in first
/// appearance order and m ascending.
inline std::vector<SummaryRow> summarize(const ResultTable& table) {
  std::vector<StrategyId> order;
  std::map<std::pair<int, std::size_t>, std::vector<double>> groups;
  for (const auto& r : table.records) {
    if (std::find(order.begin(), order.end(), r.strategy) == order.end()) order.push_back(r.strategy);
    groups[{static_cast<int>(r.strategy), r.m}].push_back(r.accuracy);
  }
  std::vector<SummaryRow> rows;
  for (const auto id : order) {
    for (const auto& [key, values] : groups) {
      if (key.first != static_cast<int>(id)) continue;
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      const double sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
      rows.push_back({id, key.second, mean, sd, values.size()});
    }
  }
  return rows;
}

inline std::string format_results_csv(const ResultTable& table) {
  std::string out = "subject,strategy,m,rep,accuracy\n";
  char buf[64];
  for (const auto& r : table.records) {
    std::snprintf(buf, sizeof buf, ",%zu,%zu,%.6f\n", r.m, r.rep, r.accuracy);
    out += r.subject;
    out += ',';
    out += strategy_name(r.strategy);
    out += buf;
  }
  return out;
}

inline std::string format_summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "strategy,m,mean,std,count\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%zu,%.6f,%.6f,%zu\n", r.m, r.mean, r.std, r.count);
    out += strategy_name(r.strategy);
    out += buf;
  }
  return out;
}

inline ResultTable parse_results_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "subject,strategy,m,rep,accuracy") {
    throw Error(ErrorKind::format, "results CSV header mismatch");
  }
  ResultTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) {
      throw Error(ErrorKind::format, "results CSV line " + std::to_string(line_no) + " has " +
                                         std::to_string(fields.size()) + " fields");
    }
    try {
      table.records.push_back({fields[0], parse_strategy(fields[1]),
                               static_cast<std::size_t>(std::stoull(fields[2])),
                               static_cast<std::size_t>(std::stoull(fields[3])), std::stod(fields[4])});
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::format, "results CSV line " + std::to_string(line_no) + " is malformed");
    }
  }
  return table;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

inline void emit_csv(const ResultTable& table, const std::filesystem::path& path) {
  write_text(path, format_results_csv(table));
}

inline void emit_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  write_text(path, format_summary_csv(rows));
}

inline ResultTable read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_results_csv(ss.str());
}

}  // namespace tlcsp
