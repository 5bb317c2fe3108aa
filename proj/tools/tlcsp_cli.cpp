// tlcsp: generate synthetic EEGX corpora, run the calibration benchmark, and
// evaluate single cells.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tlcsp/tlcsp.hpp"

namespace {

int cmd_gen(const tlcsp::SynthConfig& cfg, const std::string& out_dir) {
  const auto corpus = tlcsp::generate_synthetic(cfg);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw tlcsp::Error(tlcsp::ErrorKind::io, "cannot create " + out_dir + ": " + ec.message());
  for (const auto& subject : corpus.subjects) {
    const auto path = std::filesystem::path(out_dir) / (subject.subject_id + ".eegx");
    tlcsp::save_subject(subject, path);
    std::cout << path.string() << "\n";
  }
  return 0;
}

int cmd_run(const std::string& data_dir, const tlcsp::BenchConfig& cfg, const std::string& out,
            const std::string& summary) {
  const auto datasets = tlcsp::load_directory(data_dir);
  const auto table = tlcsp::run_benchmark(datasets, cfg);
  tlcsp::emit_csv(table, out);
  if (!summary.empty()) tlcsp::emit_csv(tlcsp::summarize(table), summary);
  std::cerr << "subjects: " << datasets.size() << ", records: " << table.records.size() << "\n";
  for (const auto& d : datasets) {
    std::cerr << "  " << d.subject_id << ": " << d.epochs.size() - cfg.pool_size
              << " test epochs\n";
  }
  return 0;
}

int cmd_eval(const std::string& data_dir, const std::string& target_id, const std::string& strategy,
             std::size_t m, tlcsp::BenchConfig cfg) {
  cfg.m_max = std::min(cfg.m_max, cfg.pool_size);
  cfg.validate();
  if (m > cfg.pool_size || m % 2 != 0) {
    throw tlcsp::Error(tlcsp::ErrorKind::config, "m must be even and at most the pool size");
  }
  const auto id = tlcsp::parse_strategy(strategy);
  const auto datasets = tlcsp::load_directory(data_dir);
  tlcsp::validate_corpus(datasets, cfg);

  std::size_t target = datasets.size();
  std::vector<tlcsp::CovarianceSet> sources;
  std::vector<std::string> ids;
  for (std::size_t s = 0; s < datasets.size(); ++s) {
    if (datasets[s].subject_id == target_id) {
      target = s;
    } else {
      sources.push_back(tlcsp::covariance_set(datasets[s]));
      ids.push_back(datasets[s].subject_id);
    }
  }
  if (target == datasets.size()) {
    throw tlcsp::Error(tlcsp::ErrorKind::config, "no subject with id '" + target_id + "'");
  }
  tlcsp::BenchConfig local = cfg;
  local.strategies = {id};
  const tlcsp::SourcePool pool(std::move(sources), std::move(ids), local);
  const auto target_set = tlcsp::covariance_set(datasets[target]);
  const auto split =
      tlcsp::draw_split(target_set, local.pool_size, tlcsp::cell_seed(local.base_seed, target, 0));
  const auto labeled = target_set.subset(std::span<const std::size_t>(split.pool.data(), m));
  const double acc =
      tlcsp::run_strategy(id, labeled, target_set.subset(split.test), pool, local);
  std::printf("%.6f\n", acc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transfer-learning enhanced CSP for two-class EEG"};
  app.require_subcommand(1);

  tlcsp::SynthConfig synth;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "write a synthetic multi-subject corpus");
  gen->add_option("--subjects", synth.num_subjects, "number of subjects")->capture_default_str();
  gen->add_option("--channels", synth.channels, "channels per epoch")->capture_default_str();
  gen->add_option("--samples", synth.samples, "samples per epoch")->capture_default_str();
  gen->add_option("--epochs-per-class", synth.epochs_per_class)->capture_default_str();
  gen->add_option("--sigma-hi", synth.sigma_hi, "high latent variance")->capture_default_str();
  gen->add_option("--sigma-lo", synth.sigma_lo, "low latent variance")->capture_default_str();
  gen->add_option("--divergence", synth.divergence, "subject rotation angle (rad)")
      ->capture_default_str();
  gen->add_option("--noise", synth.noise_floor, "non-discriminative latent variance")
      ->capture_default_str();
  gen->add_option("--seed", synth.seed)->capture_default_str();
  gen->add_option("--out", gen_out, "output directory")->required();

  tlcsp::BenchConfig bench;
  std::string data_dir, run_out, summary_out, strategies = "BL1,BL2,BL3,CM1,CM2,MA,IA";
  double kmm_tol = bench.kmm.tolerance;
  auto* run = app.add_subcommand("run", "run the incremental-calibration benchmark");
  run->add_option("--data", data_dir, "directory of .eegx files")->required();
  run->add_option("--strategies", strategies, "comma-separated strategy ids")->capture_default_str();
  run->add_option("--pool", bench.pool_size)->capture_default_str();
  run->add_option("--m-step", bench.m_step)->capture_default_str();
  run->add_option("--m-max", bench.m_max)->capture_default_str();
  run->add_option("--reps", bench.repetitions)->capture_default_str();
  run->add_option("--filters", bench.filters_per_class, "filters per class")->capture_default_str();
  run->add_option("--cm1-lambda", bench.cm1_lambda)->capture_default_str();
  run->add_option("--seed", bench.base_seed)->capture_default_str();
  run->add_option("--workers", bench.workers)->capture_default_str();
  run->add_option("--kmm-tol", kmm_tol, "relative stop tolerance of the KMM solver")
      ->capture_default_str();
  run->add_option("--out", run_out, "results CSV")->required();
  run->add_option("--summary", summary_out, "summary CSV");

  std::string eval_data, eval_target, eval_strategy;
  std::size_t eval_m = 0;
  auto* eval = app.add_subcommand("eval", "score one strategy on one target (repetition 0)");
  eval->add_option("--data", eval_data)->required();
  eval->add_option("--target", eval_target, "target subject id")->required();
  eval->add_option("--strategy", eval_strategy)->required();
  eval->add_option("--m", eval_m, "calibration epochs")->required();
  eval->add_option("--seed", bench.base_seed)->capture_default_str();
  eval->add_option("--pool", bench.pool_size)->capture_default_str();
  eval->add_option("--filters", bench.filters_per_class)->capture_default_str();
  eval->add_option("--cm1-lambda", bench.cm1_lambda)->capture_default_str();
  eval->add_option("--kmm-tol", kmm_tol)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    bench.kmm.tolerance = kmm_tol;
    if (gen->parsed()) return cmd_gen(synth, gen_out);
    if (run->parsed()) {
      bench.strategies = tlcsp::parse_strategy_list(strategies);
      return cmd_run(data_dir, bench, run_out, summary_out);
    }
    if (eval->parsed()) return cmd_eval(eval_data, eval_target, eval_strategy, eval_m, bench);
  } catch (const tlcsp::Error& e) {
    std::cerr << "tlcsp: " << e.what() << "\n";
    return tlcsp::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "tlcsp: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
