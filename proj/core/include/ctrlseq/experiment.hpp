#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctrlseq/metrics.hpp"
#include "ctrlseq/rewards.hpp"
#include "ctrlseq/trainer.hpp"

namespace ctrlseq {

struct ExperimentPaths {
  std::string motifs;      // JASPAR motif file; required when motif oracles
                           // or the TFBS reward are configured
  std::string corpus;      // reference FASTA for the MLE prior fit
  std::string fitness;     // fitness TSV backing the q_real selection
  std::string oracles;     // JSONL, one oracle definition per line
  std::string ref_policy;  // optional pre-fit policy checkpoint
  std::string output;      // run directory
};

struct MetricOptions {
  double percentile = 50.0;     // reference selection quantile
  double p_threshold = 1e-4;    // scan threshold for hits
  double ref_pseudocount = 1.0; // smoothing for the MLE prior
  int pvalue_bins = 1000;
};

struct ExperimentConfig {
  ExperimentPaths paths;
  RewardSpec rewards;
  TrainerConfig trainer;
  MetricOptions metrics;
};

// Strict parse: unknown keys at any level are a ConfigError.
ExperimentConfig experiment_config_from_json(const std::string& text);

// Reads the file and applies the CTRLSEQ_SEED override when set.
ExperimentConfig load_experiment_config(const std::string& path);

// Everything the trainer needs, resolved from the config's input files.
struct LoadedExperiment {
  std::unique_ptr<MotifSet> motif_set;  // null when no motif file configured
  RewardSuite suite;
  std::optional<Policy> ref;
};

LoadedExperiment load_experiment(const ExperimentConfig& config);

MetricsReport compute_metrics(const ExperimentConfig& config,
                              const LoadedExperiment& loaded,
                              std::span<const Sequence> batch);

// Full training run into `out_dir`: report.jsonl, final.fasta, metrics.json,
// checkpoint.json. The directory must not already exist.
MetricsReport run_single(const ExperimentConfig& config,
                         const LoadedExperiment& loaded,
                         const std::string& out_dir, std::uint64_t seed);

// Entry point behind `train`: one run, or `seeds` replicas in seed_<i>
// subdirectories plus an aggregate metrics.json with per-metric mean and sd.
void run_experiment(const ExperimentConfig& config, int seeds = 1,
                    bool force = false);

std::string read_text_file(const std::string& path);    // IoError on failure
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ctrlseq
