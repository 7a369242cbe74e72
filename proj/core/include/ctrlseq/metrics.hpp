#pragma once

#include <span>
#include <string>
#include <vector>

#include "ctrlseq/motif.hpp"
#include "ctrlseq/seq.hpp"

namespace ctrlseq {

// Mean over sequences of (R_0 - mean of off-target fitness). Rows are
// sequences, columns [target, constraint_1..constraint_m].
double metric_delta_r(const std::vector<std::vector<double>>& fitness);

// Mean per-position Shannon entropy of the batch, in bits (max 2.0).
double metric_diversity(std::span<const Sequence> batch);

// Batch-level q_gen against q_real; zero variance maps to 0 with a flag.
double metric_motif_correlation(std::span<const Sequence> batch,
                                const FrequencyVector& q_real,
                                std::span<const ScoredMotif> motifs,
                                double p_threshold,
                                bool* zero_variance = nullptr);

// Midpoint median (average of the two central order statistics).
double metric_median(std::span<const double> values);

struct MetricsReport {
  std::vector<std::string> labels;
  std::vector<double> median_reward;  // per objective, aligned with labels
  double delta_r = 0;
  double motif_correlation = 0;
  double diversity_bits = 0;
  std::size_t n_sequences = 0;

  std::string to_json() const;
};

}  // namespace ctrlseq
