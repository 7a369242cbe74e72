#include "ctrlseq/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ctrlseq/error.hpp"

namespace ctrlseq {

double metric_delta_r(const std::vector<std::vector<double>>& fitness) {
  if (fitness.empty()) throw EmptyInput("no reward rows");
  const std::size_t cols = fitness[0].size();
  if (cols < 2) throw NoConstraints("delta_r needs at least one off-target");
  double total = 0;
  for (const auto& row : fitness) {
    if (row.size() != cols) throw ShapeMismatch("ragged reward matrix");
    double off = 0;
    for (std::size_t i = 1; i < cols; ++i) off += row[i];
    total += row[0] - off / static_cast<double>(cols - 1);
  }
  return total / static_cast<double>(fitness.size());
}

double metric_diversity(std::span<const Sequence> batch) {
  if (batch.empty()) throw EmptyBatch("diversity of empty batch");
  const std::size_t length = batch[0].length();
  for (const auto& s : batch) {
    if (s.length() != length) throw ShapeMismatch("unequal sequence lengths");
  }
  double total_bits = 0;
  for (std::size_t t = 0; t < length; ++t) {
    std::array<double, 4> counts{};
    for (const auto& s : batch) counts[s[t]] += 1.0;
    double h = 0;
    for (double c : counts) {
      if (c > 0) {
        double p = c / static_cast<double>(batch.size());
        h -= p * std::log2(p);
      }
    }
    total_bits += h;
  }
  return total_bits / static_cast<double>(length);
}

double metric_motif_correlation(std::span<const Sequence> batch,
                                const FrequencyVector& q_real,
                                std::span<const ScoredMotif> motifs,
                                double p_threshold, bool* zero_variance) {
  auto q_gen = frequency_vector(batch, motifs, p_threshold);
  return pearson(q_gen, q_real, zero_variance);
}

double metric_median(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("median of empty list");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json medians = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    medians[labels[i]] = median_reward[i];
  }
  j["median"] = medians;
  j["delta_r"] = delta_r;
  j["motif_correlation"] = motif_correlation;
  j["diversity_bits"] = diversity_bits;
  j["n_sequences"] = n_sequences;
  return j.dump();
}

}  // namespace ctrlseq
