#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ctrlseq/seq.hpp"

namespace ctrlseq {

using Background = std::array<double, 4>;
inline constexpr Background kUniformBackground{0.25, 0.25, 0.25, 0.25};

// Position probability matrix, columns ordered A,C,G,T.
struct Ppm {
  std::string name;
  std::vector<std::array<double, 4>> columns;

  std::size_t width() const { return columns.size(); }
};

// JASPAR text: ">ID NAME" header, then rows "A [ n1 n2 ... ]" for A,C,G,T.
// Counts or probabilities; columns are normalized to sum to 1.
std::vector<Ppm> parse_jaspar(std::istream& in);

// Base-2 log-odds matrix derived from a PPM.
struct Pwm {
  std::string name;
  std::vector<std::array<double, 4>> columns;
  double min_score = 0;
  double max_score = 0;

  std::size_t width() const { return columns.size(); }
  // strand '+' scores the window as-is, '-' scores its reverse complement.
  double score(const Sequence& seq, std::size_t pos, char strand) const;
};

// entry(i,b) = log2((p(i,b) + pseudocount*bg(b)) / ((1+pseudocount)*bg(b))).
Pwm ppm_to_pwm(const Ppm& ppm, const Background& bg = kUniformBackground,
               double pseudocount = 0.01);

// Exact null distribution of the discretized window score under the
// background model; tail sums give p-values.
struct ScorePValueTable {
  double bin_width = 0;
  // per-column integer scores, floor((entry - column_min) / bin_width)
  std::vector<std::array<int, 4>> int_columns;
  int max_int = 0;
  std::vector<double> tail;  // tail[s] = P(int score >= s), size max_int + 2

  int int_score(const Sequence& seq, std::size_t pos, char strand) const;
  double p_value(int s) const;
};

ScorePValueTable build_pvalue_table(const Pwm& pwm,
                                    const Background& bg = kUniformBackground,
                                    int bins = 1000);

struct MotifHit {
  std::string motif_name;
  std::size_t position = 0;  // 0-based offset on the forward strand
  char strand = '+';
  double score = 0;
  double p_value = 1;
};

// Slides the PWM over every offset on both strands; keeps hits with
// p_value < p_threshold, sorted by position then strand (+ before -).
std::vector<MotifHit> scan(const Sequence& seq, const Pwm& pwm,
                           const ScorePValueTable& table, double p_threshold);

// Step-up Benjamini-Hochberg, results restored to input order.
std::vector<double> bh_qvalues(const std::vector<double>& p_values);

// PWM plus its p-value table; the unit of the engine's motif list.
struct ScoredMotif {
  Ppm ppm;
  Pwm pwm;
  ScorePValueTable table;
};

ScoredMotif make_scored_motif(Ppm ppm,
                              const Background& bg = kUniformBackground,
                              double pseudocount = 0.01, int bins = 1000);

struct FrequencyVector {
  std::vector<std::string> motif_names;
  std::vector<double> values;
};

// value[m] = total hit count of motif m across sequences / #sequences.
FrequencyVector frequency_vector(std::span<const Sequence> sequences,
                                 std::span<const ScoredMotif> motifs,
                                 double p_threshold);

// Pearson r in [-1,1]; a constant vector yields 0 and sets *zero_variance.
double pearson(std::span<const double> a, std::span<const double> b,
               bool* zero_variance = nullptr);
double pearson(const FrequencyVector& a, const FrequencyVector& b,
               bool* zero_variance = nullptr);

// Linear-interpolation quantile of unsorted values, percentile in [0,100].
double percentile_value(std::vector<double> values, double percentile);

// Selects records with target fitness >= its `percentile` quantile and every
// off-target fitness <= its (100 - percentile) quantile, then computes the
// frequency vector over the selection.
FrequencyVector reference_frequency(const FitnessTable& table,
                                    const std::string& target,
                                    std::span<const std::string> off_targets,
                                    std::span<const ScoredMotif> motifs,
                                    double p_threshold,
                                    double percentile = 50.0);

}  // namespace ctrlseq
