#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ctrlseq/motif.hpp"
#include "ctrlseq/seq.hpp"

namespace ctrlseq {

// The engine's fixed motif list; oracles and frequency vectors index into it.
struct MotifSet {
  std::vector<ScoredMotif> motifs;

  std::vector<std::string> names() const;
  std::size_t index_of(const std::string& name) const;  // ConfigError if absent
};

MotifSet load_motif_set(std::istream& jaspar,
                        const Background& bg = kUniformBackground,
                        double pseudocount = 0.01, int bins = 1000);

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual double eval(const Sequence& x) const = 0;
};

// logistic(bias + sum_m weight[m] * hitcount_m(x)); output in (0,1).
class MotifOracle : public Oracle {
 public:
  MotifOracle(const MotifSet* set, std::vector<double> weights, double bias,
              double p_threshold);
  double eval(const Sequence& x) const override;

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  double p_threshold() const { return p_threshold_; }

 private:
  const MotifSet* set_;
  std::vector<double> weights_;  // aligned with set_->motifs
  double bias_;
  double p_threshold_;
};

// Ridge-regression surrogate on k-mer count features, clamped to [0,1].
class KmerOracle : public Oracle {
 public:
  KmerOracle(int k, std::vector<double> weights, double intercept,
             double ridge);
  double eval(const Sequence& x) const override;

  int k() const { return k_; }
  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  double ridge() const { return ridge_; }

  // Unclamped linear prediction, used by the fit tests.
  double predict_raw(const Sequence& x) const;

  static std::vector<double> kmer_counts(const Sequence& x, int k);

 private:
  int k_;
  std::vector<double> weights_;  // 4^k, lexicographic in base codes
  double intercept_;
  double ridge_;
};

// Normal-equation ridge fit of fitness[label] on k-mer counts; the intercept
// is unpenalized. Throws SingularSystem when ridge = 0 and the features are
// rank deficient.
KmerOracle fit_kmer_oracle(const FitnessTable& table, const std::string& label,
                           int k, double ridge);

// Reward roles and thresholds; label 0 is the target cell type.
struct RewardSpec {
  std::vector<std::string> labels;
  std::vector<double> deltas;  // size labels.size() - 1
  bool tfbs_enabled = false;
};

// Oracles R_0..R_m plus the optional TFBS-correlation reward R_{m+1}.
struct RewardSuite {
  std::vector<std::string> labels;  // index 0 = target
  std::vector<std::unique_ptr<Oracle>> oracles;
  const MotifSet* motif_set = nullptr;
  FrequencyVector q_real;
  bool tfbs_enabled = false;
  double tfbs_p_threshold = 1e-4;

  int m() const { return static_cast<int>(oracles.size()) - 1; }
  int reward_dim() const {
    return static_cast<int>(oracles.size()) + (tfbs_enabled ? 1 : 0);
  }

  // One row [R_0..R_m(,R_TFBS)] per sequence. R_TFBS correlates the single
  // sequence's motif counts against q_real; zero variance maps to 0.
  std::vector<std::vector<double>> evaluate(
      std::span<const Sequence> batch) const;
};

// JSON oracle definitions:
//   {"kind":"motif","label":..,"bias":..,"p_threshold":..,"weights":{name:w}}
//   {"kind":"kmer","label":..,"k":..,"intercept":..,"ridge":..,"weights":[..]}
std::string oracle_to_json(const Oracle& oracle, const std::string& label,
                           const MotifSet* set);
std::unique_ptr<Oracle> oracle_from_json(const std::string& text,
                                         std::string* label,
                                         const MotifSet* set);

}  // namespace ctrlseq
