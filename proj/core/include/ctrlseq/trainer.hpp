#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ctrlseq/policy.hpp"
#include "ctrlseq/rewards.hpp"
#include "ctrlseq/seq.hpp"

namespace ctrlseq {

using RewardMatrix = std::vector<std::vector<double>>;  // rows = sequences

enum class Variant { ctrl_dna, ctrl_dna_log, ctrl_dna_ipo, unconstrained };

Variant variant_from_string(const std::string& name);
std::string variant_to_string(Variant v);

struct LagrangeState {
  std::vector<double> lambdas;        // constraint multipliers, in [0,1]
  double lambda_tfbs = 0.0;           // in [0, lambda_max_tfbs]
  std::vector<double> eta_lambda;     // per-constraint learning rates
  double eta_lambda_tfbs = 3e-4;
  double lambda_max_tfbs = 0.1;

  static LagrangeState make(int m, double eta, double lambda_max);
};

struct ReplayEntry {
  Sequence sequence;
  std::vector<double> rewards;              // full reward row at push time
  std::vector<double> logp_old;             // behavior log-probs
  std::vector<std::uint32_t> contexts;
};

// Bounded FIFO; sampling is without replacement and deterministic given rng.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(ReplayEntry entry);
  std::vector<ReplayEntry> sample(std::size_t n, std::mt19937_64& rng) const;

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<ReplayEntry>& entries() const { return entries_; }
  void restore(std::deque<ReplayEntry> entries);

 private:
  std::size_t capacity_;
  std::deque<ReplayEntry> entries_;
};

struct TrainerConfig {
  int batch_size = 256;
  int epochs = 100;
  double eta_theta = 1e-4;
  double eta_lambda = 3e-4;
  double beta = 0.2;        // KL coefficient
  double epsilon = 0.2;     // surrogate clip
  std::vector<double> deltas;
  double delta_tfbs = 1.0;  // correlation target; keeps the TFBS term active
  double lambda_max = 0.1;
  int order = 4;
  int length = 0;
  std::uint64_t seed = 0;
  Variant variant = Variant::ctrl_dna;
  double ipo_t = 50.0;
  double log_c1 = 1e-8;
  int replay_batch = 24;
  int replay_capacity = -1;  // -1 -> 10 * batch_size
  int inner_updates = 1;
  bool use_adam = false;
  bool positive_constraint_sign = false;  // add (not subtract) constraint
                                          // advantages, for ablation runs
  bool replay_in_surrogate = true;  // replay joins the loss, not just stats

  std::size_t effective_capacity() const {
    return replay_capacity < 0 ? std::size_t(10) * batch_size
                               : std::size_t(replay_capacity);
  }
  void validate(int num_constraints) const;
};

struct TrainStepReport {
  std::int64_t step = 0;
  std::vector<double> mean_reward;    // per objective, merged batch
  std::vector<double> median_reward;
  std::vector<double> lambdas;
  double lambda_tfbs = 0;
  double alpha0 = 1;
  std::vector<double> violations;     // mean R_i - delta_i per constraint
  double adv_mean = 0;
  double adv_sd = 0;
  double diversity_bits = 0;
  bool infeasible = false;            // interior-point barrier hit

  std::string to_json_line() const;
};

// Column-wise (x - mean) / population sd; degenerate columns become zeros.
RewardMatrix normalize_advantages(const RewardMatrix& rewards);

// min(1, m - sum lambda_i); the TFBS multiplier is excluded from the sum.
double main_coefficient(const LagrangeState& lag, int m);

// Lagrangian advantage per sequence. Constraint columns enter negated so a
// high off-target advantage lowers the mix; `positive_constraint_sign`
// flips them to enter positively, for ablation runs. The TFBS column, when
// present, is a maximize-type constraint and always enters positively.
std::vector<double> mixed_advantage(const RewardMatrix& advantages,
                                    const LagrangeState& lag, int m,
                                    bool has_tfbs, bool positive_constraint_sign = false);

// Dual ascent on violations: lambda_i <- clip(lambda_i + eta*(mean R_i -
// delta_i), 0, 1); the TFBS constraint is a lower bound, so its violation is
// delta_tfbs - mean R_TFBS, clipped to [0, lambda_max].
void update_multipliers(LagrangeState& lag, const RewardMatrix& rewards,
                        std::span<const double> deltas, double delta_tfbs,
                        bool has_tfbs);

// R_log(X) = R_0 + sum_i ln(max(delta_i - R_i, c1)) per row.
std::vector<double> ctrl_dna_log_rewards(const RewardMatrix& rewards,
                                         std::span<const double> deltas,
                                         double c1);

// (1/t) ln(delta - j_hat) when feasible; a large finite penalty otherwise.
double ipo_penalty(double j_hat, double delta, double t,
                   bool* infeasible = nullptr);

struct TrainerState {
  Policy policy;
  Policy ref;
  LagrangeState lag;
  ReplayBuffer buffer;
  AdamState adam;
  std::mt19937_64 rng;
  std::int64_t step = 0;

  TrainerState(Policy policy_, Policy ref_, LagrangeState lag_,
               std::size_t buffer_capacity, std::uint64_t seed);
};

TrainerState make_trainer_state(const TrainerConfig& config,
                                const RewardSuite& suite, const Policy& ref);

// One full iteration: sample, score, replay-merge, normalize, mix, update
// policy and multipliers, report. `out_batch`, when given, receives the
// sequences sampled this round.
TrainStepReport train_step(TrainerState& state, const RewardSuite& suite,
                           const TrainerConfig& config,
                           std::vector<Sequence>* out_batch = nullptr);

// Full run checkpoint; save/load round-trips bit-exactly.
std::string trainer_state_to_json(const TrainerState& state);
TrainerState trainer_state_from_json(const std::string& text);

}  // namespace ctrlseq
