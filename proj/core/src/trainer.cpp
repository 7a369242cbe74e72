#include "ctrlseq/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ctrlseq/error.hpp"
#include "ctrlseq/metrics.hpp"

namespace ctrlseq {

Variant variant_from_string(const std::string& name) {
  if (name == "ctrl_dna") return Variant::ctrl_dna;
  if (name == "ctrl_dna_log") return Variant::ctrl_dna_log;
  if (name == "ctrl_dna_ipo") return Variant::ctrl_dna_ipo;
  if (name == "unconstrained") return Variant::unconstrained;
  throw ConfigError("unknown variant '" + name + "'");
}

std::string variant_to_string(Variant v) {
  switch (v) {
    case Variant::ctrl_dna: return "ctrl_dna";
    case Variant::ctrl_dna_log: return "ctrl_dna_log";
    case Variant::ctrl_dna_ipo: return "ctrl_dna_ipo";
    case Variant::unconstrained: return "unconstrained";
  }
  throw ConfigError("bad variant value");
}

LagrangeState LagrangeState::make(int m, double eta, double lambda_max) {
  if (m < 0) throw ConfigError("negative constraint count");
  if (eta <= 0) throw ConfigError("multiplier learning rate must be positive");
  if (!(lambda_max >= 0 && lambda_max <= 1)) {
    throw ConfigError("lambda_max must be in [0,1]");
  }
  LagrangeState lag;
  lag.lambdas.assign(m, 0.0);
  lag.eta_lambda.assign(m, eta);
  lag.eta_lambda_tfbs = eta;
  lag.lambda_max_tfbs = lambda_max;
  return lag;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayBuffer::push(ReplayEntry entry) {
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(std::move(entry));
}

std::vector<ReplayEntry> ReplayBuffer::sample(std::size_t n,
                                              std::mt19937_64& rng) const {
  std::size_t take = std::min(n, entries_.size());
  std::vector<ReplayEntry> out;
  if (take == 0) return out;
  std::vector<std::size_t> idx(entries_.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t j = i + rng() % (idx.size() - i);
    std::swap(idx[i], idx[j]);
    out.push_back(entries_[idx[i]]);
  }
  return out;
}

void ReplayBuffer::restore(std::deque<ReplayEntry> entries) {
  if (entries.size() > capacity_) throw ConfigError("buffer overflows capacity");
  entries_ = std::move(entries);
}

void TrainerConfig::validate(int num_constraints) const {
  if (batch_size < 2) throw ConfigError("batch size must be >= 2");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (length < 1) throw ConfigError("sequence length must be >= 1");
  if (!(epsilon > 0 && epsilon < 1)) throw ConfigError("epsilon must be in (0,1)");
  if (beta < 0) throw ConfigError("beta must be >= 0");
  if (eta_theta <= 0) throw ConfigError("eta_theta must be positive");
  if (eta_lambda <= 0) throw ConfigError("eta_lambda must be positive");
  if (replay_batch < 0) throw ConfigError("replay batch must be >= 0");
  if (inner_updates < 1) throw ConfigError("inner updates must be >= 1");
  if (ipo_t <= 0) throw ConfigError("ipo_t must be positive");
  if (log_c1 <= 0) throw ConfigError("log_c1 must be positive");
  if (static_cast<int>(deltas.size()) != num_constraints) {
    throw ConfigError("one delta threshold required per constraint label");
  }
}

RewardMatrix normalize_advantages(const RewardMatrix& rewards) {
  if (rewards.size() < 2) throw EmptyInput("batch statistics need >= 2 rows");
  const std::size_t cols = rewards[0].size();
  const double n = static_cast<double>(rewards.size());
  RewardMatrix out(rewards.size(), std::vector<double>(cols, 0.0));
  for (std::size_t c = 0; c < cols; ++c) {
    double mean = 0;
    for (const auto& row : rewards) {
      if (row.size() != cols) throw ShapeMismatch("ragged reward matrix");
      mean += row[c];
    }
    mean /= n;
    double var = 0;
    for (const auto& row : rewards) {
      double d = row[c] - mean;
      var += d * d;
    }
    double sd = std::sqrt(var / n);  // population sd
    if (sd < 1e-8) continue;        // degenerate column stays zero
    for (std::size_t r = 0; r < rewards.size(); ++r) {
      out[r][c] = (rewards[r][c] - mean) / sd;
    }
  }
  return out;
}

double main_coefficient(const LagrangeState& lag, int m) {
  if (m == 0) return 1.0;  // unconstrained reduction
  double sum = std::accumulate(lag.lambdas.begin(), lag.lambdas.end(), 0.0);
  return std::min(1.0, static_cast<double>(m) - sum);
}

std::vector<double> mixed_advantage(const RewardMatrix& advantages,
                                    const LagrangeState& lag, int m,
                                    bool has_tfbs, bool positive_constraint_sign) {
  const std::size_t cols = static_cast<std::size_t>(m) + 1 + (has_tfbs ? 1 : 0);
  if (static_cast<int>(lag.lambdas.size()) != m) {
    throw ShapeMismatch("multiplier count does not match constraints");
  }
  double alpha0 = main_coefficient(lag, m);
  double constraint_sign = positive_constraint_sign ? 1.0 : -1.0;
  std::vector<double> mixed;
  mixed.reserve(advantages.size());
  for (const auto& row : advantages) {
    if (row.size() != cols) throw ShapeMismatch("advantage row width mismatch");
    double a = alpha0 * row[0];
    for (int i = 0; i < m; ++i) {
      a += constraint_sign * lag.lambdas[i] * row[i + 1];
    }
    if (has_tfbs) a += lag.lambda_tfbs * row[m + 1];
    mixed.push_back(a);
  }
  return mixed;
}

void update_multipliers(LagrangeState& lag, const RewardMatrix& rewards,
                        std::span<const double> deltas, double delta_tfbs,
                        bool has_tfbs) {
  if (rewards.empty()) throw EmptyInput("no reward rows");
  const int m = static_cast<int>(lag.lambdas.size());
  if (deltas.size() != static_cast<std::size_t>(m)) {
    throw ShapeMismatch("delta count does not match multipliers");
  }
  const double n = static_cast<double>(rewards.size());
  for (int i = 0; i < m; ++i) {
    double mean = 0;
    for (const auto& row : rewards) mean += row[i + 1];
    mean /= n;
    lag.lambdas[i] = std::clamp(
        lag.lambdas[i] + lag.eta_lambda[i] * (mean - deltas[i]), 0.0, 1.0);
  }
  if (has_tfbs) {
    double mean = 0;
    for (const auto& row : rewards) mean += row[m + 1];
    mean /= n;
    lag.lambda_tfbs =
        std::clamp(lag.lambda_tfbs + lag.eta_lambda_tfbs * (delta_tfbs - mean),
                   0.0, lag.lambda_max_tfbs);
  }
}

std::vector<double> ctrl_dna_log_rewards(const RewardMatrix& rewards,
                                         std::span<const double> deltas,
                                         double c1) {
  if (c1 <= 0) throw ConfigError("c1 must be positive");
  std::vector<double> out;
  out.reserve(rewards.size());
  for (const auto& row : rewards) {
    if (row.size() < deltas.size() + 1) {
      throw ShapeMismatch("reward row narrower than constraint list");
    }
    double r = row[0];
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      r += std::log(std::max(deltas[i] - row[i + 1], c1));
    }
    out.push_back(r);
  }
  return out;
}

double ipo_penalty(double j_hat, double delta, double t, bool* infeasible) {
  if (t <= 0) throw ConfigError("barrier sharpness t must be positive");
  if (infeasible) *infeasible = false;
  if (j_hat < delta) return std::log(delta - j_hat) / t;
  if (infeasible) *infeasible = true;
  return -1e3 / t;
}

TrainerState::TrainerState(Policy policy_, Policy ref_, LagrangeState lag_,
                           std::size_t buffer_capacity, std::uint64_t seed)
    : policy(std::move(policy_)),
      ref(std::move(ref_)),
      lag(std::move(lag_)),
      buffer(buffer_capacity),
      rng(seed) {}

TrainerState make_trainer_state(const TrainerConfig& config,
                                const RewardSuite& suite, const Policy& ref) {
  config.validate(suite.m());
  LagrangeState lag =
      LagrangeState::make(suite.m(), config.eta_lambda, config.lambda_max);
  return TrainerState(ref, ref, std::move(lag), config.effective_capacity(),
                      config.seed);
}

namespace {

void check_finite_rows(const RewardMatrix& rewards) {
  for (const auto& row : rewards) {
    for (double v : row) {
      if (!std::isfinite(v)) throw NonFiniteState("non-finite reward");
    }
  }
}

std::vector<double> column(const RewardMatrix& m, std::size_t c) {
  std::vector<double> out;
  out.reserve(m.size());
  for (const auto& row : m) out.push_back(row[c]);
  return out;
}

}  // namespace

TrainStepReport train_step(TrainerState& state, const RewardSuite& suite,
                           const TrainerConfig& config,
                           std::vector<Sequence>* out_batch) {
  config.validate(suite.m());
  const int m = suite.m();
  const bool has_tfbs = suite.tfbs_enabled;
  if (has_tfbs && config.variant == Variant::ctrl_dna_log) {
    throw ConfigError("the log-barrier variant does not take a TFBS column");
  }

  // pi_old = pi_theta: behavior log-probs are recorded at sampling time.
  SampledBatch batch = sample_batch(state.policy, config.batch_size,
                                    config.length, state.rng);
  RewardMatrix current_rewards = suite.evaluate(batch.sequences);
  check_finite_rows(current_rewards);

  // Merge replayed entries; statistics run over the merged set.
  std::vector<ReplayEntry> replayed =
      state.buffer.sample(static_cast<std::size_t>(config.replay_batch),
                          state.rng);
  SampledBatch merged = batch;
  RewardMatrix merged_rewards = current_rewards;
  for (auto& entry : replayed) {
    if (entry.rewards.size() != current_rewards[0].size()) {
      throw ShapeMismatch("stale replay entry has a different reward layout");
    }
    merged.sequences.push_back(entry.sequence);
    merged.logp_old.push_back(entry.logp_old);
    merged.contexts.push_back(entry.contexts);
    merged_rewards.push_back(entry.rewards);
  }

  RewardMatrix advantages = normalize_advantages(merged_rewards);

  std::vector<double> mixed;
  std::vector<double> extra_coef;
  bool infeasible = false;
  const Policy* kl_ref = &state.ref;
  Policy old_policy = state.policy;  // KL anchor for the interior-point variant

  switch (config.variant) {
    case Variant::ctrl_dna:
      mixed = mixed_advantage(advantages, state.lag, m, has_tfbs,
                              config.positive_constraint_sign);
      break;
    case Variant::unconstrained:
      mixed = column(advantages, 0);
      break;
    case Variant::ctrl_dna_log: {
      RewardMatrix log_col(merged_rewards.size(), std::vector<double>(1));
      auto r_log =
          ctrl_dna_log_rewards(merged_rewards, config.deltas, config.log_c1);
      for (std::size_t i = 0; i < r_log.size(); ++i) log_col[i][0] = r_log[i];
      mixed = column(normalize_advantages(log_col), 0);
      break;
    }
    case Variant::ctrl_dna_ipo: {
      mixed = column(advantages, 0);
      kl_ref = &old_policy;
      // Barrier gradient flows through the constraint estimates J_hat_i via
      // the score function; phi' vanishes on the infeasible plateau.
      extra_coef.assign(merged.size(), 0.0);
      const double n = static_cast<double>(merged_rewards.size());
      for (int i = 0; i < m; ++i) {
        double j_hat = 0;
        for (const auto& row : merged_rewards) j_hat += row[i + 1];
        j_hat /= n;
        bool bad = false;
        ipo_penalty(j_hat, config.deltas[i], config.ipo_t, &bad);
        infeasible = infeasible || bad;
        if (bad) continue;
        double dphi = -1.0 / (config.ipo_t * (config.deltas[i] - j_hat));
        for (std::size_t j = 0; j < merged.size(); ++j) {
          extra_coef[j] -= dphi * merged_rewards[j][i + 1];
        }
      }
      break;
    }
  }

  // The just-sampled batch enters the buffer after advantage computation.
  for (std::size_t j = 0; j < batch.size(); ++j) {
    state.buffer.push({batch.sequences[j], current_rewards[j],
                       batch.logp_old[j], batch.contexts[j]});
  }

  const SampledBatch& grad_batch = config.replay_in_surrogate ? merged : batch;
  std::span<const double> adv_span(mixed.data(), grad_batch.size());
  std::span<const double> extra_span =
      extra_coef.empty()
          ? std::span<const double>{}
          : std::span<const double>(extra_coef.data(), grad_batch.size());

  for (int u = 0; u < config.inner_updates; ++u) {
    auto grad = surrogate_gradient(state.policy, grad_batch, adv_span, *kl_ref,
                                   config.epsilon, config.beta, extra_span);
    apply_update(state.policy, grad, config.eta_theta,
                 config.use_adam ? &state.adam : nullptr);
    if (config.variant == Variant::ctrl_dna) {
      update_multipliers(state.lag, merged_rewards, config.deltas,
                         config.delta_tfbs, has_tfbs);
    }
  }

  for (double l : state.lag.lambdas) {
    if (!std::isfinite(l)) throw NonFiniteState("non-finite multiplier");
  }
  for (double v : state.policy.logits()) {
    if (!std::isfinite(v)) throw NonFiniteState("non-finite policy logits");
  }

  TrainStepReport report;
  report.step = state.step;
  const std::size_t cols = merged_rewards[0].size();
  for (std::size_t c = 0; c < cols; ++c) {
    auto col = column(merged_rewards, c);
    double mean = std::accumulate(col.begin(), col.end(), 0.0) /
                  static_cast<double>(col.size());
    report.mean_reward.push_back(mean);
    report.median_reward.push_back(metric_median(col));
  }
  report.lambdas = state.lag.lambdas;
  report.lambda_tfbs = state.lag.lambda_tfbs;
  report.alpha0 = main_coefficient(state.lag, m);
  for (int i = 0; i < m; ++i) {
    report.violations.push_back(report.mean_reward[i + 1] - config.deltas[i]);
  }
  double adv_mean = std::accumulate(mixed.begin(), mixed.end(), 0.0) /
                    static_cast<double>(mixed.size());
  double adv_var = 0;
  for (double a : mixed) adv_var += (a - adv_mean) * (a - adv_mean);
  report.adv_mean = adv_mean;
  report.adv_sd = std::sqrt(adv_var / static_cast<double>(mixed.size()));
  report.diversity_bits = metric_diversity(batch.sequences);
  report.infeasible = infeasible;

  if (out_batch) *out_batch = batch.sequences;
  state.step += 1;
  return report;
}

std::string TrainStepReport::to_json_line() const {
  nlohmann::ordered_json j;
  j["step"] = step;
  j["mean_reward"] = mean_reward;
  j["median_reward"] = median_reward;
  j["lambda"] = lambdas;
  j["lambda_tfbs"] = lambda_tfbs;
  j["alpha0"] = alpha0;
  j["violation"] = violations;
  j["adv_mean"] = adv_mean;
  j["adv_sd"] = adv_sd;
  j["diversity_bits"] = diversity_bits;
  j["infeasible"] = infeasible;
  return j.dump();
}

std::string trainer_state_to_json(const TrainerState& state) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["step"] = state.step;
  j["policy"] = nlohmann::ordered_json::parse(
      policy_to_json(state.policy, &state.adam));
  j["ref"] = nlohmann::ordered_json::parse(policy_to_json(state.ref));
  j["lambda"] = state.lag.lambdas;
  j["lambda_tfbs"] = state.lag.lambda_tfbs;
  j["eta_lambda"] = state.lag.eta_lambda;
  j["eta_lambda_tfbs"] = state.lag.eta_lambda_tfbs;
  j["lambda_max_tfbs"] = state.lag.lambda_max_tfbs;
  std::ostringstream rng_text;
  rng_text << state.rng;
  j["rng"] = rng_text.str();
  j["buffer_capacity"] = state.buffer.capacity();
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto& e : state.buffer.entries()) {
    nlohmann::ordered_json entry;
    entry["sequence"] = e.sequence.str();
    entry["rewards"] = e.rewards;
    entry["logp_old"] = e.logp_old;
    entry["contexts"] = e.contexts;
    entries.push_back(std::move(entry));
  }
  j["buffer"] = std::move(entries);
  return j.dump();
}

TrainerState trainer_state_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad run checkpoint: ") + e.what());
  }
  if (!j.contains("version") || j["version"] != 1) {
    throw ConfigError("unsupported run checkpoint version");
  }
  AdamState adam;
  Policy policy = policy_from_json(j.at("policy").dump(), &adam);
  Policy ref = policy_from_json(j.at("ref").dump());
  LagrangeState lag;
  lag.lambdas = j.at("lambda").get<std::vector<double>>();
  lag.lambda_tfbs = j.at("lambda_tfbs").get<double>();
  lag.eta_lambda = j.at("eta_lambda").get<std::vector<double>>();
  lag.eta_lambda_tfbs = j.at("eta_lambda_tfbs").get<double>();
  lag.lambda_max_tfbs = j.at("lambda_max_tfbs").get<double>();

  TrainerState state(std::move(policy), std::move(ref), std::move(lag),
                     j.at("buffer_capacity").get<std::size_t>(), 0);
  state.adam = std::move(adam);
  state.step = j.at("step").get<std::int64_t>();
  std::istringstream rng_text(j.at("rng").get<std::string>());
  rng_text >> state.rng;
  std::deque<ReplayEntry> entries;
  for (const auto& e : j.at("buffer")) {
    std::string s = e.at("sequence").get<std::string>();
    entries.push_back({Sequence::parse(s, s.size()),
                       e.at("rewards").get<std::vector<double>>(),
                       e.at("logp_old").get<std::vector<double>>(),
                       e.at("contexts").get<std::vector<std::uint32_t>>()});
  }
  state.buffer.restore(std::move(entries));
  return state;
}

}  // namespace ctrlseq
