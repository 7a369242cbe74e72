#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ctrlseq/seq.hpp"

namespace ctrlseq {

// Contexts are the last `order` symbols, base-5 encoded with the most recent
// symbol in the lowest digit; BOS (code 4) fills left-pad positions.
inline constexpr Base kBos = 4;
inline constexpr int kMaxPolicyOrder = 8;  // 4 * 5^8 logits, ~12 MB

struct SampledBatch {
  std::vector<Sequence> sequences;
  std::vector<std::vector<double>> logp_old;          // B x L
  std::vector<std::vector<std::uint32_t>> contexts;   // B x L

  std::size_t size() const { return sequences.size(); }
};

struct AdamState {
  std::int64_t t = 0;
  std::vector<double> m;
  std::vector<double> v;
};

// Order-k autoregressive categorical policy over nucleotides with a dense
// logits table; houses pi_theta, and frozen copies house pi_old / pi_ref.
class Policy {
 public:
  static Policy uniform(int order);
  static Policy fit_reference_mle(std::span<const Sequence> corpus, int order,
                                  double pseudocount);

  int order() const { return order_; }
  std::size_t num_contexts() const { return num_contexts_; }
  std::size_t num_params() const { return logits_.size(); }

  std::vector<double>& logits() { return logits_; }
  const std::vector<double>& logits() const { return logits_; }

  std::array<double, 4> probs(std::uint32_t ctx) const;
  std::array<double, 4> log_probs(std::uint32_t ctx) const;

  std::uint32_t initial_context() const;
  std::uint32_t next_context(std::uint32_t ctx, Base symbol) const;

  // Per-step log pi(x_t | ctx_t), length L.
  std::vector<double> log_prob(const Sequence& x) const;
  std::vector<std::uint32_t> contexts_of(const Sequence& x) const;

  bool operator==(const Policy&) const = default;

 private:
  Policy(int order, std::vector<double> logits);

  int order_ = 0;
  std::size_t num_contexts_ = 1;
  std::uint32_t ctx_mod_ = 1;  // 5^(order-1), for the rolling update
  std::vector<double> logits_;
};

// Ancestral sampling, deterministic given the generator state.
SampledBatch sample_batch(const Policy& policy, int batch_size, int length,
                          std::mt19937_64& rng);

// Per-step r - ln r - 1 with r = pi_ref(x_t|ctx)/pi(x_t|ctx); always >= 0.
std::vector<double> kl_term(const Policy& policy, const Policy& ref,
                            const Sequence& x);

// Clipped-surrogate objective with per-step KL penalty, averaged over the
// batch. `extra_logp_coef`, when non-empty, adds coef[j] * sum_t log pi per
// sequence (used by the interior-point variant's barrier gradient).
double surrogate_objective(const Policy& policy, const SampledBatch& batch,
                           std::span<const double> mixed_adv, const Policy& ref,
                           double epsilon, double beta,
                           std::span<const double> extra_logp_coef = {});

// Analytic ascent gradient of surrogate_objective w.r.t. the logits.
std::vector<double> surrogate_gradient(
    const Policy& policy, const SampledBatch& batch,
    std::span<const double> mixed_adv, const Policy& ref, double epsilon,
    double beta, std::span<const double> extra_logp_coef = {});

// logits += eta * gradient (ascent); Adam variant when `adam` is given.
void apply_update(Policy& policy, std::span<const double> gradient, double eta,
                  AdamState* adam = nullptr);

// Versioned JSON checkpoint, logits flat in canonical context order.
std::string policy_to_json(const Policy& policy, const AdamState* adam = nullptr);
Policy policy_from_json(const std::string& text, AdamState* adam = nullptr);

}  // namespace ctrlseq
