#include "ctrlseq/policy.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ctrlseq/error.hpp"

namespace ctrlseq {

namespace {

constexpr double kZeroCountLogit = -30.0;  // exp(-30) < 1e-13

std::uint32_t pow5(int k) {
  std::uint32_t p = 1;
  for (int i = 0; i < k; ++i) p *= 5;
  return p;
}

void check_order(int order) {
  if (order < 0) throw ConfigError("policy order must be non-negative");
  if (order > kMaxPolicyOrder) {
    throw OrderTooLarge("policy order " + std::to_string(order) +
                        " exceeds the table budget (max " +
                        std::to_string(kMaxPolicyOrder) + ")");
  }
}

// 53-bit uniform in [0,1), stable across standard library versions.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Policy::Policy(int order, std::vector<double> logits)
    : order_(order),
      num_contexts_(pow5(order)),
      ctx_mod_(order > 0 ? pow5(order - 1) : 1),
      logits_(std::move(logits)) {}

Policy Policy::uniform(int order) {
  check_order(order);
  return Policy(order, std::vector<double>(4 * pow5(order), 0.0));
}

Policy Policy::fit_reference_mle(std::span<const Sequence> corpus, int order,
                                 double pseudocount) {
  check_order(order);
  if (corpus.empty()) throw EmptyCorpus("reference corpus is empty");
  if (pseudocount < 0) throw ConfigError("pseudocount must be non-negative");
  Policy policy = uniform(order);
  std::vector<double> counts(policy.num_params(), 0.0);
  for (const Sequence& seq : corpus) {
    std::uint32_t ctx = policy.initial_context();
    for (std::size_t t = 0; t < seq.length(); ++t) {
      counts[4 * ctx + seq[t]] += 1.0;
      ctx = policy.next_context(ctx, seq[t]);
    }
  }
  for (std::size_t c = 0; c < policy.num_contexts(); ++c) {
    double total = counts[4 * c] + counts[4 * c + 1] + counts[4 * c + 2] +
                   counts[4 * c + 3];
    if (total + pseudocount == 0) continue;  // unseen context stays uniform
    for (int b = 0; b < 4; ++b) {
      double p = (counts[4 * c + b] + pseudocount) / (total + 4 * pseudocount);
      policy.logits_[4 * c + b] = p > 0 ? std::log(p) : kZeroCountLogit;
    }
  }
  return policy;
}

std::array<double, 4> Policy::log_probs(std::uint32_t ctx) const {
  const double* l = &logits_[4 * ctx];
  double mx = std::max(std::max(l[0], l[1]), std::max(l[2], l[3]));
  double z = 0;
  for (int b = 0; b < 4; ++b) z += std::exp(l[b] - mx);
  double log_z = mx + std::log(z);
  return {l[0] - log_z, l[1] - log_z, l[2] - log_z, l[3] - log_z};
}

std::array<double, 4> Policy::probs(std::uint32_t ctx) const {
  auto lp = log_probs(ctx);
  return {std::exp(lp[0]), std::exp(lp[1]), std::exp(lp[2]), std::exp(lp[3])};
}

std::uint32_t Policy::initial_context() const {
  return static_cast<std::uint32_t>(num_contexts_ - 1);  // all-BOS digits
}

std::uint32_t Policy::next_context(std::uint32_t ctx, Base symbol) const {
  if (order_ == 0) return 0;
  return (ctx % ctx_mod_) * 5 + symbol;
}

std::vector<double> Policy::log_prob(const Sequence& x) const {
  std::vector<double> lp(x.length());
  std::uint32_t ctx = initial_context();
  for (std::size_t t = 0; t < x.length(); ++t) {
    lp[t] = log_probs(ctx)[x[t]];
    ctx = next_context(ctx, x[t]);
  }
  return lp;
}

std::vector<std::uint32_t> Policy::contexts_of(const Sequence& x) const {
  std::vector<std::uint32_t> ctxs(x.length());
  std::uint32_t ctx = initial_context();
  for (std::size_t t = 0; t < x.length(); ++t) {
    ctxs[t] = ctx;
    ctx = next_context(ctx, x[t]);
  }
  return ctxs;
}

SampledBatch sample_batch(const Policy& policy, int batch_size, int length,
                          std::mt19937_64& rng) {
  if (batch_size <= 0 || length <= 0) {
    throw ConfigError("batch size and length must be positive");
  }
  SampledBatch batch;
  batch.sequences.reserve(batch_size);
  batch.logp_old.resize(batch_size);
  batch.contexts.resize(batch_size);
  for (int j = 0; j < batch_size; ++j) {
    std::vector<Base> bases(length);
    auto& lp = batch.logp_old[j];
    auto& ctxs = batch.contexts[j];
    lp.resize(length);
    ctxs.resize(length);
    std::uint32_t ctx = policy.initial_context();
    for (int t = 0; t < length; ++t) {
      auto log_p = policy.log_probs(ctx);
      double u = uniform01(rng);
      double cum = 0;
      int a = 3;
      for (int b = 0; b < 4; ++b) {
        cum += std::exp(log_p[b]);
        if (u < cum) {
          a = b;
          break;
        }
      }
      bases[t] = static_cast<Base>(a);
      lp[t] = log_p[a];
      ctxs[t] = ctx;
      ctx = policy.next_context(ctx, static_cast<Base>(a));
    }
    batch.sequences.emplace_back(std::move(bases));
  }
  return batch;
}

std::vector<double> kl_term(const Policy& policy, const Policy& ref,
                            const Sequence& x) {
  if (policy.order() != ref.order()) {
    throw ShapeMismatch("policy/reference order mismatch");
  }
  std::vector<double> out(x.length());
  std::uint32_t ctx = policy.initial_context();
  for (std::size_t t = 0; t < x.length(); ++t) {
    double lp = policy.log_probs(ctx)[x[t]];
    double lp_ref = ref.log_probs(ctx)[x[t]];
    double r = std::exp(lp_ref - lp);
    out[t] = r - (lp_ref - lp) - 1.0;
    ctx = policy.next_context(ctx, x[t]);
  }
  return out;
}

namespace {

void check_batch_shapes(const Policy& policy, const SampledBatch& batch,
                        std::span<const double> mixed_adv, const Policy& ref,
                        double epsilon,
                        std::span<const double> extra_logp_coef) {
  if (mixed_adv.size() != batch.size()) {
    throw ShapeMismatch("advantage vector does not match batch size");
  }
  if (!extra_logp_coef.empty() && extra_logp_coef.size() != batch.size()) {
    throw ShapeMismatch("extra coefficient vector does not match batch size");
  }
  if (policy.order() != ref.order()) {
    throw ShapeMismatch("policy/reference order mismatch");
  }
  if (!(epsilon > 0 && epsilon < 1)) {
    throw ConfigError("clip epsilon must be in (0,1)");
  }
}

}  // namespace

double surrogate_objective(const Policy& policy, const SampledBatch& batch,
                           std::span<const double> mixed_adv, const Policy& ref,
                           double epsilon, double beta,
                           std::span<const double> extra_logp_coef) {
  check_batch_shapes(policy, batch, mixed_adv, ref, epsilon, extra_logp_coef);
  double obj = 0;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Sequence& x = batch.sequences[j];
    double adv = mixed_adv[j];
    for (std::size_t t = 0; t < x.length(); ++t) {
      std::uint32_t ctx = batch.contexts[j][t];
      double lp = policy.log_probs(ctx)[x[t]];
      double rho = std::exp(lp - batch.logp_old[j][t]);
      double clipped = std::clamp(rho, 1.0 - epsilon, 1.0 + epsilon);
      obj += std::min(rho * adv, clipped * adv);
      if (beta != 0) {
        double lp_ref = ref.log_probs(ctx)[x[t]];
        double r = std::exp(lp_ref - lp);
        obj -= beta * (r - (lp_ref - lp) - 1.0);
      }
      if (!extra_logp_coef.empty()) obj += extra_logp_coef[j] * lp;
    }
  }
  return obj / static_cast<double>(batch.size());
}

std::vector<double> surrogate_gradient(const Policy& policy,
                                       const SampledBatch& batch,
                                       std::span<const double> mixed_adv,
                                       const Policy& ref, double epsilon,
                                       double beta,
                                       std::span<const double> extra_logp_coef) {
  check_batch_shapes(policy, batch, mixed_adv, ref, epsilon, extra_logp_coef);
  std::vector<double> grad(policy.num_params(), 0.0);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Sequence& x = batch.sequences[j];
    double adv = mixed_adv[j];
    for (std::size_t t = 0; t < x.length(); ++t) {
      std::uint32_t ctx = batch.contexts[j][t];
      auto log_p = policy.log_probs(ctx);
      Base a = x[t];
      double rho = std::exp(log_p[a] - batch.logp_old[j][t]);

      // d/d logits of min{rho*A, clip(rho)*A}: the ratio path is live when
      // the unclipped branch attains the min or rho sits inside the clip
      // window (where clip(rho) = rho).
      double clipped = std::clamp(rho, 1.0 - epsilon, 1.0 + epsilon);
      bool ratio_live = (rho * adv <= clipped * adv) ||
                        (rho > 1.0 - epsilon && rho < 1.0 + epsilon);
      double coef = ratio_live ? adv * rho : 0.0;

      if (beta != 0) {
        double r = std::exp(ref.log_probs(ctx)[a] - log_p[a]);
        coef += beta * (r - 1.0);
      }
      if (!extra_logp_coef.empty()) coef += extra_logp_coef[j];

      double* g = &grad[4 * ctx];
      for (int b = 0; b < 4; ++b) {
        double indicator = (b == a) ? 1.0 : 0.0;
        g[b] += inv_b * coef * (indicator - std::exp(log_p[b]));
      }
    }
  }
  return grad;
}

void apply_update(Policy& policy, std::span<const double> gradient, double eta,
                  AdamState* adam) {
  if (gradient.size() != policy.num_params()) {
    throw ShapeMismatch("gradient size does not match policy");
  }
  if (eta <= 0) throw ConfigError("learning rate must be positive");
  for (double g : gradient) {
    if (!std::isfinite(g)) throw NonFiniteGradient("non-finite gradient entry");
  }
  auto& logits = policy.logits();
  if (!adam) {
    for (std::size_t i = 0; i < logits.size(); ++i) {
      logits[i] += eta * gradient[i];
    }
    return;
  }
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  if (adam->m.empty()) {
    adam->m.assign(logits.size(), 0.0);
    adam->v.assign(logits.size(), 0.0);
  }
  if (adam->m.size() != logits.size()) {
    throw ShapeMismatch("optimizer state does not match policy");
  }
  adam->t += 1;
  double c1 = 1.0 - std::pow(b1, static_cast<double>(adam->t));
  double c2 = 1.0 - std::pow(b2, static_cast<double>(adam->t));
  for (std::size_t i = 0; i < logits.size(); ++i) {
    double g = gradient[i];
    adam->m[i] = b1 * adam->m[i] + (1.0 - b1) * g;
    adam->v[i] = b2 * adam->v[i] + (1.0 - b2) * g * g;
    double m_hat = adam->m[i] / c1;
    double v_hat = adam->v[i] / c2;
    logits[i] += eta * m_hat / (std::sqrt(v_hat) + eps);
  }
}

std::string policy_to_json(const Policy& policy, const AdamState* adam) {
  nlohmann::json j;
  j["version"] = 1;
  j["k"] = policy.order();
  j["logits"] = policy.logits();
  if (adam && adam->t > 0) {
    j["adam"] = {{"t", adam->t}, {"m", adam->m}, {"v", adam->v}};
  }
  return j.dump();
}

Policy policy_from_json(const std::string& text, AdamState* adam) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad policy checkpoint: ") + e.what());
  }
  if (!j.contains("version") || j["version"] != 1) {
    throw ConfigError("unsupported policy checkpoint version");
  }
  int k = j.at("k").get<int>();
  Policy policy = Policy::uniform(k);
  auto logits = j.at("logits").get<std::vector<double>>();
  if (logits.size() != policy.num_params()) {
    throw ConfigError("policy checkpoint logit table has wrong size");
  }
  policy.logits() = std::move(logits);
  if (adam) {
    *adam = AdamState{};
    if (j.contains("adam")) {
      adam->t = j["adam"].at("t").get<std::int64_t>();
      adam->m = j["adam"].at("m").get<std::vector<double>>();
      adam->v = j["adam"].at("v").get<std::vector<double>>();
    }
  }
  return policy;
}

}  // namespace ctrlseq
