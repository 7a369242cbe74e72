#include "ctrlseq/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <istream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ctrlseq/error.hpp"

namespace ctrlseq {

std::vector<std::string> MotifSet::names() const {
  std::vector<std::string> out;
  out.reserve(motifs.size());
  for (const auto& m : motifs) out.push_back(m.pwm.name);
  return out;
}

std::size_t MotifSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < motifs.size(); ++i) {
    if (motifs[i].pwm.name == name) return i;
  }
  throw ConfigError("unknown motif '" + name + "'");
}

MotifSet load_motif_set(std::istream& jaspar, const Background& bg,
                        double pseudocount, int bins) {
  MotifSet set;
  for (auto& ppm : parse_jaspar(jaspar)) {
    set.motifs.push_back(make_scored_motif(std::move(ppm), bg, pseudocount, bins));
  }
  if (set.motifs.empty()) throw EmptyInput("motif file contains no motifs");
  return set;
}

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

MotifOracle::MotifOracle(const MotifSet* set, std::vector<double> weights,
                         double bias, double p_threshold)
    : set_(set), weights_(std::move(weights)), bias_(bias),
      p_threshold_(p_threshold) {
  if (!set_) throw ConfigError("motif oracle needs a motif set");
  if (weights_.size() != set_->motifs.size()) {
    throw ShapeMismatch("oracle weight vector does not match motif list");
  }
}

double MotifOracle::eval(const Sequence& x) const {
  double z = bias_;
  for (std::size_t m = 0; m < weights_.size(); ++m) {
    if (weights_[m] == 0) continue;
    auto hits = scan(x, set_->motifs[m].pwm, set_->motifs[m].table, p_threshold_);
    z += weights_[m] * static_cast<double>(hits.size());
  }
  return logistic(z);
}

KmerOracle::KmerOracle(int k, std::vector<double> weights, double intercept,
                       double ridge)
    : k_(k), weights_(std::move(weights)), intercept_(intercept), ridge_(ridge) {
  if (k_ < 1 || k_ > 12) throw ConfigError("k-mer size out of range");
  std::size_t expected = std::size_t(1) << (2 * k_);
  if (weights_.size() != expected) {
    throw ShapeMismatch("k-mer weight vector has wrong size");
  }
}

std::vector<double> KmerOracle::kmer_counts(const Sequence& x, int k) {
  std::size_t dim = std::size_t(1) << (2 * k);
  std::vector<double> counts(dim, 0.0);
  if (x.length() < static_cast<std::size_t>(k)) return counts;
  std::size_t code = 0;
  std::size_t mask = dim - 1;
  for (std::size_t t = 0; t < x.length(); ++t) {
    code = ((code << 2) | x[t]) & mask;
    if (t + 1 >= static_cast<std::size_t>(k)) counts[code] += 1.0;
  }
  return counts;
}

double KmerOracle::predict_raw(const Sequence& x) const {
  auto counts = kmer_counts(x, k_);
  double y = intercept_;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) y += weights_[i] * counts[i];
  }
  return y;
}

double KmerOracle::eval(const Sequence& x) const {
  return std::clamp(predict_raw(x), 0.0, 1.0);
}

KmerOracle fit_kmer_oracle(const FitnessTable& table, const std::string& label,
                           int k, double ridge) {
  if (table.records.size() < 2) {
    throw EmptyInput("k-mer fit needs at least 2 records");
  }
  if (ridge < 0) throw ConfigError("ridge strength must be non-negative");
  std::size_t label_idx = table.label_index(label);
  for (const auto& rec : table.records) {
    if (rec.sequence.length() < static_cast<std::size_t>(k)) {
      throw ConfigError("k-mer size exceeds sequence length");
    }
  }
  const std::size_t n = table.records.size();
  const std::size_t dim = (std::size_t(1) << (2 * k)) + 1;  // + intercept

  Eigen::MatrixXd features(n, dim);
  Eigen::VectorXd target(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto counts = KmerOracle::kmer_counts(table.records[i].sequence, k);
    features(i, 0) = 1.0;
    for (std::size_t j = 0; j + 1 < dim; ++j) features(i, j + 1) = counts[j];
    target(i) = table.records[i].fitness[label_idx];
  }

  Eigen::MatrixXd normal = features.transpose() * features;
  for (std::size_t j = 1; j < dim; ++j) normal(j, j) += ridge;  // intercept free
  Eigen::VectorXd rhs = features.transpose() * target;

  if (ridge == 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
    if (!lu.isInvertible()) {
      throw SingularSystem("rank-deficient k-mer features with ridge = 0");
    }
    Eigen::VectorXd beta = lu.solve(rhs);
    return KmerOracle(k, std::vector<double>(beta.data() + 1, beta.data() + dim),
                      beta(0), ridge);
  }
  Eigen::VectorXd beta = normal.ldlt().solve(rhs);
  return KmerOracle(k, std::vector<double>(beta.data() + 1, beta.data() + dim),
                    beta(0), ridge);
}

std::vector<std::vector<double>> RewardSuite::evaluate(
    std::span<const Sequence> batch) const {
  if (oracles.empty()) throw ConfigError("reward suite has no oracles");
  if (tfbs_enabled && (!motif_set || q_real.values.empty())) {
    throw ConfigError("TFBS reward enabled without motifs or q_real");
  }
  std::vector<std::vector<double>> rewards;
  rewards.reserve(batch.size());
  for (const Sequence& x : batch) {
    std::vector<double> row;
    row.reserve(reward_dim());
    for (const auto& oracle : oracles) row.push_back(oracle->eval(x));
    if (tfbs_enabled) {
      auto q_gen = frequency_vector(std::span<const Sequence>(&x, 1),
                                    motif_set->motifs, tfbs_p_threshold);
      row.push_back(pearson(q_gen, q_real));
    }
    rewards.push_back(std::move(row));
  }
  return rewards;
}

std::string oracle_to_json(const Oracle& oracle, const std::string& label,
                           const MotifSet* set) {
  nlohmann::json j;
  j["label"] = label;
  if (auto* mo = dynamic_cast<const MotifOracle*>(&oracle)) {
    if (!set) throw ConfigError("motif oracle serialization needs a motif set");
    j["kind"] = "motif";
    j["bias"] = mo->bias();
    j["p_threshold"] = mo->p_threshold();
    nlohmann::json weights = nlohmann::json::object();
    auto names = set->names();
    for (std::size_t m = 0; m < names.size(); ++m) {
      if (mo->weights()[m] != 0) weights[names[m]] = mo->weights()[m];
    }
    j["weights"] = weights;
  } else if (auto* ko = dynamic_cast<const KmerOracle*>(&oracle)) {
    j["kind"] = "kmer";
    j["k"] = ko->k();
    j["intercept"] = ko->intercept();
    j["ridge"] = ko->ridge();
    j["weights"] = ko->weights();
  } else {
    throw ConfigError("unknown oracle kind");
  }
  return j.dump();
}

std::unique_ptr<Oracle> oracle_from_json(const std::string& text,
                                         std::string* label,
                                         const MotifSet* set) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad oracle definition: ") + e.what());
  }
  try {
    if (label) *label = j.at("label").get<std::string>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "motif") {
      if (!set) throw ConfigError("motif oracle needs a motif set");
      std::vector<double> weights(set->motifs.size(), 0.0);
      for (auto& [name, w] : j.at("weights").items()) {
        weights[set->index_of(name)] = w.get<double>();
      }
      return std::make_unique<MotifOracle>(set, std::move(weights),
                                           j.at("bias").get<double>(),
                                           j.at("p_threshold").get<double>());
    }
    if (kind == "kmer") {
      return std::make_unique<KmerOracle>(
          j.at("k").get<int>(), j.at("weights").get<std::vector<double>>(),
          j.at("intercept").get<double>(),
          j.value("ridge", 0.0));
    }
    throw ConfigError("unknown oracle kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad oracle definition: ") + e.what());
  }
}

}  // namespace ctrlseq
