#include "ctrlseq/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ctrlseq/error.hpp"

namespace fs = std::filesystem;

namespace ctrlseq {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write failure on '" + path + "'");
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const char* where,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return key == k;
        }) == allowed.end()) {
      throw ConfigError(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad experiment config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("experiment config must be an object");
  reject_unknown_keys(j, "config", {"paths", "rewards", "trainer", "metrics"});

  ExperimentConfig config;

  if (j.contains("paths")) {
    const json& p = j["paths"];
    reject_unknown_keys(p, "paths", {"motifs", "corpus", "fitness", "oracles",
                                     "ref_policy", "output"});
    read_field(p, "motifs", config.paths.motifs);
    read_field(p, "corpus", config.paths.corpus);
    read_field(p, "fitness", config.paths.fitness);
    read_field(p, "oracles", config.paths.oracles);
    read_field(p, "ref_policy", config.paths.ref_policy);
    read_field(p, "output", config.paths.output);
  }

  if (!j.contains("rewards")) throw ConfigError("config needs a rewards block");
  {
    const json& r = j["rewards"];
    reject_unknown_keys(r, "rewards", {"labels", "deltas", "tfbs"});
    read_field(r, "labels", config.rewards.labels);
    read_field(r, "deltas", config.rewards.deltas);
    read_field(r, "tfbs", config.rewards.tfbs_enabled);
  }
  if (config.rewards.labels.empty()) {
    throw ConfigError("rewards.labels must name at least the target");
  }
  if (config.rewards.deltas.size() != config.rewards.labels.size() - 1) {
    throw ConfigError("rewards.deltas needs one threshold per constraint label");
  }

  if (!j.contains("trainer")) throw ConfigError("config needs a trainer block");
  {
    const json& t = j["trainer"];
    reject_unknown_keys(
        t, "trainer",
        {"batch_size", "epochs", "eta_theta", "eta_lambda", "beta", "epsilon",
         "delta_tfbs", "lambda_max", "order", "length", "seed", "variant",
         "ipo_t", "log_c1", "replay_batch", "replay_capacity", "inner_updates",
         "use_adam", "positive_constraint_sign", "replay_in_surrogate"});
    TrainerConfig& tc = config.trainer;
    read_field(t, "batch_size", tc.batch_size);
    read_field(t, "epochs", tc.epochs);
    read_field(t, "eta_theta", tc.eta_theta);
    read_field(t, "eta_lambda", tc.eta_lambda);
    read_field(t, "beta", tc.beta);
    read_field(t, "epsilon", tc.epsilon);
    read_field(t, "delta_tfbs", tc.delta_tfbs);
    read_field(t, "lambda_max", tc.lambda_max);
    read_field(t, "order", tc.order);
    read_field(t, "length", tc.length);
    read_field(t, "seed", tc.seed);
    if (t.contains("variant")) {
      tc.variant = variant_from_string(t.at("variant").get<std::string>());
    }
    read_field(t, "ipo_t", tc.ipo_t);
    read_field(t, "log_c1", tc.log_c1);
    read_field(t, "replay_batch", tc.replay_batch);
    read_field(t, "replay_capacity", tc.replay_capacity);
    read_field(t, "inner_updates", tc.inner_updates);
    read_field(t, "use_adam", tc.use_adam);
    read_field(t, "positive_constraint_sign", tc.positive_constraint_sign);
    read_field(t, "replay_in_surrogate", tc.replay_in_surrogate);
  }
  config.trainer.deltas = config.rewards.deltas;

  if (j.contains("metrics")) {
    const json& m = j["metrics"];
    reject_unknown_keys(m, "metrics", {"percentile", "p_threshold",
                                       "ref_pseudocount", "pvalue_bins"});
    read_field(m, "percentile", config.metrics.percentile);
    read_field(m, "p_threshold", config.metrics.p_threshold);
    read_field(m, "ref_pseudocount", config.metrics.ref_pseudocount);
    read_field(m, "pvalue_bins", config.metrics.pvalue_bins);
  }

  config.trainer.validate(static_cast<int>(config.rewards.deltas.size()));
  if (config.paths.oracles.empty()) {
    throw ConfigError("paths.oracles is required");
  }
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  ExperimentConfig config = experiment_config_from_json(read_text_file(path));
  if (const char* seed_text = std::getenv("CTRLSEQ_SEED")) {
    std::uint64_t seed = 0;
    std::string_view sv(seed_text);
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), seed);
    if (ec != std::errc{} || ptr != sv.data() + sv.size()) {
      throw ConfigError("CTRLSEQ_SEED must be an unsigned integer");
    }
    config.trainer.seed = seed;
  }
  return config;
}

LoadedExperiment load_experiment(const ExperimentConfig& config) {
  LoadedExperiment loaded;

  if (!config.paths.motifs.empty()) {
    std::ifstream in(config.paths.motifs);
    if (!in) throw IoError("cannot open '" + config.paths.motifs + "'");
    loaded.motif_set = std::make_unique<MotifSet>(load_motif_set(
        in, kUniformBackground, 0.01, config.metrics.pvalue_bins));
  }

  loaded.suite.labels = config.rewards.labels;
  loaded.suite.motif_set = loaded.motif_set.get();
  loaded.suite.tfbs_enabled = config.rewards.tfbs_enabled;
  loaded.suite.tfbs_p_threshold = config.metrics.p_threshold;

  std::istringstream oracle_lines(read_text_file(config.paths.oracles));
  std::vector<std::unique_ptr<Oracle>> by_label(config.rewards.labels.size());
  std::string line;
  while (std::getline(oracle_lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string label;
    auto oracle = oracle_from_json(line, &label, loaded.motif_set.get());
    auto it = std::find(config.rewards.labels.begin(),
                        config.rewards.labels.end(), label);
    if (it == config.rewards.labels.end()) {
      throw ConfigError("oracle label '" + label + "' is not a reward label");
    }
    auto idx = static_cast<std::size_t>(it - config.rewards.labels.begin());
    if (by_label[idx]) throw ConfigError("duplicate oracle for '" + label + "'");
    by_label[idx] = std::move(oracle);
  }
  for (std::size_t i = 0; i < by_label.size(); ++i) {
    if (!by_label[i]) {
      throw ConfigError("no oracle for label '" + config.rewards.labels[i] + "'");
    }
    loaded.suite.oracles.push_back(std::move(by_label[i]));
  }

  if (config.rewards.tfbs_enabled) {
    if (!loaded.motif_set || config.paths.fitness.empty()) {
      throw ConfigError("the TFBS reward needs paths.motifs and paths.fitness");
    }
    std::ifstream in(config.paths.fitness);
    if (!in) throw IoError("cannot open '" + config.paths.fitness + "'");
    FitnessTable table = parse_fitness_tsv(in);
    std::vector<std::string> off(config.rewards.labels.begin() + 1,
                                 config.rewards.labels.end());
    loaded.suite.q_real = reference_frequency(
        table, config.rewards.labels[0], off, loaded.motif_set->motifs,
        config.metrics.p_threshold, config.metrics.percentile);
  }

  if (!config.paths.ref_policy.empty()) {
    loaded.ref = policy_from_json(read_text_file(config.paths.ref_policy));
    if (loaded.ref->order() != config.trainer.order) {
      throw ConfigError("reference policy order does not match trainer.order");
    }
  } else if (!config.paths.corpus.empty()) {
    std::ifstream in(config.paths.corpus);
    if (!in) throw IoError("cannot open '" + config.paths.corpus + "'");
    std::vector<Sequence> corpus;
    for (const auto& rec : parse_fasta(in)) {
      corpus.push_back(Sequence::parse(rec.raw, rec.raw.size()));
    }
    loaded.ref = Policy::fit_reference_mle(corpus, config.trainer.order,
                                           config.metrics.ref_pseudocount);
  } else {
    loaded.ref = Policy::uniform(config.trainer.order);
  }
  return loaded;
}

MetricsReport compute_metrics(const ExperimentConfig& config,
                              const LoadedExperiment& loaded,
                              std::span<const Sequence> batch) {
  MetricsReport report;
  report.labels = loaded.suite.labels;
  if (loaded.suite.tfbs_enabled) report.labels.push_back("tfbs");

  auto rewards = loaded.suite.evaluate(batch);
  const std::size_t cols = rewards[0].size();
  for (std::size_t c = 0; c < cols; ++c) {
    std::vector<double> col;
    col.reserve(rewards.size());
    for (const auto& row : rewards) col.push_back(row[c]);
    report.median_reward.push_back(metric_median(col));
  }

  const int m = loaded.suite.m();
  if (m >= 1) {
    std::vector<std::vector<double>> fitness;
    fitness.reserve(rewards.size());
    for (const auto& row : rewards) {
      fitness.emplace_back(row.begin(), row.begin() + m + 1);
    }
    report.delta_r = metric_delta_r(fitness);
  }
  if (loaded.motif_set && !loaded.suite.q_real.values.empty()) {
    report.motif_correlation = metric_motif_correlation(
        batch, loaded.suite.q_real, loaded.motif_set->motifs,
        config.metrics.p_threshold);
  }
  report.diversity_bits = metric_diversity(batch);
  report.n_sequences = batch.size();
  return report;
}

MetricsReport run_single(const ExperimentConfig& config,
                         const LoadedExperiment& loaded,
                         const std::string& out_dir, std::uint64_t seed) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());

  TrainerConfig trainer = config.trainer;
  trainer.seed = seed;

  TrainerState state = make_trainer_state(trainer, loaded.suite, *loaded.ref);

  std::string report_lines;
  std::vector<Sequence> final_batch;
  for (int epoch = 0; epoch < trainer.epochs; ++epoch) {
    TrainStepReport step = train_step(state, loaded.suite, trainer,
                                      epoch + 1 == trainer.epochs
                                          ? &final_batch
                                          : nullptr);
    report_lines += step.to_json_line();
    report_lines += '\n';
  }
  write_text_file((fs::path(out_dir) / "report.jsonl").string(), report_lines);

  {
    std::ostringstream fasta;
    write_fasta(fasta, final_batch);
    write_text_file((fs::path(out_dir) / "final.fasta").string(), fasta.str());
  }

  MetricsReport metrics = compute_metrics(config, loaded, final_batch);
  write_text_file((fs::path(out_dir) / "metrics.json").string(),
                  metrics.to_json() + "\n");
  write_text_file((fs::path(out_dir) / "checkpoint.json").string(),
                  trainer_state_to_json(state) + "\n");
  return metrics;
}

namespace {

struct MeanSd {
  double mean = 0;
  double sd = 0;
};

MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  for (double v : values) out.sd += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(out.sd / n);
  return out;
}

}  // namespace

void run_experiment(const ExperimentConfig& config, int seeds, bool force) {
  if (seeds < 1) throw ConfigError("seed count must be >= 1");
  if (config.paths.output.empty()) throw ConfigError("paths.output is required");

  fs::path root(config.paths.output);
  if (fs::exists(root)) {
    if (!force) {
      throw IoError("output directory '" + config.paths.output +
                    "' already exists (pass --force to replace it)");
    }
    std::error_code ec;
    fs::remove_all(root, ec);
    if (ec) throw IoError("cannot clear '" + root.string() + "': " + ec.message());
  }

  LoadedExperiment loaded = load_experiment(config);

  if (seeds == 1) {
    run_single(config, loaded, root.string(), config.trainer.seed);
    return;
  }

  std::vector<MetricsReport> reports;
  for (int i = 0; i < seeds; ++i) {
    std::string sub = (root / ("seed_" + std::to_string(i))).string();
    reports.push_back(
        run_single(config, loaded, sub, config.trainer.seed + i));
  }

  nlohmann::ordered_json agg;
  agg["n_runs"] = seeds;
  auto put = [&](const std::string& name, const std::vector<double>& values) {
    MeanSd ms = mean_sd(values);
    agg["mean"][name] = ms.mean;
    agg["sd"][name] = ms.sd;
  };
  for (std::size_t c = 0; c < reports[0].labels.size(); ++c) {
    std::vector<double> col;
    for (const auto& r : reports) col.push_back(r.median_reward[c]);
    put("median_" + reports[0].labels[c], col);
  }
  std::vector<double> delta_r, corr, div;
  for (const auto& r : reports) {
    delta_r.push_back(r.delta_r);
    corr.push_back(r.motif_correlation);
    div.push_back(r.diversity_bits);
  }
  put("delta_r", delta_r);
  put("motif_correlation", corr);
  put("diversity_bits", div);
  write_text_file((root / "metrics.json").string(), agg.dump() + "\n");
}

}  // namespace ctrlseq
