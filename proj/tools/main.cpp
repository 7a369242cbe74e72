#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"

#include "ctrlseq/error.hpp"
#include "ctrlseq/experiment.hpp"
#include "ctrlseq/metrics.hpp"
#include "ctrlseq/motif.hpp"
#include "ctrlseq/policy.hpp"
#include "ctrlseq/rewards.hpp"
#include "ctrlseq/seq.hpp"

namespace {

using namespace ctrlseq;

int cmd_train(const std::string& config_path, int seeds, bool force) {
  ExperimentConfig config = load_experiment_config(config_path);
  run_experiment(config, seeds, force);
  return 0;
}

int cmd_scan(const std::string& motif_path, const std::string& fasta_path,
             double p_threshold, bool qvalues) {
  std::ifstream motif_in(motif_path);
  if (!motif_in) throw IoError("cannot open '" + motif_path + "'");
  MotifSet set = load_motif_set(motif_in);

  std::ifstream fasta_in(fasta_path);
  if (!fasta_in) throw IoError("cannot open '" + fasta_path + "'");
  auto records = parse_fasta(fasta_in);

  struct Row {
    std::string sequence;
    MotifHit hit;
  };
  std::vector<Row> rows;
  for (const auto& rec : records) {
    Sequence seq = Sequence::parse(rec.raw, rec.raw.size());
    for (const auto& motif : set.motifs) {
      if (seq.length() < motif.pwm.width()) continue;
      for (auto& hit : scan(seq, motif.pwm, motif.table, p_threshold)) {
        rows.push_back({rec.name, std::move(hit)});
      }
    }
  }

  std::vector<double> qv;
  if (qvalues) {
    std::vector<double> pv;
    pv.reserve(rows.size());
    for (const auto& r : rows) pv.push_back(r.hit.p_value);
    qv = bh_qvalues(pv);
  }

  std::ostream& out = std::cout;
  out << "sequence\tmotif\tposition\tstrand\tscore\tp_value";
  if (qvalues) out << "\tq_value";
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << r.sequence << '\t' << r.hit.motif_name << '\t' << r.hit.position
        << '\t' << r.hit.strand << '\t' << r.hit.score << '\t'
        << r.hit.p_value;
    if (qvalues) out << '\t' << qv[i];
    out << '\n';
  }
  return 0;
}

int cmd_ref_freq(const std::string& motif_path, const std::string& fitness_path,
                 const std::string& target, const std::vector<std::string>& off,
                 double percentile, double p_threshold) {
  std::ifstream motif_in(motif_path);
  if (!motif_in) throw IoError("cannot open '" + motif_path + "'");
  MotifSet set = load_motif_set(motif_in);

  std::ifstream fitness_in(fitness_path);
  if (!fitness_in) throw IoError("cannot open '" + fitness_path + "'");
  FitnessTable table = parse_fitness_tsv(fitness_in);

  FrequencyVector q = reference_frequency(table, target, off, set.motifs,
                                          p_threshold, percentile);
  nlohmann::ordered_json j;
  j["motif_names"] = q.motif_names;
  j["values"] = q.values;
  std::cout << j.dump() << '\n';
  return 0;
}

int cmd_fit_oracle(const std::string& fitness_path, const std::string& label,
                   int k, double ridge) {
  std::ifstream fitness_in(fitness_path);
  if (!fitness_in) throw IoError("cannot open '" + fitness_path + "'");
  FitnessTable table = parse_fitness_tsv(fitness_in);
  KmerOracle oracle = fit_kmer_oracle(table, label, k, ridge);
  std::cout << oracle_to_json(oracle, label, nullptr) << '\n';
  return 0;
}

int cmd_eval(const std::string& sequences_path, const std::string& config_path) {
  ExperimentConfig config = load_experiment_config(config_path);
  LoadedExperiment loaded = load_experiment(config);

  std::ifstream fasta_in(sequences_path);
  if (!fasta_in) throw IoError("cannot open '" + sequences_path + "'");
  std::vector<Sequence> batch;
  for (const auto& rec : parse_fasta(fasta_in)) {
    batch.push_back(Sequence::parse(rec.raw, rec.raw.size()));
  }
  MetricsReport report = compute_metrics(config, loaded, batch);
  std::cout << report.to_json() << '\n';
  return 0;
}

int cmd_pretrain_ref(const std::string& fasta_path, int k, double pseudocount) {
  std::ifstream fasta_in(fasta_path);
  if (!fasta_in) throw IoError("cannot open '" + fasta_path + "'");
  std::vector<Sequence> corpus;
  for (const auto& rec : parse_fasta(fasta_in)) {
    corpus.push_back(Sequence::parse(rec.raw, rec.raw.size()));
  }
  Policy ref = Policy::fit_reference_mle(corpus, k, pseudocount);
  std::cout << policy_to_json(ref) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained RL engine for cell-type-specific DNA design"};
  app.require_subcommand(1);

  std::string config_path, motif_path, fasta_path, fitness_path;
  std::string sequences_path, target, label;
  std::vector<std::string> off;
  int seeds = 1, k = 4;
  bool force = false, qvalues = false;
  double p_threshold = 1e-4, percentile = 50.0, ridge = 0.0, pseudocount = 1.0;

  auto* train = app.add_subcommand("train", "Run a training experiment");
  train->add_option("--config", config_path)->required();
  train->add_option("--seeds", seeds)->check(CLI::PositiveNumber);
  train->add_flag("--force", force);

  auto* scan_cmd = app.add_subcommand("scan", "Scan sequences for motif hits");
  scan_cmd->add_option("--motifs", motif_path)->required();
  scan_cmd->add_option("--fasta", fasta_path)->required();
  scan_cmd->add_option("--p-threshold", p_threshold);
  scan_cmd->add_flag("--qvalues", qvalues);

  auto* ref_freq = app.add_subcommand(
      "ref-freq", "Motif frequency vector of top reference sequences");
  ref_freq->add_option("--motifs", motif_path)->required();
  ref_freq->add_option("--fitness", fitness_path)->required();
  ref_freq->add_option("--target", target)->required();
  ref_freq->add_option("--off", off)->required();
  ref_freq->add_option("--percentile", percentile);
  ref_freq->add_option("--p-threshold", p_threshold);

  auto* fit = app.add_subcommand("fit-oracle", "Fit a k-mer reward oracle");
  fit->add_option("--fitness", fitness_path)->required();
  fit->add_option("--label", label)->required();
  fit->add_option("--k", k)->required();
  fit->add_option("--ridge", ridge);

  auto* eval_cmd = app.add_subcommand("eval", "Metrics for a sequence set");
  eval_cmd->add_option("--sequences", sequences_path)->required();
  eval_cmd->add_option("--config", config_path)->required();

  auto* pretrain = app.add_subcommand("pretrain-ref",
                                      "Fit the reference policy on a corpus");
  pretrain->add_option("--fasta", fasta_path)->required();
  pretrain->add_option("--k", k)->required();
  pretrain->add_option("--pseudocount", pseudocount);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(train)) return cmd_train(config_path, seeds, force);
    if (app.got_subcommand(scan_cmd)) {
      return cmd_scan(motif_path, fasta_path, p_threshold, qvalues);
    }
    if (app.got_subcommand(ref_freq)) {
      return cmd_ref_freq(motif_path, fitness_path, target, off, percentile,
                          p_threshold);
    }
    if (app.got_subcommand(fit)) {
      return cmd_fit_oracle(fitness_path, label, k, ridge);
    }
    if (app.got_subcommand(eval_cmd)) {
      return cmd_eval(sequences_path, config_path);
    }
    if (app.got_subcommand(pretrain)) {
      return cmd_pretrain_ref(fasta_path, k, pseudocount);
    }
  } catch (const ctrlseq::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
