#include "ctrlseq/motif.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <sstream>

#include "ctrlseq/error.hpp"

namespace ctrlseq {

namespace {

std::string strip_line(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n' ||
                           line.back() == ' ' || line.back() == '\t')) {
    line.pop_back();
  }
  std::size_t b = line.find_first_not_of(" \t");
  return b == std::string::npos ? "" : line.substr(b);
}

// "A [ 1 2 3 ]" or "A 1 2 3" -> row values
bool parse_motif_row(const std::string& line, int* base, std::vector<double>* out) {
  if (line.empty()) return false;
  int code = base_from_char(line[0]);
  if (code < 0) return false;
  *base = code;
  std::string body = line.substr(1);
  for (char& c : body) {
    if (c == '[' || c == ']') c = ' ';
  }
  std::istringstream is(body);
  double v;
  out->clear();
  while (is >> v) out->push_back(v);
  return true;
}

}  // namespace

std::vector<Ppm> parse_jaspar(std::istream& in) {
  std::vector<Ppm> motifs;
  std::string line;
  std::string pending_name;
  bool in_motif = false;
  std::array<std::vector<double>, 4> rows;
  std::array<bool, 4> seen{};

  auto flush = [&]() {
    if (!in_motif) return;
    for (int b = 0; b < 4; ++b) {
      if (!seen[b]) {
        throw MalformedMotif("motif '" + pending_name + "': missing " +
                             std::string(1, kBaseChars[b]) + " row");
      }
    }
    std::size_t width = rows[0].size();
    if (width == 0) throw MalformedMotif("motif '" + pending_name + "': empty rows");
    for (int b = 1; b < 4; ++b) {
      if (rows[b].size() != width) {
        throw MalformedMotif("motif '" + pending_name + "': ragged rows");
      }
    }
    Ppm ppm;
    ppm.name = pending_name;
    ppm.columns.resize(width);
    for (std::size_t c = 0; c < width; ++c) {
      double sum = 0;
      for (int b = 0; b < 4; ++b) {
        double v = rows[b][c];
        if (v < 0 || !std::isfinite(v)) {
          throw MalformedMotif("motif '" + pending_name + "': negative entry");
        }
        sum += v;
      }
      if (sum <= 0) {
        throw MalformedMotif("motif '" + pending_name + "': zero column sum");
      }
      for (int b = 0; b < 4; ++b) ppm.columns[c][b] = rows[b][c] / sum;
    }
    motifs.push_back(std::move(ppm));
    in_motif = false;
    seen = {};
    for (auto& r : rows) r.clear();
  };

  while (std::getline(in, line)) {
    line = strip_line(line);
    if (line.empty()) continue;
    if (line[0] == '>') {
      flush();
      pending_name = strip_line(line.substr(1));
      in_motif = true;
      continue;
    }
    int base;
    std::vector<double> values;
    if (!parse_motif_row(line, &base, &values)) {
      throw MalformedMotif("unparseable line: " + line);
    }
    if (!in_motif) throw MalformedMotif("matrix row before any '>' header");
    if (seen[base]) throw MalformedMotif("duplicate row for base");
    rows[base] = std::move(values);
    seen[base] = true;
  }
  flush();
  return motifs;
}

namespace {

void check_background(const Background& bg) {
  double sum = 0;
  for (double b : bg) {
    if (b <= 0 || !std::isfinite(b)) {
      throw InvalidBackground("background probabilities must be positive");
    }
    sum += b;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw InvalidBackground("background must sum to 1");
  }
}

}  // namespace

Pwm ppm_to_pwm(const Ppm& ppm, const Background& bg, double pseudocount) {
  check_background(bg);
  if (pseudocount < 0) throw ConfigError("pseudocount must be non-negative");
  Pwm pwm;
  pwm.name = ppm.name;
  pwm.columns.resize(ppm.width());
  pwm.min_score = 0;
  pwm.max_score = 0;
  for (std::size_t c = 0; c < ppm.width(); ++c) {
    double col_min = 0, col_max = 0;
    for (int b = 0; b < 4; ++b) {
      double p = (ppm.columns[c][b] + pseudocount * bg[b]) /
                 ((1.0 + pseudocount) * bg[b]);
      double entry = std::log2(p);
      pwm.columns[c][b] = entry;
      if (b == 0 || entry < col_min) col_min = entry;
      if (b == 0 || entry > col_max) col_max = entry;
    }
    pwm.min_score += col_min;
    pwm.max_score += col_max;
  }
  return pwm;
}

double Pwm::score(const Sequence& seq, std::size_t pos, char strand) const {
  double s = 0;
  for (std::size_t c = 0; c < width(); ++c) {
    Base b = (strand == '+') ? seq[pos + c]
                             : complement_base(seq[pos + width() - 1 - c]);
    s += columns[c][b];
  }
  return s;
}

ScorePValueTable build_pvalue_table(const Pwm& pwm, const Background& bg,
                                    int bins) {
  check_background(bg);
  if (bins < 100) throw ConfigError("p-value table needs >= 100 bins");
  if (pwm.max_score - pwm.min_score < 1e-12) {
    throw DegenerateMotif("motif '" + pwm.name + "' has constant score");
  }
  ScorePValueTable table;
  table.bin_width = (pwm.max_score - pwm.min_score) / bins;
  table.int_columns.resize(pwm.width());
  table.max_int = 0;
  for (std::size_t c = 0; c < pwm.width(); ++c) {
    double col_min = *std::min_element(pwm.columns[c].begin(), pwm.columns[c].end());
    int col_max_int = 0;
    for (int b = 0; b < 4; ++b) {
      double x = (pwm.columns[c][b] - col_min) / table.bin_width;
      int ib = static_cast<int>(std::floor(x + 1e-9));
      table.int_columns[c][b] = ib;
      col_max_int = std::max(col_max_int, ib);
    }
    table.max_int += col_max_int;
  }

  // Exact distribution of the integer window score for a background sequence.
  std::vector<double> dist(table.max_int + 1, 0.0);
  dist[0] = 1.0;
  int reach = 0;
  for (std::size_t c = 0; c < pwm.width(); ++c) {
    int col_max_int = *std::max_element(table.int_columns[c].begin(),
                                        table.int_columns[c].end());
    std::vector<double> next(reach + col_max_int + 1, 0.0);
    for (int s = 0; s <= reach; ++s) {
      if (dist[s] == 0) continue;
      for (int b = 0; b < 4; ++b) {
        next[s + table.int_columns[c][b]] += dist[s] * bg[b];
      }
    }
    reach += col_max_int;
    std::copy(next.begin(), next.end(), dist.begin());
    std::fill(dist.begin() + next.size(), dist.end(), 0.0);
  }

  table.tail.assign(table.max_int + 2, 0.0);
  for (int s = table.max_int; s >= 0; --s) {
    table.tail[s] = table.tail[s + 1] + dist[s];
  }
  // Guard against accumulation drift at the low end.
  table.tail[0] = 1.0;
  return table;
}

int ScorePValueTable::int_score(const Sequence& seq, std::size_t pos,
                                char strand) const {
  int s = 0;
  std::size_t w = int_columns.size();
  for (std::size_t c = 0; c < w; ++c) {
    Base b = (strand == '+') ? seq[pos + c]
                             : complement_base(seq[pos + w - 1 - c]);
    s += int_columns[c][b];
  }
  return s;
}

double ScorePValueTable::p_value(int s) const {
  if (s <= 0) return 1.0;
  if (s > max_int) return 0.0;
  return tail[s];
}

std::vector<MotifHit> scan(const Sequence& seq, const Pwm& pwm,
                           const ScorePValueTable& table, double p_threshold) {
  if (seq.length() < pwm.width()) {
    throw SequenceTooShort("sequence shorter than motif width");
  }
  if (!(p_threshold > 0 && p_threshold <= 1)) {
    throw ConfigError("p_threshold must be in (0,1]");
  }
  std::vector<MotifHit> hits;
  for (std::size_t pos = 0; pos + pwm.width() <= seq.length(); ++pos) {
    for (char strand : {'+', '-'}) {
      double p = table.p_value(table.int_score(seq, pos, strand));
      if (p < p_threshold) {
        hits.push_back({pwm.name, pos, strand, pwm.score(seq, pos, strand), p});
      }
    }
  }
  return hits;
}

std::vector<double> bh_qvalues(const std::vector<double>& p_values) {
  if (p_values.empty()) throw EmptyInput("no p-values");
  const std::size_t n = p_values.size();
  for (double p : p_values) {
    if (!(p > 0 && p <= 1)) throw ConfigError("p-values must be in (0,1]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return p_values[a] < p_values[b];
                   });
  std::vector<double> q(n);
  double running = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    double candidate = p_values[order[i]] * static_cast<double>(n) /
                       static_cast<double>(i + 1);
    running = std::min(running, candidate);
    q[order[i]] = running;
  }
  return q;
}

ScoredMotif make_scored_motif(Ppm ppm, const Background& bg, double pseudocount,
                              int bins) {
  ScoredMotif sm;
  sm.pwm = ppm_to_pwm(ppm, bg, pseudocount);
  sm.table = build_pvalue_table(sm.pwm, bg, bins);
  sm.ppm = std::move(ppm);
  return sm;
}

FrequencyVector frequency_vector(std::span<const Sequence> sequences,
                                 std::span<const ScoredMotif> motifs,
                                 double p_threshold) {
  if (sequences.empty()) throw EmptyInput("no sequences");
  FrequencyVector fv;
  fv.motif_names.reserve(motifs.size());
  fv.values.assign(motifs.size(), 0.0);
  for (std::size_t m = 0; m < motifs.size(); ++m) {
    fv.motif_names.push_back(motifs[m].pwm.name);
    std::size_t total = 0;
    for (const auto& seq : sequences) {
      total += scan(seq, motifs[m].pwm, motifs[m].table, p_threshold).size();
    }
    fv.values[m] = static_cast<double>(total) /
                   static_cast<double>(sequences.size());
  }
  return fv;
}

double pearson(std::span<const double> a, std::span<const double> b,
               bool* zero_variance) {
  if (a.size() != b.size()) throw ShapeMismatch("pearson: length mismatch");
  if (a.size() < 2) throw EmptyInput("pearson needs >= 2 values");
  if (zero_variance) *zero_variance = false;
  const double n = static_cast<double>(a.size());
  double mean_a = 0, mean_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0, var_a = 0, var_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - mean_a, db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  double eps_a = 1e-20 * n * (1.0 + mean_a * mean_a);
  double eps_b = 1e-20 * n * (1.0 + mean_b * mean_b);
  if (var_a <= eps_a || var_b <= eps_b) {
    if (zero_variance) *zero_variance = true;
    return 0.0;
  }
  double r = cov / std::sqrt(var_a * var_b);
  return std::clamp(r, -1.0, 1.0);
}

double pearson(const FrequencyVector& a, const FrequencyVector& b,
               bool* zero_variance) {
  return pearson(std::span<const double>(a.values),
                 std::span<const double>(b.values), zero_variance);
}

double percentile_value(std::vector<double> values, double percentile) {
  if (values.empty()) throw EmptyInput("percentile of empty list");
  if (!(percentile >= 0 && percentile <= 100)) {
    throw ConfigError("percentile must be in [0,100]");
  }
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  double h = (values.size() - 1) * percentile / 100.0;
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

FrequencyVector reference_frequency(const FitnessTable& table,
                                    const std::string& target,
                                    std::span<const std::string> off_targets,
                                    std::span<const ScoredMotif> motifs,
                                    double p_threshold, double percentile) {
  if (table.records.empty()) throw EmptyInput("empty fitness table");
  std::size_t target_idx = table.label_index(target);
  std::vector<std::size_t> off_idx;
  for (const auto& label : off_targets) off_idx.push_back(table.label_index(label));

  double target_cut = percentile_value(table.column(target_idx), percentile);
  std::vector<double> off_cuts;
  for (std::size_t idx : off_idx) {
    off_cuts.push_back(percentile_value(table.column(idx), 100.0 - percentile));
  }

  std::vector<Sequence> selected;
  for (const auto& rec : table.records) {
    if (rec.fitness[target_idx] < target_cut) continue;
    bool ok = true;
    for (std::size_t i = 0; i < off_idx.size(); ++i) {
      if (rec.fitness[off_idx[i]] > off_cuts[i]) {
        ok = false;
        break;
      }
    }
    if (ok) selected.push_back(rec.sequence);
  }
  if (selected.empty()) {
    throw EmptySelection("no record passes the percentile filters");
  }
  return frequency_vector(selected, motifs, p_threshold);
}

}  // namespace ctrlseq
