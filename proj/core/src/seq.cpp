#include "ctrlseq/seq.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace ctrlseq {

int base_from_char(char c) {
  switch (c) {
    case 'A': case 'a': return 0;
    case 'C': case 'c': return 1;
    case 'G': case 'g': return 2;
    case 'T': case 't': return 3;
    default: return -1;
  }
}

Sequence::Sequence(std::vector<Base> bases) : bases_(std::move(bases)) {
  if (bases_.empty()) throw LengthMismatch("sequence must be non-empty");
  for (Base b : bases_) {
    if (b > 3) throw InvalidCharacter("invalid nucleotide code");
  }
}

Sequence Sequence::parse(std::string_view text, std::size_t expected_length) {
  if (text.size() != expected_length) {
    throw LengthMismatch("expected length " + std::to_string(expected_length) +
                         ", got " + std::to_string(text.size()));
  }
  std::vector<Base> bases;
  bases.reserve(text.size());
  for (char c : text) {
    int code = base_from_char(c);
    if (code < 0) {
      throw InvalidCharacter(std::string("invalid nucleotide '") + c + "'");
    }
    bases.push_back(static_cast<Base>(code));
  }
  return Sequence(std::move(bases));
}

std::string Sequence::str() const {
  std::string s;
  s.reserve(bases_.size());
  for (Base b : bases_) s.push_back(kBaseChars[b]);
  return s;
}

Sequence Sequence::reverse_complement() const {
  std::vector<Base> rc(bases_.size());
  for (std::size_t i = 0; i < bases_.size(); ++i) {
    rc[i] = complement_base(bases_[bases_.size() - 1 - i]);
  }
  return Sequence(std::move(rc));
}

namespace {

std::string strip_cr(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
    line.pop_back();
  }
  return line;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::vector<FastaRecord> parse_fasta(std::istream& in) {
  std::vector<FastaRecord> records;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (is_blank(line)) continue;
    if (line[0] == '>') {
      std::string name = line.substr(1);
      // trim surrounding whitespace
      auto b = name.find_first_not_of(" \t");
      auto e = name.find_last_not_of(" \t");
      name = (b == std::string::npos) ? "" : name.substr(b, e - b + 1);
      records.push_back({name, ""});
      seen_header = true;
    } else {
      if (!seen_header) throw MalformedFasta("sequence body before first header");
      records.back().raw += line;
    }
  }
  return records;
}

void write_fasta(std::ostream& out, std::span<const Sequence> seqs,
                 std::string_view name_prefix) {
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    out << '>' << name_prefix << '_' << i << '\n' << seqs[i].str() << '\n';
  }
}

std::size_t FitnessTable::label_index(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  throw ConfigError("unknown cell-type label '" + label + "'");
}

std::vector<double> FitnessTable::column(std::size_t idx) const {
  std::vector<double> col;
  col.reserve(records.size());
  for (const auto& r : records) col.push_back(r.fitness[idx]);
  return col;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

}  // namespace

FitnessTable parse_fitness_tsv(std::istream& in, std::size_t length) {
  std::string line;
  if (!std::getline(in, line)) throw HeaderMissing("empty fitness table");
  line = strip_cr(line);
  auto header = split_tabs(line);
  if (header.empty() || header[0] != "sequence") {
    throw HeaderMissing("first header column must be 'sequence'");
  }
  FitnessTable table;
  table.labels.assign(header.begin() + 1, header.end());
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (is_blank(line)) continue;
    auto fields = split_tabs(line);
    if (fields.size() != header.size()) {
      throw ColumnCountMismatch("row has " + std::to_string(fields.size()) +
                                " columns, header has " +
                                std::to_string(header.size()));
    }
    std::vector<double> fitness;
    fitness.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0;
      auto [ptr, ec] = std::from_chars(fields[i].data(),
                                       fields[i].data() + fields[i].size(), v);
      if (ec != std::errc{} || ptr != fields[i].data() + fields[i].size() ||
          !std::isfinite(v)) {
        throw NonNumericFitness("bad fitness value '" + fields[i] + "'");
      }
      fitness.push_back(v);
    }
    if (length == 0) length = fields[0].size();
    table.records.push_back({Sequence::parse(fields[0], length),
                             std::move(fitness)});
  }
  return table;
}

void write_fitness_tsv(std::ostream& out, const FitnessTable& table) {
  out << "sequence";
  for (const auto& label : table.labels) out << '\t' << label;
  out << '\n';
  std::ostringstream num;
  num.precision(17);
  for (const auto& r : table.records) {
    out << r.sequence.str();
    for (double v : r.fitness) {
      num.str("");
      num << v;
      out << '\t' << num.str();
    }
    out << '\n';
  }
}

}  // namespace ctrlseq
