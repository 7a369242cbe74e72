#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctrlseq/error.hpp"

namespace ctrlseq {

// Fixed nucleotide codes: A=0, C=1, G=2, T=3. PPM rows use the same order.
using Base = std::uint8_t;

inline constexpr char kBaseChars[4] = {'A', 'C', 'G', 'T'};

// -1 for anything outside ACGT (including N).
int base_from_char(char c);

inline Base complement_base(Base b) { return static_cast<Base>(3 - b); }

// Fixed-length string over {A,C,G,T}. Immutable after construction.
class Sequence {
 public:
  explicit Sequence(std::vector<Base> bases);

  // Case-insensitive; throws InvalidCharacter / LengthMismatch.
  static Sequence parse(std::string_view text, std::size_t expected_length);

  std::size_t length() const { return bases_.size(); }
  Base operator[](std::size_t i) const { return bases_[i]; }
  const std::vector<Base>& bases() const { return bases_; }

  std::string str() const;
  Sequence reverse_complement() const;

  bool operator==(const Sequence&) const = default;

 private:
  std::vector<Base> bases_;
};

struct FastaRecord {
  std::string name;
  std::string raw;
};

// One record per ">" header; multi-line bodies concatenated, blank lines
// skipped, CRLF tolerated. Throws MalformedFasta on body before a header.
std::vector<FastaRecord> parse_fasta(std::istream& in);

void write_fasta(std::ostream& out, std::span<const Sequence> seqs,
                 std::string_view name_prefix = "seq");

struct FitnessRecord {
  Sequence sequence;
  std::vector<double> fitness;  // aligned with FitnessTable::labels
};

struct FitnessTable {
  std::vector<std::string> labels;
  std::vector<FitnessRecord> records;

  // Throws ConfigError if the label is absent.
  std::size_t label_index(const std::string& label) const;
  std::vector<double> column(std::size_t idx) const;
};

// Header "sequence\t<label>..." then one row per sequence. length = 0 takes
// the first row's length as the required length.
FitnessTable parse_fitness_tsv(std::istream& in, std::size_t length = 0);

void write_fitness_tsv(std::ostream& out, const FitnessTable& table);

}  // namespace ctrlseq
