#pragma once

#include <stdexcept>
#include <string>

namespace ctrlseq {

// Process exit codes: 0 success, 2 config, 3 data, 4 numeric, 5 io.
enum class ErrorCategory { config = 2, data = 3, numeric = 4, io = 5 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, std::string msg)
      : std::runtime_error(std::move(msg)), cat_(cat) {}
  ErrorCategory category() const { return cat_; }
  int exit_code() const { return static_cast<int>(cat_); }

 private:
  ErrorCategory cat_;
};

#define CTRLSEQ_ERROR(Name, Cat)                             \
  struct Name : Error {                                      \
    explicit Name(std::string msg)                           \
        : Error(ErrorCategory::Cat, std::move(msg)) {}       \
  }

// seq_core
CTRLSEQ_ERROR(InvalidCharacter, data);
CTRLSEQ_ERROR(LengthMismatch, data);
CTRLSEQ_ERROR(MalformedFasta, data);
CTRLSEQ_ERROR(HeaderMissing, data);
CTRLSEQ_ERROR(ColumnCountMismatch, data);
CTRLSEQ_ERROR(NonNumericFitness, data);

// motif_engine
CTRLSEQ_ERROR(MalformedMotif, data);
CTRLSEQ_ERROR(InvalidBackground, config);
CTRLSEQ_ERROR(DegenerateMotif, data);
CTRLSEQ_ERROR(SequenceTooShort, data);
CTRLSEQ_ERROR(EmptyInput, data);
CTRLSEQ_ERROR(EmptySelection, data);

// policy_model
CTRLSEQ_ERROR(OrderTooLarge, config);
CTRLSEQ_ERROR(EmptyCorpus, data);
CTRLSEQ_ERROR(ShapeMismatch, numeric);
CTRLSEQ_ERROR(NonFiniteGradient, numeric);

// reward_oracles
CTRLSEQ_ERROR(SingularSystem, numeric);

// constrained_trainer / eval
CTRLSEQ_ERROR(NonFiniteState, numeric);
CTRLSEQ_ERROR(NoConstraints, config);
CTRLSEQ_ERROR(EmptyBatch, data);
CTRLSEQ_ERROR(ConfigError, config);
CTRLSEQ_ERROR(IoError, io);

#undef CTRLSEQ_ERROR

}  // namespace ctrlseq
