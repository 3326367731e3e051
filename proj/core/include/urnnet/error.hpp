#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace urnnet {

enum class ErrorCode {
  NonSquare,
  NegativeEntry,
  RowSumExceedsOne,
  PositiveEntry,
  InconsistentClassification,
  SingularK,
  SingularBlock,
  ProbabilityOutOfRange,
  MismatchedShapes,
  TooFewRuns,
  NotApplicable,
  InvalidArgument,
  Io,
};

/// Library-wide exception. `row`/`col` carry the offending indices when the
/// error concerns a specific matrix entry or agent; otherwise they are npos.
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(ErrorCode code, std::string message, std::size_t row = npos,
        std::size_t col = npos)
      : std::runtime_error(std::move(message)), code_(code), row_(row), col_(col) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  ErrorCode code_;
  std::size_t row_;
  std::size_t col_;
};

}  // namespace urnnet
