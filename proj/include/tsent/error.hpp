// tsent - entropy of Markov tree shifts on Cayley trees
//
// Error type shared by every module. A single exception class carries a
// machine-checkable code so tests and the CLI can branch on the failure kind.

#ifndef TSENT_ERROR_HPP_
#define TSENT_ERROR_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tsent {

  enum class ErrorCode {
    NonSquare,
    NonBinaryEntry,
    DeadRow,
    IndexOutOfRange,
    NotIrreducible,
    NoConvergence,
    DimensionMismatch,
    EmptyAlphabet,
    DepthCapExceeded,
    OracleTooLarge,
    EmptyShift,
    ParseError,
    ValidationError,
    UnknownCommand,
    InvalidArgument
  };

  constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
      case ErrorCode::NonSquare: return "NonSquare";
      case ErrorCode::NonBinaryEntry: return "NonBinaryEntry";
      case ErrorCode::DeadRow: return "DeadRow";
      case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
      case ErrorCode::NotIrreducible: return "NotIrreducible";
      case ErrorCode::NoConvergence: return "NoConvergence";
      case ErrorCode::DimensionMismatch: return "DimensionMismatch";
      case ErrorCode::EmptyAlphabet: return "EmptyAlphabet";
      case ErrorCode::DepthCapExceeded: return "DepthCapExceeded";
      case ErrorCode::OracleTooLarge: return "OracleTooLarge";
      case ErrorCode::EmptyShift: return "EmptyShift";
      case ErrorCode::ParseError: return "ParseError";
      case ErrorCode::ValidationError: return "ValidationError";
      case ErrorCode::UnknownCommand: return "UnknownCommand";
      case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
  }

  class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, std::string const& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what),
          _code(code) {}

    //! Wraps a lower-level error, e.g. ValidationError caused by DeadRow.
    Error(ErrorCode code, ErrorCode cause, std::string const& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what),
          _code(code),
          _cause(cause) {}

    [[nodiscard]] ErrorCode code() const noexcept {
      return _code;
    }

    [[nodiscard]] std::optional<ErrorCode> cause() const noexcept {
      return _cause;
    }

   private:
    ErrorCode                _code;
    std::optional<ErrorCode> _cause;
  };

}  // namespace tsent

#endif  // TSENT_ERROR_HPP_
