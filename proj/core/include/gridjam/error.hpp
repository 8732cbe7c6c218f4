#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace gridjam {

enum class ErrorKind {
  DisconnectedGrid,
  RankDeficient,
  BadIndex,
  DimensionMismatch,
  Disconnected,
  AllContracted,
  InfeasibleCut,
  TooLarge,
  NoRemovalWorks,
  ParseError,
  ValidationError,
  UnknownId,
  IoError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.  Parse errors also carry a 1-based line number.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<int> line = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<int> line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::optional<int> line_;
};

}  // namespace gridjam
