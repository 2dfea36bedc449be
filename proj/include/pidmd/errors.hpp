#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pidmd {

enum class ErrorKind {
  InvalidInput,
  DegenerateInput,
  NumericalFailure,
  SingularEigenvalue,
  DivergenceDetected,
  SpecRejected,
};

std::string_view to_string(ErrorKind kind);

/// Process exit code used by the command-line driver for each error kind.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::InvalidInput, what);
}

}  // namespace pidmd
