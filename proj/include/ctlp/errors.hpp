#ifndef CTLP_ERRORS_HPP
#define CTLP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ctlp {

/// Malformed or non-finite input (dimension mismatch, NaN coefficients, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation (t outside [0,T],
/// a > b, no positive singular value, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Instance/trajectory document rejected while loading. `path()` names the
/// offending field, e.g. "A[2][0][1]".
class LoadError : public InputError {
 public:
  LoadError(std::string path, const std::string& what)
      : InputError(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace ctlp

#endif  // CTLP_ERRORS_HPP
