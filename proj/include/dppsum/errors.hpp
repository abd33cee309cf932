#ifndef DPPSUM_ERRORS_HPP
#define DPPSUM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dppsum {

// Bad input: malformed files, violated preconditions, inconsistent sizes.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file contents. Messages name the line and/or field.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Factorization failures, non-PSD kernels, non-finite objectives.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dppsum

#endif  // DPPSUM_ERRORS_HPP
