#pragma once

#include <stdexcept>
#include <string>

namespace capa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data or a violated operation contract. The CLI maps these to exit status 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A metric or statistic is undefined on the given input (empty text, too few tokens, zero variance).
class UndefinedInput : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace capa
