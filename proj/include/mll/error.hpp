#pragma once

#include <stdexcept>
#include <string>

namespace mll {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed CSV/ARFF/JSON input.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration: unknown label names, non-binary labels,
/// bad experiment files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its valid domain (sample sizes, fractions, bounds).
class RangeError : public Error {
 public:
  using Error::Error;
};

class PreprocessError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class PredictionError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Persisted model was fitted on a different attribute schema.
class SchemaMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace mll
