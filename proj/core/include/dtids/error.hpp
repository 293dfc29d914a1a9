#pragma once

#include <stdexcept>
#include <string>

namespace dtids {

/// Base of every error the toolkit throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration: bad hyperparameters, unknown names, missing config
// files. The CLI maps these to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Problems with the data being processed. The CLI maps these to exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public DataError {
 public:
  using DataError::DataError;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class IngestError : public DataError {
 public:
  using DataError::DataError;
};

class EncodeError : public DataError {
 public:
  using DataError::DataError;
};

class ImputeError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyDomainError : public DataError {
 public:
  using DataError::DataError;
};

class TransferError : public DataError {
 public:
  using DataError::DataError;
};

class EvalError : public DataError {
 public:
  using DataError::DataError;
};

/// Statistic is undefined for the given input (constant column, single class).
class UndefinedStatisticError : public DataError {
 public:
  using DataError::DataError;
};

/// A statistical test cannot be applied to a sample of this size.
class TestInapplicableError : public DataError {
 public:
  using DataError::DataError;
};

class StratificationError : public DataError {
 public:
  using DataError::DataError;
};

class ScenarioError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Backward called on a layer without a preceding training-mode forward.
class StateError : public Error {
 public:
  using Error::Error;
};

/// Loss became NaN or infinite. The CLI maps this to exit code 4.
class DivergedError : public Error {
 public:
  using Error::Error;
};

}  // namespace dtids
