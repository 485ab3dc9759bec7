#pragma once

#include <stdexcept>
#include <string>

namespace greentune {

// Caller broke a documented precondition (dimension mismatch, bad index, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid user-supplied configuration (unknown names, out-of-range settings).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data unusable for the requested operation (empty, malformed).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Header of an input table does not match the documented schema.
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

// A class has too few members to be spread over the requested folds.
class StratificationError : public DataError {
 public:
  using DataError::DataError;
};

// A statistic is undefined for the supplied data (e.g. a single class).
class StatisticsError : public DataError {
 public:
  using DataError::DataError;
};

// Results being compared were not produced under the same protocol.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation budget too small for the requested optimizer.
class BudgetError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace greentune
