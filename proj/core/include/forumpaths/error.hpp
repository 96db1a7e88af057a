#pragma once

#include <stdexcept>
#include <string>

namespace forumpaths {

// Malformed or inconsistent input data. Parameter range violations use
// std::invalid_argument instead.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A statistic is undefined for the given input (e.g. zero variance).
// Callers usually skip the offending user.
class UndefinedStatistic : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace forumpaths
