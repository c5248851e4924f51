#pragma once

#include <stdexcept>
#include <string>

namespace lmbreak {

/// Argument outside the mathematical domain of an operation (negative
/// statistic, probability outside (0,1), nonpositive price, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Fewer observations than the operation needs.
class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Zero sample variance: the CUSUM statistic is undefined.
class DegenerateSeries : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mean/sigma/transition description violating its invariants.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that cannot be read or parsed.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lmbreak
