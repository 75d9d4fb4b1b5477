#pragma once

#include <stdexcept>
#include <string>

namespace barronlab {

/// Malformed or out-of-contract arguments (non-finite samples, dimension
/// mismatches, invalid measures, bad configurations).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Grid too coarse for the requested frequency cutoff.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain where a closed form is valid.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical method could not reach the requested accuracy. Carries the
/// best value found and a bound on its error.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double best, double bound)
      : std::runtime_error(what), best_value(best), error_bound(bound) {}
  double best_value;
  double error_bound;
};

/// A search that theory guarantees to succeed did not.
class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every sample was filtered out of the layer-wise fitting set; the margin s
/// is too small or ε too large.
class DegenerateMargin : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration or serialized document does not match its schema.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical property that must hold was found violated.
class AssertionFailure : public std::runtime_error {
 public:
  AssertionFailure(const std::string& metric, const std::string& what)
      : std::runtime_error(what), metric_name(metric) {}
  std::string metric_name;
};

}  // namespace barronlab
