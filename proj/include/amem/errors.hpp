#pragma once

#include <stdexcept>
#include <string>

namespace amem {

// Shape or size contract violated (pattern counts, vector lengths, matrix sizes).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A scalar parameter outside its admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Probability input that does not sum to one or has negative mass.
class NormalizationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// log of a non-positive value, division by zero mass, non-finite weights.
class NumericDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed file contents (pattern text, weight files, config).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A long-running operation stopped because cancellation was requested.
class Interrupted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace amem
