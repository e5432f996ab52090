#pragma once

#include <stdexcept>
#include <string>

namespace riemlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a closed-form kernel or evaluator.
class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularMetricError : public Error {
 public:
  using Error::Error;
};

/// A geodesic left every chart, or integration drifted off the unit sphere bundle.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

class SamplerError : public Error {
 public:
  using Error::Error;
};

/// Malformed manifest, unknown manifold name, bad CLI parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace riemlab
