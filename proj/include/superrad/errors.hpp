#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace superrad {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Evaluation requested on the Kerr ring, inside the equatorial disc, or on the acoustic axis.
class DegeneratePoint : public Error {
 public:
  using Error::Error;
};

// dρ/dx₀ requested where ∂H/∂ξ₀ vanishes.
class HorizonQuotient : public Error {
 public:
  using Error::Error;
};

class QuadratureNonConvergence : public Error {
 public:
  using Error::Error;
};

// Scenario preconditions (parameter band, ergoregion membership) not met.
class GateFailed : public Error {
 public:
  using Error::Error;
};

class AuditViolation : public Error {
 public:
  using Error::Error;
};

// Collects every problem found in a config, each tagged with its line number (0 = no line).
class ConfigError : public Error {
 public:
  struct Item {
    int line;
    std::string message;
  };

  explicit ConfigError(std::vector<Item> items);
  const std::vector<Item>& items() const { return items_; }

 private:
  std::vector<Item> items_;
};

}  // namespace superrad
