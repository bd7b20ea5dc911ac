#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "json.hpp"

namespace mee {

// Base for every failure the library reports. `kind()` is a stable
// machine-readable tag; `details()` carries the numbers behind the failure.
class Error : public std::runtime_error {
 public:
  Error(const std::string& message, nlohmann::json details = nlohmann::json::object())
      : std::runtime_error(message), details_(std::move(details)) {}

  virtual const char* kind() const noexcept { return "error"; }
  const nlohmann::json& details() const noexcept { return details_; }

  nlohmann::json to_json() const {
    return {{"error", kind()}, {"message", what()}, {"details", details_}};
  }

 private:
  nlohmann::json details_;
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

// The constrained problem has no admissible solution (no sign change,
// non-positive constant a, empty epsilon grid, ...).
class InfeasibleError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "infeasible"; }
};

// An iteration failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numerical"; }
};

// The constraint manifold has a vanishing tangential gradient everywhere.
class DegenerateManifoldError : public DomainError {
 public:
  using DomainError::DomainError;
  const char* kind() const noexcept override { return "degenerate_manifold"; }
};

// Malformed input files or arguments.
class ParseError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parse"; }
};

}  // namespace mee
