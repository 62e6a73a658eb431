#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tf {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument outside an operation's domain (N < 0, bad density, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Coulomb potential evaluated on top of a nucleus.
class SingularityError : public Error {
public:
  using Error::Error;
};

class ConfigurationError : public Error {
public:
  using Error::Error;
};

/// Requested electron count exceeds what mu = 0 can hold.
class InfeasibleError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

/// Iterative solver failed; carries the residual history for diagnosis.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

private:
  std::vector<double> history_;
};

} // namespace tf
