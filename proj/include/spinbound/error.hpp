#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spinbound {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied evaluator produced NaN/Inf, or derivatives were non-finite.
class NumericalInputError : public Error {
 public:
  using Error::Error;
};

/// Minimum of the lower band could not be bracketed inside the search disk.
class SearchDomainError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the admissible domain (e.g. bump width a not in (0,2]).
class DomainError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class NoConvergenceError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Oscillatory quadrature would need more nodes than the per-evaluation cap.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& what, std::size_t attempted_nodes)
      : Error(what + " (attempted " + std::to_string(attempted_nodes) + " nodes)"),
        attempted_nodes_(attempted_nodes) {}

  std::size_t attempted_nodes() const noexcept { return attempted_nodes_; }

 private:
  std::size_t attempted_nodes_;
};

}  // namespace spinbound
