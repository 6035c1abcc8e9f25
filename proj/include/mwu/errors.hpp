#pragma once

#include <stdexcept>
#include <string>

namespace mwu {

/// Thrown when an argument lies outside the domain an operation accepts
/// (non-positive slope, learning rate outside (0,1), state off the simplex).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when the inputs are well formed but a mathematical precondition
/// fails: no critical points for a <= 4, no absorbing interval, no interior
/// equilibrium in an atomic game, a cascade that cannot be followed.
class PreconditionError : public std::domain_error {
 public:
  explicit PreconditionError(const std::string& what) : std::domain_error(what) {}
};

/// Output destination cannot be opened or written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mwu
