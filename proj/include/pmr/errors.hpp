#pragma once

#include <stdexcept>
#include <string>

#include "pmr/types.hpp"

namespace pmr {

/// A parameter or input document is malformed or violates a type invariant.
class InvalidParameter : public std::invalid_argument {
 public:
  InvalidParameter(std::string parameter, const std::string& detail);

  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

/// The inputs are well formed but outside the physical domain of the model
/// (dissociated sector, homogeneous-field inversion, undefined decomposition).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A spin sector whose scaled spin number reached unity; its Hamiltonian is
/// unbounded below.
class DissociationError : public DomainError {
 public:
  DissociationError(HalfInteger m, double mbar, const std::string& detail);

  HalfInteger m() const noexcept { return m_; }
  double mbar() const noexcept { return mbar_; }

 private:
  HalfInteger m_;
  double mbar_;
};

/// An iterative numerical method exhausted its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pmr
