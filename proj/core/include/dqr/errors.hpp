#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dqr {

// Input outside the mathematical domain of an operation (zero detuning, nonpositive
// capacitance, negative time, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A steady state that does not exist: no damping and no detuning.
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

// gamma_r * duration >= 1: the qubit has fully relaxed and the linearized
// fidelity model no longer applies.
class CompleteDecayError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Invalid or incomplete run configuration. `key` names the offending entry when
// there is one (for example "device.kappa_per_s").
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string key = {})
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Integration grid too coarse for the dynamics it must resolve.
class StepSizeError : public ConfigError {
 public:
  StepSizeError(const std::string& what, double required_step)
      : ConfigError(what), required_step_(required_step) {}
  double required_step() const noexcept { return required_step_; }

 private:
  double required_step_;
};

// Fock-space truncation too small: the top levels carry population.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, int suggested_n_fock)
      : std::runtime_error(what), suggested_n_fock_(suggested_n_fock) {}
  int suggested_n_fock() const noexcept { return suggested_n_fock_; }

 private:
  int suggested_n_fock_;
};

// A numerical fit whose residual is too large to trust the fitted parameter.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dqr
