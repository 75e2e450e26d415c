#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace socsamp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument to an operation: out-of-range label, dimension mismatch, ...
class DomainError : public Error {
 public:
  using Error::Error;
};

// Config schema violation; the message names the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// One of the protocol assumptions (A1, A2, A2', A4) does not hold.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

// The stability precondition of the asymptotic covariance fails.
class HypothesisError : public Error {
 public:
  HypothesisError(double lambda2, double delta);
  double lambda2() const { return lambda2_; }
  double delta() const { return delta_; }

 private:
  double lambda2_;
  double delta_;
};

// Lyapunov operator is not stable.
class StabilityError : public Error {
 public:
  explicit StabilityError(std::complex<double> eigenvalue);
  std::complex<double> eigenvalue() const { return eigenvalue_; }

 private:
  std::complex<double> eigenvalue_;
};

// A trial produced a non-finite value.
class TrialAbort : public Error {
 public:
  TrialAbort(std::uint64_t trial, std::uint64_t seed, long step, const std::string& dump);
  std::uint64_t trial() const { return trial_; }
  std::uint64_t seed() const { return seed_; }
  long step() const { return step_; }

 private:
  std::uint64_t trial_;
  std::uint64_t seed_;
  long step_;
};

}  // namespace socsamp
