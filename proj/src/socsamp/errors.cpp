#include "socsamp/errors.hpp"

#include "socsamp/format.hpp"

namespace socsamp {

HypothesisError::HypothesisError(double lambda2, double delta)
    : Error("asymptotic normality hypothesis failed: lambda2 = " + format_real(lambda2) +
            " (requires lambda2 < 1 - delta/2 with delta = " + format_real(delta) + ")"),
      lambda2_(lambda2),
      delta_(delta) {}

StabilityError::StabilityError(std::complex<double> eigenvalue)
    : Error("Lyapunov operator is not stable: eigenvalue " + format_real(eigenvalue.real()) +
            (eigenvalue.imag() < 0 ? " - " : " + ") + format_real(std::abs(eigenvalue.imag())) +
            "i has nonnegative real part"),
      eigenvalue_(eigenvalue) {}

TrialAbort::TrialAbort(std::uint64_t trial, std::uint64_t seed, long step, const std::string& dump)
    : Error("trial " + std::to_string(trial) + " (seed " + std::to_string(seed) +
            ") aborted at step " + std::to_string(step) + ": non-finite state\n" + dump),
      trial_(trial),
      seed_(seed),
      step_(step) {}

}  // namespace socsamp
