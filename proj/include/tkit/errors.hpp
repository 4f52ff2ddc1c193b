#pragma once

#include <stdexcept>
#include <string>

namespace tkit {

// Input did not parse or failed a structural precondition (CLI exit 1).
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// A quantitative hypothesis of a solver was violated; carries the offending
// norm so callers can report it (CLI exit 2).
struct HypothesisViolation : std::runtime_error {
    double offending_norm;
    double allowed;
    HypothesisViolation(const std::string& what, double measured, double bound)
        : std::runtime_error(what + " (measured " + std::to_string(measured) +
                             ", allowed " + std::to_string(bound) + ")"),
          offending_norm(measured), allowed(bound) {}
};

// A stochastic search exhausted its budget (CLI exit 3). Diagnostics carry
// the best value reached so the failure is inspectable.
struct SearchFailure : std::runtime_error {
    double best_found;
    int attempts;
    SearchFailure(const std::string& what, double best, int tries)
        : std::runtime_error(what + " (best " + std::to_string(best) +
                             " after " + std::to_string(tries) + " attempts)"),
          best_found(best), attempts(tries) {}
};

}  // namespace tkit
