#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ergphase {

// Every failure mode carries a stable kind string (for machine parsing on
// stderr) and the process exit code the CLI maps it to.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message, int exit_code)
        : std::runtime_error(message), kind_(std::move(kind)), exit_code_(exit_code) {}

    const std::string& kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return exit_code_; }

private:
    std::string kind_;
    int exit_code_;
};

// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& message) : Error("DomainError", message, 3) {}
};

// The variational identity for the limiting free energy requires nonnegative
// interaction couplings; calculus operations stay available regardless.
class HypothesisViolation : public Error {
public:
    explicit HypothesisViolation(const std::string& message)
        : Error("HypothesisViolation", message, 3) {}
};

// Exponent pair outside 2 <= p <= q <= 5p-1.
class AssumptionViolation : public Error {
public:
    explicit AssumptionViolation(const std::string& message)
        : Error("AssumptionViolation", message, 3) {}
};

// p = q collapses the two interaction terms into one.
class DegenerateModel : public Error {
public:
    explicit DegenerateModel(const std::string& message)
        : Error("DegenerateModel", message, 3) {}
};

// Requested derivative quantity is infinite on the transition set.
class SurfaceError : public Error {
public:
    explicit SurfaceError(const std::string& message) : Error("SurfaceError", message, 3) {}
};

// A solver could not certify its structural guarantees.
class NumericalFailure : public Error {
public:
    explicit NumericalFailure(const std::string& message)
        : Error("NumericalFailure", message, 4) {}
};

// Work estimate exceeds the configured desk-scale budget.
class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& message) : Error("ResourceError", message, 5) {}
};

// CLI figure id outside the catalogue.
class UnknownFigure : public Error {
public:
    explicit UnknownFigure(const std::string& message) : Error("UnknownFigure", message, 2) {}
};

} // namespace ergphase
