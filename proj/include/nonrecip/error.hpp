#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nonrecip {

enum class ErrorKind {
    DuplicatePair,
    GainAboveThreshold,
    FrustratedConjugation,
    InvalidMode,
    InvalidCoupling,
    DomainError,
    SingularMatrix,
    EmptyBand,
    TopologyError,
    AmbiguousMinimum,
    ConfigError,
    SchemaError,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The message
/// always starts with the kind name so CLI output names the violated rule.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when M(δ) cannot be inverted (parametric oscillation point).
class SingularMatrixError : public Error {
public:
    explicit SingularMatrixError(double delta_hz);

    double delta_hz() const noexcept { return delta_hz_; }

private:
    double delta_hz_;
};

}  // namespace nonrecip
