#include "nonrecip/error.hpp"

#include <cstdio>

namespace nonrecip {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DuplicatePair: return "DuplicatePair";
        case ErrorKind::GainAboveThreshold: return "GainAboveThreshold";
        case ErrorKind::FrustratedConjugation: return "FrustratedConjugation";
        case ErrorKind::InvalidMode: return "InvalidMode";
        case ErrorKind::InvalidCoupling: return "InvalidCoupling";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::SingularMatrix: return "SingularMatrix";
        case ErrorKind::EmptyBand: return "EmptyBand";
        case ErrorKind::TopologyError: return "TopologyError";
        case ErrorKind::AmbiguousMinimum: return "AmbiguousMinimum";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::SchemaError: return "SchemaError";
    }
    return "Unknown";
}

namespace {
std::string singular_detail(double delta_hz) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "dynamics matrix not invertible at delta = %.9g Hz", delta_hz);
    return buf;
}
}  // namespace

SingularMatrixError::SingularMatrixError(double delta_hz)
    : Error(ErrorKind::SingularMatrix, singular_detail(delta_hz)), delta_hz_(delta_hz) {}

}  // namespace nonrecip
