#include "hypotest/errors.hpp"

namespace hypotest {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NegativeMass: return "NegativeMass";
        case ErrorKind::ColumnNotNormalized: return "ColumnNotNormalized";
        case ErrorKind::DuplicateLabel: return "DuplicateLabel";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::InvalidRule: return "InvalidRule";
        case ErrorKind::InvalidCoefficients: return "InvalidCoefficients";
        case ErrorKind::InvalidProbability: return "InvalidProbability";
        case ErrorKind::CapExceeded: return "CapExceeded";
        case ErrorKind::NotInRegion: return "NotInRegion";
        case ErrorKind::InfeasibleWithinKmax: return "InfeasibleWithinKmax";
        case ErrorKind::NotTwoDimensional: return "NotTwoDimensional";
        case ErrorKind::NonPositiveKappa: return "NonPositiveKappa";
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::NoFeasibleVertex: return "NoFeasibleVertex";
        case ErrorKind::NoFeasibleMixture: return "NoFeasibleMixture";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> index, double value)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind), index_(index), value_(value) {}

} // namespace hypotest
