#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace hypotest {

enum class ErrorKind {
    NegativeMass,
    ColumnNotNormalized,
    DuplicateLabel,
    DimensionMismatch,
    InvalidRule,
    InvalidCoefficients,
    InvalidProbability,
    CapExceeded,
    NotInRegion,
    InfeasibleWithinKmax,
    NotTwoDimensional,
    NonPositiveKappa,
    InvalidSpec,
    NoFeasibleVertex,
    NoFeasibleMixture,
    BudgetExceeded,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure in the library surfaces as this exception. `index` names the
// offending hypothesis/observation where one exists; `value` carries the
// associated number (normalization deviation, required enumeration count...).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message,
          std::optional<std::size_t> index = std::nullopt, double value = 0.0);

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> index() const noexcept { return index_; }
    double value() const noexcept { return value_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> index_;
    double value_;
};

} // namespace hypotest
