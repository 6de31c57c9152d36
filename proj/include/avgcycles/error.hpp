#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace avgcycles {

enum class ErrorKind {
    InvalidArgument,
    ParseError,
    CenterConditionViolated,
    DegreeExceeded,
    GNearZero,
    QuadratureFailure,
    DomainExceeded,
    IndexOutOfRange,
    SymmetryViolation,
    ZeroPolynomial,
    NonpositiveRadius,
    RadiusCollapse,
    StepFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (CLI exit codes, Python bindings) can dispatch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace avgcycles
