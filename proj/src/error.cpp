#include "avgcycles/error.hpp"

namespace avgcycles {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::CenterConditionViolated: return "CenterConditionViolated";
    case ErrorKind::DegreeExceeded: return "DegreeExceeded";
    case ErrorKind::GNearZero: return "GNearZero";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::DomainExceeded: return "DomainExceeded";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::SymmetryViolation: return "SymmetryViolation";
    case ErrorKind::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorKind::NonpositiveRadius: return "NonpositiveRadius";
    case ErrorKind::RadiusCollapse: return "RadiusCollapse";
    case ErrorKind::StepFailure: return "StepFailure";
    }
    return "Unknown";
}

}  // namespace avgcycles
