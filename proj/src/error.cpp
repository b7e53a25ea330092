#include "cch/error.hpp"

namespace cch {

std::string_view error_category(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::SymmetryViolation: return "symmetry_violation";
    case ErrorKind::NonZeroMeanForNegativePower: return "nonzero_mean_for_negative_power";
    case ErrorKind::DegreeTooHigh: return "degree_too_high";
    case ErrorKind::BlowUp: return "blow_up";
    case ErrorKind::NonContraction: return "non_contraction";
    case ErrorKind::ConstraintUnsatisfiable: return "constraint_unsatisfiable";
    case ErrorKind::OutOfRange: return "out_of_range";
    case ErrorKind::InsufficientData: return "insufficient_data";
    case ErrorKind::NonPositiveValue: return "non_positive_value";
    case ErrorKind::QuadratureFailure: return "quadrature_failure";
    case ErrorKind::UnreachableTarget: return "unreachable_target";
    case ErrorKind::ConfigError: return "config_error";
    case ErrorKind::IoError: return "io_error";
    }
    return "unknown";
}

} // namespace cch
