#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cch {

enum class ErrorKind {
    InvalidArgument,
    SymmetryViolation,
    NonZeroMeanForNegativePower,
    DegreeTooHigh,
    BlowUp,
    NonContraction,
    ConstraintUnsatisfiable,
    OutOfRange,
    InsufficientData,
    NonPositiveValue,
    QuadratureFailure,
    UnreachableTarget,
    ConfigError,
    IoError,
};

/// Stable snake_case name of an error category, used in CLI diagnostics.
std::string_view error_category(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view category() const noexcept { return error_category(kind_); }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace cch
