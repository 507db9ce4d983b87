#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pbphase {

enum class ErrorKind {
    degree_too_large,
    singular_state,
    truncation_failure,
    resolution_too_low,
    window_too_small,
    quadrature_failure,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::degree_too_large: return "DegreeTooLarge";
    case ErrorKind::singular_state: return "SingularState";
    case ErrorKind::truncation_failure: return "TruncationFailure";
    case ErrorKind::resolution_too_low: return "ResolutionTooLow";
    case ErrorKind::window_too_small: return "WindowTooSmall";
    case ErrorKind::quadrature_failure: return "QuadratureFailure";
    }
    return "Unknown";
}

// Base of every domain error raised by the library. Argument validation
// failures (negative squeeze, malformed windows) use std::invalid_argument.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

template <ErrorKind K>
class TypedError : public Error {
public:
    explicit TypedError(const std::string& what) : Error(K, what) {}
};

using DegreeTooLarge = TypedError<ErrorKind::degree_too_large>;
using SingularState = TypedError<ErrorKind::singular_state>;
using TruncationFailure = TypedError<ErrorKind::truncation_failure>;
using ResolutionTooLow = TypedError<ErrorKind::resolution_too_low>;
using WindowTooSmall = TypedError<ErrorKind::window_too_small>;
using QuadratureFailure = TypedError<ErrorKind::quadrature_failure>;

} // namespace pbphase
