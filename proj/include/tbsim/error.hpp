#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tbsim {

enum class ErrorKind {
    Capacity,
    DimensionMismatch,
    TargetOutOfRange,
    NotUnitary,
    NotProjector,
    InvalidFamily,
    ZeroDenominator,
    CombinatorialLimit,
    NullProjection,
    WitnessNotReady,
    DepthLimit,
    BothZero,
    InvalidArgument,
    Config,
};

std::string_view error_name(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind, so callers (and the CLI)
/// can branch on it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept { return error_name(kind_); }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace tbsim
