#include "tbsim/error.hpp"

namespace tbsim {

std::string_view error_name(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::Capacity: return "CapacityError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TargetOutOfRange: return "TargetOutOfRange";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotProjector: return "NotProjector";
    case ErrorKind::InvalidFamily: return "InvalidFamily";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::CombinatorialLimit: return "CombinatorialLimit";
    case ErrorKind::NullProjection: return "NullProjection";
    case ErrorKind::WitnessNotReady: return "WitnessNotReady";
    case ErrorKind::DepthLimit: return "DepthLimit";
    case ErrorKind::BothZero: return "BothZero";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "ConfigError";
    }
    return "UnknownError";
}

}  // namespace tbsim
