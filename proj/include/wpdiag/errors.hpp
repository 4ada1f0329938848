#pragma once

#include <stdexcept>
#include <string>

namespace wpdiag {

enum class ErrorCode {
    InvalidMap,
    PoleAtBasepoint,
    DegenerateInterval,
    ChartSingularity,
    OnExcludedPlane,
    ZeroVector,
    NotMonotone,
    NotEquivariant,
    NonAbsolutelyContinuous,
    LiftMismatch,
    ScaleTooCoarse,
    PinchFailure,
    NotTimeRelated,
    OutsideKleinDomain,
    FrameInvalid,
    OutOfRange,
    InvalidSpec,
    InvalidConfig,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidMap: return "InvalidMap";
    case ErrorCode::PoleAtBasepoint: return "PoleAtBasepoint";
    case ErrorCode::DegenerateInterval: return "DegenerateInterval";
    case ErrorCode::ChartSingularity: return "ChartSingularity";
    case ErrorCode::OnExcludedPlane: return "OnExcludedPlane";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::NotEquivariant: return "NotEquivariant";
    case ErrorCode::NonAbsolutelyContinuous: return "NonAbsolutelyContinuous";
    case ErrorCode::LiftMismatch: return "LiftMismatch";
    case ErrorCode::ScaleTooCoarse: return "ScaleTooCoarse";
    case ErrorCode::PinchFailure: return "PinchFailure";
    case ErrorCode::NotTimeRelated: return "NotTimeRelated";
    case ErrorCode::OutsideKleinDomain: return "OutsideKleinDomain";
    case ErrorCode::FrameInvalid: return "FrameInvalid";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

}  // namespace wpdiag
