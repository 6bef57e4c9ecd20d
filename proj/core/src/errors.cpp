#include "chronoscale/errors.hpp"

namespace chronoscale {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::PointNotInScale: return "PointNotInScale";
        case ErrorCode::WindowExhausted: return "WindowExhausted";
        case ErrorCode::DerivativeDidNotConverge: return "DerivativeDidNotConverge";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::NotScattered: return "NotScattered";
        case ErrorCode::BlowUp: return "BlowUp";
        case ErrorCode::StiffnessFailure: return "StiffnessFailure";
        case ErrorCode::LeftDomain: return "LeftDomain";
        case ErrorCode::NonterminatingJumps: return "NonterminatingJumps";
        case ErrorCode::InvalidInputs: return "InvalidInputs";
        case ErrorCode::IterationDiverged: return "IterationDiverged";
        case ErrorCode::LeftBall: return "LeftBall";
        case ErrorCode::NotDiscrete: return "NotDiscrete";
        case ErrorCode::UnknownEntry: return "UnknownEntry";
        case ErrorCode::TimeMismatch: return "TimeMismatch";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace chronoscale
