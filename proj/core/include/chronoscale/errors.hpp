#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chronoscale {

enum class ErrorCode {
    InvalidSpec,
    InvalidArgument,
    PointNotInScale,
    WindowExhausted,
    DerivativeDidNotConverge,
    QuadratureFailure,
    NotScattered,
    BlowUp,
    StiffnessFailure,
    LeftDomain,
    NonterminatingJumps,
    InvalidInputs,
    IterationDiverged,
    LeftBall,
    NotDiscrete,
    UnknownEntry,
    TimeMismatch,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code says which contract failed.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace chronoscale
