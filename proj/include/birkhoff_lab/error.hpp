#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace birkhoff_lab {

enum class ErrorKind {
    Precondition,         // malformed input or violated precondition
    PrecisionExhausted,
    RationalInput,
    InsufficientDepth,
    UnsupportedExponent,
    LevelTooSmall,
    CaseSearchExhausted,
    InsufficientK,
    NoRoomForBump,
    SmallDenominator,
    DepthUnreachable,
    DegenerateSeries,
    MeshViolation,
    BudgetExceeded,
    HorizonBudget,
    PartitionGap,         // invariant violations: these indicate a bug
    CoverMismatch,
    InvariantViolation,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Precondition: return "Precondition";
        case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
        case ErrorKind::RationalInput: return "RationalInput";
        case ErrorKind::InsufficientDepth: return "InsufficientDepth";
        case ErrorKind::UnsupportedExponent: return "UnsupportedExponent";
        case ErrorKind::LevelTooSmall: return "LevelTooSmall";
        case ErrorKind::CaseSearchExhausted: return "CaseSearchExhausted";
        case ErrorKind::InsufficientK: return "InsufficientK";
        case ErrorKind::NoRoomForBump: return "NoRoomForBump";
        case ErrorKind::SmallDenominator: return "SmallDenominator";
        case ErrorKind::DepthUnreachable: return "DepthUnreachable";
        case ErrorKind::DegenerateSeries: return "DegenerateSeries";
        case ErrorKind::MeshViolation: return "MeshViolation";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::HorizonBudget: return "HorizonBudget";
        case ErrorKind::PartitionGap: return "PartitionGap";
        case ErrorKind::CoverMismatch: return "CoverMismatch";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

/// Process exit code for an error class: 2 precondition, 3 budget, 4 invariant (bug).
constexpr int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::BudgetExceeded:
        case ErrorKind::HorizonBudget:
        case ErrorKind::DepthUnreachable:
        case ErrorKind::CaseSearchExhausted:
            return 3;
        case ErrorKind::PartitionGap:
        case ErrorKind::CoverMismatch:
        case ErrorKind::InvariantViolation:
            return 4;
        default:
            return 2;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, std::string_view what) {
    if (!cond) fail(ErrorKind::Precondition, std::string(what));
}

inline void ensure(bool cond, ErrorKind kind, std::string_view what) {
    if (!cond) fail(kind, std::string(what));
}

} // namespace birkhoff_lab
