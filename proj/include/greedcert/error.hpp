#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace greedcert {

enum class ErrorCode {
    ZeroColumn,
    InvalidDimensions,
    DimensionMismatch,
    RankDeficientActiveSet,
    AllAtomsDegenerate,
    CoherenceTooLarge,
    InvalidCoherence,
    InvalidIndex,
    InvalidParameters,
    NotApplicable,
    ConstructionFailed,
    InfeasibleGeneration,
    IoError,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` identifies the failure,
/// `index()` carries the offending column/atom when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), index_(index) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> index_;
};

inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ZeroColumn: return "ZeroColumn";
    case ErrorCode::InvalidDimensions: return "InvalidDimensions";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficientActiveSet: return "RankDeficientActiveSet";
    case ErrorCode::AllAtomsDegenerate: return "AllAtomsDegenerate";
    case ErrorCode::CoherenceTooLarge: return "CoherenceTooLarge";
    case ErrorCode::InvalidCoherence: return "InvalidCoherence";
    case ErrorCode::InvalidIndex: return "InvalidIndex";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::ConstructionFailed: return "ConstructionFailed";
    case ErrorCode::InfeasibleGeneration: return "InfeasibleGeneration";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace greedcert
