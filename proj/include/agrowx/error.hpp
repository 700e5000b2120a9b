#pragma once

#include <stdexcept>
#include <string>

namespace agrowx {

/// Error classes surfaced by the toolkit. The CLI maps each to a distinct exit code.
enum class ErrorKind {
    Format = 1,
    Calendar,
    StationMismatch,
    DuplicateRow,
    AllMissing,
    UnknownDirection,
    DegenerateFeature,
    UnknownStation,
    TooShort,
    SingularRegression,
    ShapeMismatch,
    NonFinite,
    Divergence,
    EmptyInput,
    InsufficientForecast,
    ChecksumMismatch,
    UnsupportedVersion,
    CorruptFile,
    MissingArtifact,
    Config,
    Io,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Format: return "FormatError";
        case ErrorKind::Calendar: return "CalendarViolation";
        case ErrorKind::StationMismatch: return "StationMismatch";
        case ErrorKind::DuplicateRow: return "DuplicateRow";
        case ErrorKind::AllMissing: return "AllMissing";
        case ErrorKind::UnknownDirection: return "UnknownDirection";
        case ErrorKind::DegenerateFeature: return "DegenerateFeature";
        case ErrorKind::UnknownStation: return "UnknownStation";
        case ErrorKind::TooShort: return "TooShort";
        case ErrorKind::SingularRegression: return "SingularRegression";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::NonFinite: return "NonFiniteGradient";
        case ErrorKind::Divergence: return "DivergenceDetected";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::InsufficientForecast: return "InsufficientForecast";
        case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
        case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorKind::CorruptFile: return "CorruptFile";
        case ErrorKind::MissingArtifact: return "MissingArtifact";
        case ErrorKind::Config: return "ConfigError";
        case ErrorKind::Io: return "IoError";
    }
    return "Error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace agrowx
