/**
 * @file error.hpp
 * @brief Error kinds shared by every isaaq module.
 *
 * All recoverable failures are reported by throwing isaaq::Error. The kind
 * tag lets callers (and tests) distinguish failure classes without parsing
 * messages.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isaaq {

enum class ErrorKind {
    // circuit_ir
    MalformedSource,
    MultiQubitUnsupported,
    IndexOutOfRange,
    // device
    DisconnectedGraph,
    InvalidTopology,
    UnknownDevice,
    SameQubit,
    SubsetInfeasible,
    NotAdjacent,
    // partition
    BudgetTooSmall,
    // qubo
    DimensionMismatch,
    EmptyChunk,
    LengthMismatch,
    // solver
    Transport,
    Protocol,
    Timeout,
    // coeff_model
    EmptySampleSet,
    IoError,
    SchemaMismatch,
    // token_swap
    TooLarge,
    InvalidEdge,
    // pipeline
    VerificationFailed,
    InvalidArgument,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::MalformedSource: return "MalformedSource";
        case ErrorKind::MultiQubitUnsupported: return "MultiQubitUnsupported";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
        case ErrorKind::InvalidTopology: return "InvalidTopology";
        case ErrorKind::UnknownDevice: return "UnknownDevice";
        case ErrorKind::SameQubit: return "SameQubit";
        case ErrorKind::SubsetInfeasible: return "SubsetInfeasible";
        case ErrorKind::NotAdjacent: return "NotAdjacent";
        case ErrorKind::BudgetTooSmall: return "BudgetTooSmall";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::EmptyChunk: return "EmptyChunk";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::Transport: return "Transport";
        case ErrorKind::Protocol: return "Protocol";
        case ErrorKind::Timeout: return "Timeout";
        case ErrorKind::EmptySampleSet: return "EmptySampleSet";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::SchemaMismatch: return "SchemaMismatch";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::InvalidEdge: return "InvalidEdge";
        case ErrorKind::VerificationFailed: return "VerificationFailed";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace isaaq
