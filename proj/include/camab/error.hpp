#pragma once

#include <stdexcept>
#include <string>

namespace camab {

enum class Errc {
    CyclicGraph,
    NonStochasticColumn,
    MissingMechanism,
    UnknownVariable,
    ValueOutOfDomain,
    InvalidDomain,
    ShapeMismatch,
    VariableNotRelevant,
    SupportMismatch,
    UnknownAction,
    ActionOutsideRelevantVars,
    UnmappedAction,
    OrphanAbstractAction,
    TargetMismatch,
    InvalidValueMap,
    UnsupportedMetric,
    AllGapsZero,
    NonZeroICError,
    LengthMismatch,
    UncoveredAbstractAction,
    InvalidDelta,
    ZeroCount,
    EmptyInput,
    UnknownScenario,
    IoError,
    ParseError,
    InvalidArgument,
};

inline const char* to_string(Errc e) {
    switch (e) {
        case Errc::CyclicGraph: return "CyclicGraph";
        case Errc::NonStochasticColumn: return "NonStochasticColumn";
        case Errc::MissingMechanism: return "MissingMechanism";
        case Errc::UnknownVariable: return "UnknownVariable";
        case Errc::ValueOutOfDomain: return "ValueOutOfDomain";
        case Errc::InvalidDomain: return "InvalidDomain";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::VariableNotRelevant: return "VariableNotRelevant";
        case Errc::SupportMismatch: return "SupportMismatch";
        case Errc::UnknownAction: return "UnknownAction";
        case Errc::ActionOutsideRelevantVars: return "ActionOutsideRelevantVars";
        case Errc::UnmappedAction: return "UnmappedAction";
        case Errc::OrphanAbstractAction: return "OrphanAbstractAction";
        case Errc::TargetMismatch: return "TargetMismatch";
        case Errc::InvalidValueMap: return "InvalidValueMap";
        case Errc::UnsupportedMetric: return "UnsupportedMetric";
        case Errc::AllGapsZero: return "AllGapsZero";
        case Errc::NonZeroICError: return "NonZeroICError";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::UncoveredAbstractAction: return "UncoveredAbstractAction";
        case Errc::InvalidDelta: return "InvalidDelta";
        case Errc::ZeroCount: return "ZeroCount";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::UnknownScenario: return "UnknownScenario";
        case Errc::IoError: return "IoError";
        case Errc::ParseError: return "ParseError";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace camab
