#include "eqkd/error.hpp"

namespace eqkd {

std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::NotNormalizable: return "NotNormalizable";
        case Errc::UnknownLabel: return "UnknownLabel";
        case Errc::SameQubit: return "SameQubit";
        case Errc::DuplicateLabel: return "DuplicateLabel";
        case Errc::LabelMismatch: return "LabelMismatch";
        case Errc::ConfigMismatch: return "ConfigMismatch";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::MissingAnnouncement: return "MissingAnnouncement";
        case Errc::EmptySample: return "EmptySample";
        case Errc::UnsupportedCombination: return "UnsupportedCombination";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::DivisionByZero: return "DivisionByZero";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::HeterogeneousCell: return "HeterogeneousCell";
        case Errc::GridTooLarge: return "GridTooLarge";
        case Errc::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace eqkd
