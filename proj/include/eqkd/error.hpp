#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eqkd {

enum class Errc {
    DimensionMismatch,
    NotNormalizable,
    UnknownLabel,
    SameQubit,
    DuplicateLabel,
    LabelMismatch,
    ConfigMismatch,
    InvalidConfig,
    MissingAnnouncement,
    EmptySample,
    UnsupportedCombination,
    OutOfRange,
    LengthMismatch,
    DivisionByZero,
    EmptyInput,
    HeterogeneousCell,
    GridTooLarge,
    ParseError,
};

std::string_view errc_name(Errc code);

/// Every library failure is reported through this type; `code()` names the
/// contract that was violated.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace eqkd
