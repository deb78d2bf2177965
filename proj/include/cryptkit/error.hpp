#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cryptkit {

enum class Errc {
    NonCoprimeModuli,
    NotInvertible,
    NotPrime,
    InvalidArgument,
    MalformedCiphertext,
    OutOfGrid,
    InvalidSymbol,
    NonResidue,
    NoSolution,
    AmbiguousSolution,
    CheckFailed,
    AmbiguousPin,
    BadLength,
    KnownBlockInconsistent,
    Mod15Singular,
    ParseError,
    RangeError,
    NoCandidate,
    TooLarge,
    IndexOutOfRange,
    ZeroProbabilityBranch,
    BadMessageRange,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the toolkit. The code identifies the failure
/// class; the message carries the instance details.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace cryptkit
