#include "cryptkit/error.hpp"

namespace cryptkit {

std::string_view errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::NonCoprimeModuli: return "NonCoprimeModuli";
    case Errc::NotInvertible: return "NotInvertible";
    case Errc::NotPrime: return "NotPrime";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::MalformedCiphertext: return "MalformedCiphertext";
    case Errc::OutOfGrid: return "OutOfGrid";
    case Errc::InvalidSymbol: return "InvalidSymbol";
    case Errc::NonResidue: return "NonResidue";
    case Errc::NoSolution: return "NoSolution";
    case Errc::AmbiguousSolution: return "AmbiguousSolution";
    case Errc::CheckFailed: return "CheckFailed";
    case Errc::AmbiguousPin: return "AmbiguousPin";
    case Errc::BadLength: return "BadLength";
    case Errc::KnownBlockInconsistent: return "KnownBlockInconsistent";
    case Errc::Mod15Singular: return "Mod15Singular";
    case Errc::ParseError: return "ParseError";
    case Errc::RangeError: return "RangeError";
    case Errc::NoCandidate: return "NoCandidate";
    case Errc::TooLarge: return "TooLarge";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::ZeroProbabilityBranch: return "ZeroProbabilityBranch";
    case Errc::BadMessageRange: return "BadMessageRange";
    }
    return "Unknown";
}

} // namespace cryptkit
