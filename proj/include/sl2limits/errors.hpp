#pragma once

#include <stdexcept>
#include <string>

namespace sl2limits {

/// Base class for all arithmetic / geometry errors raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct LevelMismatch : Error {
    explicit LevelMismatch(const std::string& what) : Error(what) {}
};

/// Inverting a scalar whose known digits are all zero.
struct DivisionByInexactZero : Error {
    explicit DivisionByInexactZero(const std::string& what) : Error(what) {}
};

struct ZeroHasNoClass : Error {
    explicit ZeroHasNoClass(const std::string& what) : Error(what) {}
};

/// The Hensel inequality |f(a)| < |f'(a)|^2 fails at the start point.
struct HenselConditionFailed : Error {
    explicit HenselConditionFailed(const std::string& what) : Error(what) {}
};

struct PrecisionExhausted : Error {
    explicit PrecisionExhausted(const std::string& what) : Error(what) {}
};

/// Square-root request on a non-square; carries the witness class data.
struct NonSquare : Error {
    int vparity;      // parity of the valuation obstruction (0 or 1)
    bool unit_nonresidue;  // true when the unit part is a non-residue
    NonSquare(const std::string& what, int vp, bool nqr)
        : Error(what), vparity(vp), unit_nonresidue(nqr) {}
};

struct SingularMatrix : Error {
    explicit SingularMatrix(const std::string& what) : Error(what) {}
};

struct NotAnInvolution : Error {
    explicit NotAnInvolution(const std::string& what) : Error(what) {}
};

/// A case condition of the conjugator dispatch is an equality between
/// scalars known only inexactly; the defect is within precision noise.
struct CaseUndecidable : Error {
    explicit CaseUndecidable(const std::string& what) : Error(what) {}
};

/// No square root for c1^2 exists in any biquadratic tower for the chosen c2.
struct NoAdmissibleC : Error {
    explicit NoAdmissibleC(const std::string& what) : Error(what) {}
};

struct EigenvalueExtensionRequired : Error {
    explicit EigenvalueExtensionRequired(const std::string& what) : Error(what) {}
};

struct ProjectionRadiusExceeded : Error {
    explicit ProjectionRadiusExceeded(const std::string& what) : Error(what) {}
};

struct DecompositionSearchExhausted : Error {
    explicit DecompositionSearchExhausted(const std::string& what) : Error(what) {}
};

struct InternalInvariantViolation : Error {
    explicit InternalInvariantViolation(const std::string& what) : Error(what) {}
};

struct NoRealRoot : Error {
    explicit NoRealRoot(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace sl2limits
