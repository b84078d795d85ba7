#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sl2limits/errors.hpp"

namespace sl2limits {

using bigint = boost::multiprecision::cpp_int;

/**
 * Fixed data of the base field Q_p: the odd prime p, the global relative
 * precision N (base-p digits), and a distinguished unit non-square S.
 *
 * S is the smallest positive integer whose residue mod p is a quadratic
 * non-residue; the residue table is built once by exhaustive squaring.
 */
class PrimeContext {
public:
    PrimeContext(long p, int precision);

    long p() const { return p_; }
    int precision() const { return n_; }
    long nonsquare() const { return s_; }

    /// p^k for 0 <= k <= precision (cached).
    const bigint& p_pow(int k) const;

    /// Quadratic-residue test of a unit residue r mod p (1 <= r < p).
    bool is_residue(long r) const { return residue_[static_cast<size_t>(r)]; }

    static std::shared_ptr<const PrimeContext> make(long p, int precision = 40);

private:
    long p_;
    int n_;
    long s_;
    std::vector<bool> residue_;   // residue_[r] == true iff r is a QR mod p
    std::vector<bigint> pow_;
};

using PrimeContextPtr = std::shared_ptr<const PrimeContext>;

enum class UnitClass { QR, NQR };

/// Square class of a nonzero Q_p scalar: one of {1, omega, S, S*omega}.
struct SquareClass {
    int vparity = 0;             // valuation mod 2
    UnitClass unitclass = UnitClass::QR;

    enum Label { One, Omega, S, SOmega };
    Label label() const {
        if (vparity == 0) return unitclass == UnitClass::QR ? One : S;
        return unitclass == UnitClass::QR ? Omega : SOmega;
    }
    const char* name() const {
        switch (label()) {
            case One: return "1";
            case Omega: return "w";
            case S: return "S";
            default: return "Sw";
        }
    }
    bool operator==(const SquareClass& o) const {
        return vparity == o.vparity && unitclass == o.unitclass;
    }
    bool operator!=(const SquareClass& o) const { return !(*this == o); }
};

/**
 * A Q_p element at fixed relative precision ("p-adic floating point").
 *
 * Three states:
 *   - exact zero;
 *   - inexact zero O(p^b): only v(x) >= b is known;
 *   - regular: x = u * p^v with unit u known mod p^m (m digits).
 *
 * A regular scalar may additionally be exact, meaning the value is exactly
 * the stored signed integer u times p^v.  Arithmetic never reports more
 * precision than its inputs justify; additive cancellation collapses a
 * result into the inexact-zero state instead of inventing digits.
 */
class PadicScalar {
public:
    enum class Kind { ExactZero, InexactZero, Regular };

    PadicScalar() = default;

    static PadicScalar zero(PrimeContextPtr ctx);
    static PadicScalar inexact_zero(PrimeContextPtr ctx, long bound);
    static PadicScalar integer(PrimeContextPtr ctx, const bigint& n);
    static PadicScalar integer(PrimeContextPtr ctx, long n) {
        return integer(std::move(ctx), bigint(n));
    }
    static PadicScalar one(PrimeContextPtr ctx) { return integer(std::move(ctx), 1); }
    static PadicScalar uniformizer(PrimeContextPtr ctx);
    /// num/den with den nonzero; exact when den is +-1 times a power of p.
    static PadicScalar rational(PrimeContextPtr ctx, const bigint& num, const bigint& den);
    /// u * p^v with u a declared unit (u mod p != 0), known to m digits.
    static PadicScalar from_unit(PrimeContextPtr ctx, const bigint& u, long v, int m,
                                 bool exact = false);

    const PrimeContextPtr& ctx() const { return ctx_; }
    Kind kind() const { return kind_; }
    bool is_exact_zero() const { return kind_ == Kind::ExactZero; }
    /// True when the value is indistinguishable from zero at current precision.
    bool is_zero_like() const { return kind_ != Kind::Regular; }
    bool is_exact() const { return exact_; }

    /// Valuation of a regular scalar; the bound for an inexact zero.
    long val() const;
    /// Valuation bound usable for min-computations; huge for exact zero.
    long val_or_bound() const;
    int rel_precision() const { return m_; }
    /// Unit representative in [0, p^m).
    bigint unit() const;
    /// Signed exact integer u when exact (unit times nothing).
    const bigint& raw_unit() const { return u_; }

    /// Least-significant unit digit (residue of the unit mod p), regular only.
    long unit_residue() const;

    PadicScalar operator-() const;
    PadicScalar operator+(const PadicScalar& o) const;
    PadicScalar operator-(const PadicScalar& o) const { return *this + (-o); }
    PadicScalar operator*(const PadicScalar& o) const;
    PadicScalar inv() const;
    PadicScalar operator/(const PadicScalar& o) const { return *this * o.inv(); }

    /// Multiply by p^k (exact shift).
    PadicScalar shift(long k) const;

    /// x mod p^k as an exact scalar: digits of x in positions [v, k), zero if v >= k.
    PadicScalar mod_pk(long k) const;

    /// Forget all digits at absolute position >= a (precision can only shrink).
    PadicScalar truncate_abs(long a) const;

    bool indistinguishable(const PadicScalar& o) const { return (*this - o).is_zero_like(); }

    SquareClass square_class() const;

    /// Canonical square root (unit residue in [1,(p-1)/2]); throws NonSquare.
    PadicScalar sqrt() const;

    std::string str() const;

private:
    PrimeContextPtr ctx_;
    Kind kind_ = Kind::ExactZero;
    long v_ = 0;       // valuation (Regular) or lower bound (InexactZero)
    bigint u_ = 0;     // unit; signed when exact, canonical in (0, p^m) otherwise
    int m_ = 0;        // known unit digits, 1..N
    bool exact_ = true;

    void normalize_unit();
    static const PrimeContext& require_same(const PadicScalar& a, const PadicScalar& b);
};

/// Newton root-finding for one-variable polynomials over Z_p.
/// Coefficients lowest-degree first; start must satisfy the Hensel bound
/// |f(a)| < |f'(a)|^2.  Returns x with f(x) = 0 at working precision.
PadicScalar hensel_root_qp(const std::vector<PadicScalar>& coeffs, const PadicScalar& start);

}  // namespace sl2limits
