#pragma once

#include <array>
#include <string>

#include "sl2limits/rng.hpp"
#include "sl2limits/tower.hpp"

namespace sl2limits {

/// 2x2 matrix over one tower level.  Values are immutable; every operation
/// returns a fresh matrix.
class Mat2 {
public:
    Mat2() = default;
    Mat2(ExtScalar e11, ExtScalar e12, ExtScalar e21, ExtScalar e22);

    static Mat2 identity(const TowerContextPtr& t, Level level);
    static Mat2 zero(const TowerContextPtr& t, Level level);
    static Mat2 diag(const ExtScalar& a, const ExtScalar& d);
    /// [[0,1],[a,0]] over the scalar's level.
    static Mat2 weyl_times(const ExtScalar& a);

    const ExtScalar& e11() const { return e_[0]; }
    const ExtScalar& e12() const { return e_[1]; }
    const ExtScalar& e21() const { return e_[2]; }
    const ExtScalar& e22() const { return e_[3]; }
    const ExtScalar& at(int r, int c) const { return e_[static_cast<size_t>(2 * r + c)]; }

    const TowerContextPtr& tower() const { return e_[0].tower(); }
    Level level() const { return e_[0].level(); }
    const PrimeContextPtr& prime() const { return e_[0].prime(); }

    Mat2 operator*(const Mat2& o) const;
    Mat2 operator+(const Mat2& o) const;
    Mat2 operator-(const Mat2& o) const;
    Mat2 operator-() const;
    Mat2 scale(const ExtScalar& s) const;

    ExtScalar det() const;
    ExtScalar trace() const { return e_[0] + e_[3]; }
    Mat2 inverse() const;

    /// Entrywise field conjugation (alpha -> -alpha).
    Mat2 sigma() const;

    /// Re-tag all entries in a compatible (extended) tower/level.
    Mat2 retower(const TowerContextPtr& t, Level level) const;

    bool indistinguishable(const Mat2& o) const;
    /// Minimum entry quarter-valuation of (this - o); kInf when exactly equal.
    long defect_q(const Mat2& o) const;
    /// Minimum entry quarter-valuation of the matrix itself.
    long min_entry_q() const;

    bool is_invertible() const { return !det().is_zero_like(); }
    /// v(det - 1) >= N - 4 digits (slack for accumulated products).
    bool is_sl() const;

    /// True when this is a scalar multiple q*Id at precision; returns q.
    bool scalar_multiple_of_identity(ExtScalar& q_out) const;
    /// True when o = q * this for some scalar q at precision; returns q.
    bool proportional_to(const Mat2& o, ExtScalar& q_out) const;

    std::string str() const;

private:
    std::array<ExtScalar, 4> e_;
};

/// Random element of SL(2) at a level: exact determinant 1 by construction.
Mat2 random_sl2(const TowerContextPtr& t, Level level, Rng& rng, long spread = 1);

/// Random invertible matrix (entries around valuation 0).
Mat2 random_gl2(const TowerContextPtr& t, Level level, Rng& rng, long spread = 1);

}  // namespace sl2limits
