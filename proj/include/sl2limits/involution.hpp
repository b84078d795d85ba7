#pragma once

#include <optional>
#include <vector>

#include "sl2limits/mat2.hpp"
#include "sl2limits/tree.hpp"

namespace sl2limits {

enum class Gamma { Identity, Sigma };

/**
 * An abstract involution theta = iota_A . gamma of SL(2,E), tagged by the
 * family it was built from:
 *   - ZY:    gamma = sigma, A = [[z, y],[1, -sigma(z)]], z sigma(z) + y != 0
 *   - DiagX: gamma = sigma, A = [[x, 0],[0, 1]], x sigma(x) = 1
 *   - Weyl:  gamma = id,    A = [[0, 1],[a, 0]], a a square-class representative
 */
class Involution {
public:
    enum class Family { ZY, DiagX, Weyl };

    static Involution family_zy(const TowerContextPtr& t, const ExtScalar& z,
                                const PadicScalar& y);
    static Involution family_diag(const TowerContextPtr& t, const ExtScalar& x);
    static Involution family_weyl(const TowerContextPtr& t, Level level, const PadicScalar& a);

    Gamma gamma() const { return gamma_; }
    Family family() const { return family_; }
    const Mat2& matrix() const { return a_; }
    const ExtScalar& q() const { return q_; }
    const TowerContextPtr& tower() const { return a_.tower(); }
    Level level() const { return a_.level(); }
    const PrimeContextPtr& prime() const { return a_.prime(); }

    const ExtScalar& param_z() const { return z_; }
    const PadicScalar& param_y() const { return y_; }
    const ExtScalar& param_x() const { return x_; }
    const PadicScalar& param_a() const { return aa_; }

    /// gamma applied entrywise.
    Mat2 gamma_apply(const Mat2& g) const;
    /// theta(g) = A gamma(g) A^-1.
    Mat2 apply(const Mat2& g) const;

    /// Checks A gamma(A) = q Id entrywise and theta^2 = id on sampled group
    /// elements; returns q.  Throws NotAnInvolution on defect.
    ExtScalar verify(Rng& rng) const;

    /// Rebuild over a compatible extended tower (e.g. after adding beta).
    Involution retower(const TowerContextPtr& t, Level level) const;

private:
    Gamma gamma_ = Gamma::Sigma;
    Family family_ = Family::ZY;
    Mat2 a_;
    ExtScalar q_;
    ExtScalar z_, x_;
    PadicScalar y_, aa_;
};

/// Returns q with A sigma(X) = q X when theta is
/// GL-conjugate to sigma via X; absent when no such scalar exists.
std::optional<ExtScalar> conj_cond_check(const Mat2& x, const Involution& theta);

struct FixedPointResult {
    bool fixed = false;
    long defect_q = 0;   // min entry quarter-valuation of theta(g) - g
};

FixedPointResult fixed_point_test(const Involution& theta, const Mat2& g);

/// One element [[x, y],[a y, x]] of the fixed group of iota_{[[0,1],[a,0]]},
/// with x the Newton root of X^2 - a y^2 - 1 from start sign (+1 or -1 mod p).
Mat2 h_theta_a_element(const TowerContextPtr& t, Level level, const PadicScalar& a,
                       const PadicScalar& y, int sign);

/// Sampled fixed-group elements covering both root branches; draws whose
/// 1 + a y^2 is not a square are skipped.
std::vector<Mat2> h_theta_a_sample(const TowerContextPtr& t, Level level,
                                   const PadicScalar& a, int count, Rng& rng);

/// The two boundary fixed points [1 : +-sqrt(a)] of iota_{[[0,1],[a,0]]},
/// over F(sqrt(a)) when a is not a square.
struct FixedEnds {
    TowerContextPtr tower;   // tower containing sqrt(a)
    Level level;             // QP when a is a square, else E
    ExtScalar sqrt_a;
    End xi_plus, xi_minus;
    bool rational = false;   // ends lie in the rational boundary
};

FixedEnds fixed_ends(const PrimeContextPtr& prime, const PadicScalar& a);

/// Verified carrier inside the fixed group of iota_{[[0,1],[a,0]]} taking
/// `from` to `to`, when the eta-coordinate ratio has a norm-one square
/// root; empty otherwise.  The returned element is checked by act_end.
std::optional<Mat2> fixed_group_transitivity_witness(const FixedEnds& fe, const End& from,
                                                     const End& to);

/// Orbit marker of a rational boundary point under the fixed group of
/// iota_{[[0,1],[a,0]]}: the square class (over F(sqrt(a))) of
/// eta = sqrt(a) (t - sqrt(a)) / (t + sqrt(a)), which conjugation carries
/// to a diagonal-orbit marker.  At most 8 values occur (specials included).
OrbitLabel fixed_group_end_label(const FixedEnds& fe, const End& e);

}  // namespace sl2limits
