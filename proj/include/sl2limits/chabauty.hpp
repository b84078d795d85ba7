#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sl2limits/conjugator.hpp"
#include "sl2limits/mat2.hpp"

namespace sl2limits {

/**
 * The rotated copy H = M SL(2,Q_p) M^-1 of the rational subgroup inside
 * SL(2,E), with M = [[(2a)^-1 + a, 1],[2a^2, 2a]] built so that the standard
 * diagonal of SL(2,E) is transverse to H's boundary.  det M = 1.
 */
class RotationContext {
public:
    explicit RotationContext(TowerContextPtr t);

    const TowerContextPtr& tower() const { return tower_; }
    const Mat2& m() const { return m_; }
    const Mat2& m_inv() const { return m_inv_; }

    /// M h M^-1 for h in SL(2,F), lifted to level E.
    Mat2 rotate(const Mat2& h) const;

private:
    TowerContextPtr tower_;
    Mat2 m_;
    Mat2 m_inv_;
};

/// diag(w_E^n, w_E^-n) g diag(w_E^-n, w_E^n): multiplies e12 by w^2n and
/// e21 by w^-2n.
Mat2 conjugate_by_diag_power(const Mat2& g, long n);

struct LimitGroupDescriptor {
    enum class Shape {
        LowerTriangularNorm1,   // [[a - alpha b, 0],[z, a + alpha b]], a^2 - alpha^2 b^2 = 1
        UnipotentMu2,           // [[e, 0],[z, e]], e in {+1, -1}
    };
    Shape shape = Shape::LowerTriangularNorm1;
};

/// Quarter-valuation membership defect of g against the limit-group shape;
/// large values mean membership at precision.
long limit_membership_defect(const Mat2& g, const LimitGroupDescriptor& L);

/// Target of the quadratic-extension limit experiment: the limit element
/// [[a - alpha b, 0],[4 alpha^2 C, a + alpha b]] with a the branch root of
/// X^2 - alpha^2 b^2 = 1 near branch * 1.
struct PadicLimitTarget {
    int branch = +1;        // sign of the diagonal root
    PadicScalar b;
    ExtScalar c;            // C = C1 + alpha C2
};

/// The n-th member of the approximating sequence in SL(2,F): entries
/// (a_n, b, c_n, d_n) with d_n the Newton root of
/// X^2 + w^2n C2 X - alpha^2 b^2 - w^2n C1 b - 1.
Mat2 limit_sequence_for_target(const TowerContextPtr& t, const PadicLimitTarget& target,
                               long n);

/// The limit element the conjugated sequence approaches.
Mat2 limit_target_element(const TowerContextPtr& t, const PadicLimitTarget& target);

struct ConvergenceRecord {
    long n = 0;
    long shape_defect = 0;     // membership defect to L, in local w_E digits
    long target_defect = 0;    // entrywise defect to the target element
    long sl_defect = 0;        // v(det - 1) in local digits
    bool sl_ok = false;
    std::string matrix;        // the conjugated element, verbatim
};

struct ConvergenceReport {
    std::vector<ConvergenceRecord> records;
    long hensel_threshold = 0;    // first n the recipe admits
    bool monotone = false;        // target defect non-decreasing past threshold
    double slope = 0.0;           // fitted target-defect growth per step
    double intercept = 0.0;
    long shape_c_bound = 0;       // max over records of (2n - shape_defect)
};

/// Runs the diagonal-conjugation experiment for one target over n in
/// [n_min, n_max] and fits the defect growth.
ConvergenceReport verify_convergence(const TowerContextPtr& t, const PadicLimitTarget& target,
                                     long n_min, long n_max);

struct Condition2Report {
    size_t samples = 0;
    long c_fitted = 0;        // calibrated on the first half of the sweep
    bool all_above = false;   // validation half satisfies defect >= 2n - c
    long worst_margin = 0;    // min over validation of defect - (2n - c)
};

/// Kernel-direction sweep: random bounded conjugates (norm ball radius R)
/// built from the free directions of the recipe; their membership defects
/// must grow like 2n - c for one experiment-wide constant c.
Condition2Report condition2_sweep(const TowerContextPtr& t, long ball_radius, long n_min,
                                  long n_max, int count, Rng& rng);

/// The n-th member [[x_n, y_n],[a y_n, x_n]] of the mu_2 limit sequence:
/// y_n = (z/a) w^2n and x_n the Newton root of X^2 - a y_n^2 - 1 from
/// start sign.  Conjugation by diag(w^n, w^-n) converges to [[s,0],[z,s]].
Mat2 htheta_limit_sequence(const TowerContextPtr& t, const PadicScalar& a,
                           const PadicScalar& z, int sign, long n);

struct MuTwoReport {
    std::vector<ConvergenceRecord> records;   // n, defects vs [[s,0],[z,s]]
    long hensel_threshold = 0;
    double slope_per_step = 0.0;   // defect growth per unit of v(y_n) = 2n
    bool diagonal_in_mu2 = false;  // every limit diagonal within precision of +-1
};

MuTwoReport verify_htheta_limits(const TowerContextPtr& t, const PadicScalar& a,
                                 const PadicScalar& z, int sign, long n_min, long n_max);

struct BoundaryDisjointnessReport {
    size_t samples = 0;
    size_t rational_images = 0;       // images that landed in the E-boundary
    size_t inconclusive = 0;          // beta part vanished only within noise
    size_t obstruction_solutions = 0; // sampled E-solutions of the end system
    long min_beta_defect = 0;         // smallest beta-component valuation seen
};

/// Samples ends of the sigma-fixed boundary, pushes them through the
/// certificate matrix B, and checks no image is E-rational; also samples the
/// obstruction system (A1 -+ c1) for E-solutions.
BoundaryDisjointnessReport boundary_disjointness_check(const ConjugatorCertificate& cert,
                                                       int samples, Rng& rng);

}  // namespace sl2limits
