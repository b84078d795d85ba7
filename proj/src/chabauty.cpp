#include "sl2limits/chabauty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sl2limits {

namespace {
constexpr long kInfVal = std::numeric_limits<long>::max() / 4;

long to_local(const TowerContextPtr& t, Level lvl, long quarters) {
    if (quarters >= kInfVal / 2) return kInfVal;
    long e = t->ram_index(lvl);
    long num = quarters * e;
    return num / 4;   // callers only display this; exactness not required
}

/// w_E^(2n) as an exact element of F: p^2n when unramified, (alpha^2)^n
/// when ramified (p or pS, matching the chosen generator exactly).
PadicScalar omega_e_2n(const TowerContextPtr& t, long n) {
    if (n < 0) throw Error("omega_e_2n: negative power");
    if (t->ext().e == 1) return PadicScalar::one(t->prime()).shift(2 * n);
    PadicScalar s = t->alpha_square();
    PadicScalar acc = PadicScalar::one(t->prime());
    for (long i = 0; i < n; ++i) acc = acc * s;
    return acc;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LineFit fit_line(const std::vector<std::pair<double, double>>& pts) {
    LineFit f;
    if (pts.size() < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(pts.size());
    double den = n * sxx - sx * sx;
    if (den == 0) return f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}
}  // namespace

RotationContext::RotationContext(TowerContextPtr t) : tower_(std::move(t)) {
    ExtScalar alpha = ExtScalar::alpha(tower_);
    ExtScalar one = ExtScalar::one(tower_, Level::E);
    ExtScalar two = ExtScalar::integer(tower_, Level::E, 2);
    ExtScalar two_alpha = two * alpha;
    ExtScalar s = alpha * alpha;

    m_ = Mat2(two_alpha.inv() + alpha, one, two * s, two_alpha);
    ExtScalar det = m_.det();
    if (!(det - one).is_zero_like())
        throw InternalInvariantViolation("rotation matrix must have determinant 1");
    m_inv_ = Mat2(two_alpha, -one, -two * s, two_alpha.inv() + alpha);

    // Construction re-check: the first factor moves [1:0] to [1:alpha], the
    // second moves [0:1] to [1:2 alpha].
    Mat2 f1(one, ExtScalar::zero(tower_, Level::E), alpha, one);
    Mat2 f2(two_alpha.inv(), one, ExtScalar::zero(tower_, Level::E), two_alpha);
    End e1 = act_end(f1, End::finite(ExtScalar::zero(tower_, Level::E)));
    End e2 = act_end(f2, End::infinity(tower_, Level::E));
    if (!e1.x.indistinguishable(alpha) || !e2.x.indistinguishable(two_alpha))
        throw InternalInvariantViolation("rotation factors move the wrong endpoints");
    if (!(f2 * f1).indistinguishable(m_))
        throw InternalInvariantViolation("rotation matrix is not the stated product");
}

Mat2 RotationContext::rotate(const Mat2& h) const {
    Mat2 he = h.level() == Level::E ? h : h.retower(tower_, Level::E);
    return m_ * he * m_inv_;
}

Mat2 conjugate_by_diag_power(const Mat2& g, long n) {
    ExtScalar w = ExtScalar::omega(g.tower(), g.level());
    return Mat2(g.e11(), g.e12() * w.pow(2 * n), g.e21() * w.pow(-2 * n), g.e22());
}

long limit_membership_defect(const Mat2& g, const LimitGroupDescriptor& L) {
    long best = kInfVal;
    auto acc = [&](const ExtScalar& x) {
        if (!x.is_exact_zero()) best = std::min(best, x.vq().q);
    };
    switch (L.shape) {
        case LimitGroupDescriptor::Shape::LowerTriangularNorm1: {
            acc(g.e12());
            acc(g.e22() - g.e11().sigma());
            acc(g.e11() * g.e11().sigma() - ExtScalar::one(g.tower(), g.level()));
            return best;
        }
        case LimitGroupDescriptor::Shape::UnipotentMu2: {
            ExtScalar one = ExtScalar::one(g.tower(), g.level());
            long best_sign = -kInfVal;
            for (int s : {+1, -1}) {
                best = kInfVal;
                ExtScalar e = s > 0 ? one : -one;
                acc(g.e12());
                acc(g.e11() - e);
                acc(g.e22() - e);
                best_sign = std::max(best_sign, best);
            }
            return best_sign;
        }
    }
    return best;
}

/// The diagonal limit value a with a^2 - alpha^2 b^2 = 1 on the requested
/// branch; throws NonSquare when no curve point sits over b.
PadicScalar norm_one_partner(const TowerContextPtr& t, const PadicLimitTarget& target) {
    PadicScalar a2 = PadicScalar::one(t->prime()) + t->alpha_square() * target.b * target.b;
    PadicScalar r = a2.sqrt();
    return target.branch >= 0 ? r : -r;
}

Mat2 limit_sequence_for_target(const TowerContextPtr& t, const PadicLimitTarget& target,
                               long n) {
    auto prime = t->prime();
    PadicScalar s = t->alpha_square();
    PadicScalar w2n = omega_e_2n(t, n);
    PadicScalar c1 = target.c.comp(0);
    PadicScalar c2 = target.c.comp(1);
    const PadicScalar& b = target.b;

    // f_n(X) = X^2 + w^2n C2 X - alpha^2 b^2 - w^2n C1 b - 1, Newton from the
    // branch root of the limit equation.
    PadicScalar lin = w2n * c2;
    PadicScalar cst = -(s * b * b) - w2n * c1 * b - PadicScalar::one(prime);
    std::vector<ExtScalar> f = {ExtScalar::from_padic(t, Level::QP, cst),
                                ExtScalar::from_padic(t, Level::QP, lin),
                                ExtScalar::one(t, Level::QP)};
    ExtScalar start = ExtScalar::from_padic(t, Level::QP, norm_one_partner(t, target));
    PadicScalar dn = hensel_root(f, start).comp(0);
    PadicScalar an = dn + w2n * c2;
    PadicScalar cn = b * s + w2n * c1;

    auto lift = [&](const PadicScalar& x) { return ExtScalar::from_padic(t, Level::E, x); };
    Mat2 m(lift(an), lift(b), lift(cn), lift(dn));
    if (!m.is_sl()) throw InternalInvariantViolation("recipe member is not in SL(2,F)");
    return m;
}

Mat2 limit_target_element(const TowerContextPtr& t, const PadicLimitTarget& target) {
    PadicScalar a_inf = norm_one_partner(t, target);
    ExtScalar alpha = ExtScalar::alpha(t);
    ExtScalar four_s = ExtScalar::integer(t, Level::E, 4) * alpha * alpha;
    ExtScalar ab = ExtScalar::make_e(t, a_inf, -target.b);       // a - alpha b
    ExtScalar ab_bar = ExtScalar::make_e(t, a_inf, target.b);    // a + alpha b
    return Mat2(ab, ExtScalar::zero(t, Level::E), four_s * target.c, ab_bar);
}

ConvergenceReport verify_convergence(const TowerContextPtr& t, const PadicLimitTarget& target,
                                     long n_min, long n_max) {
    RotationContext rot(t);
    Mat2 tgt = limit_target_element(t, target);
    LimitGroupDescriptor L{LimitGroupDescriptor::Shape::LowerTriangularNorm1};

    ConvergenceReport rep;
    rep.hensel_threshold = -1;
    std::vector<std::pair<double, double>> pts;
    long prev = -kInfVal;
    rep.monotone = true;
    // Defects saturate once they hit the carried precision; strict growth is
    // only demanded below the ceiling.
    const long ceiling = t->prime()->precision() - 8;
    for (long n = n_min; n <= n_max; ++n) {
        Mat2 hn;
        try {
            hn = limit_sequence_for_target(t, target, n);
        } catch (const HenselConditionFailed&) {
            if (rep.hensel_threshold >= 0)
                throw;   // the admissible range must be an upper set in n
            continue;
        }
        if (rep.hensel_threshold < 0) rep.hensel_threshold = n;
        Mat2 gn = conjugate_by_diag_power(rot.rotate(hn), n);

        ConvergenceRecord rec;
        rec.n = n;
        rec.shape_defect = to_local(t, Level::E, limit_membership_defect(gn, L));
        rec.target_defect = to_local(t, Level::E, gn.defect_q(tgt));
        ExtScalar det1 = gn.det() - ExtScalar::one(t, Level::E);
        rec.sl_defect = det1.is_exact_zero() ? kInfVal : to_local(t, Level::E, det1.vq().q);
        rec.sl_ok = gn.is_sl();
        rec.matrix = gn.str();
        rep.records.push_back(rec);

        if (rec.target_defect < ceiling && rec.target_defect < prev + 1)
            rep.monotone = false;
        prev = rec.target_defect;
        rep.shape_c_bound = std::max(rep.shape_c_bound, 2 * n - rec.shape_defect);
        pts.emplace_back(static_cast<double>(n), static_cast<double>(rec.target_defect));
    }
    LineFit fit = fit_line(pts);
    rep.slope = fit.slope;
    rep.intercept = fit.intercept;
    return rep;
}

Condition2Report condition2_sweep(const TowerContextPtr& t, long ball_radius, long n_min,
                                  long n_max, int count, Rng& rng) {
    auto prime = t->prime();
    RotationContext rot(t);
    LimitGroupDescriptor L{LimitGroupDescriptor::Shape::LowerTriangularNorm1};
    PadicScalar s = t->alpha_square();

    struct Obs {
        long n;
        long defect;
    };
    std::vector<Obs> obs;
    int guard = 0;
    while (static_cast<int>(obs.size()) < count && guard < 20 * count) {
        ++guard;
        long n = rng.range(std::max(n_min, ball_radius), n_max);
        // Free directions: b on the curve, perturbations delta at scale
        // w^(2n - R).  This parametrizes exactly the bounded conjugates.
        long bmin = t->ext().e == 1 ? 1 : 0;
        PadicScalar b = rng.flip() ? rng.scalar(prime, bmin, bmin + 2) : PadicScalar::zero(prime);
        PadicScalar scale = omega_e_2n(t, n) *
                            PadicScalar::one(prime).shift(-ball_radius / t->ext().e);
        PadicScalar d1 = rng.scalar(prime, 0, 1) * scale;
        PadicScalar d2 = rng.scalar(prime, 0, 1) * scale;

        PadicScalar lin = d2;
        PadicScalar cst = -(s * b * b) - d1 * b - PadicScalar::one(prime);
        std::vector<ExtScalar> f = {ExtScalar::from_padic(t, Level::QP, cst),
                                    ExtScalar::from_padic(t, Level::QP, lin),
                                    ExtScalar::one(t, Level::QP)};
        ExtScalar start = rng.flip() ? ExtScalar::one(t, Level::QP)
                                     : ExtScalar::integer(t, Level::QP, prime->p() - 1);
        PadicScalar dn;
        try {
            dn = hensel_root(f, start).comp(0);
        } catch (const HenselConditionFailed&) {
            continue;
        }
        PadicScalar an = dn + d2;
        PadicScalar cn = b * s + d1;
        auto lift = [&](const PadicScalar& x) { return ExtScalar::from_padic(t, Level::E, x); };
        Mat2 hn(lift(an), lift(b), lift(cn), lift(dn));
        if (!hn.is_sl()) continue;

        Mat2 gn = conjugate_by_diag_power(rot.rotate(hn), n);
        // Bounded by construction; verify the ball bound actually holds
        // (slack for the 4 alpha^2 factors of the rotated lower entry).
        if (to_local(t, Level::E, gn.min_entry_q()) < -ball_radius - 6) continue;
        obs.push_back({n, to_local(t, Level::E, limit_membership_defect(gn, L))});
    }

    Condition2Report rep;
    rep.samples = obs.size();
    size_t half = obs.size() / 2;
    long c = 0;
    for (size_t i = 0; i < half; ++i) c = std::max(c, 2 * obs[i].n - obs[i].defect);
    rep.c_fitted = c;
    rep.all_above = true;
    rep.worst_margin = kInfVal;
    for (size_t i = half; i < obs.size(); ++i) {
        long margin = obs[i].defect - (2 * obs[i].n - c);
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (margin < 0) rep.all_above = false;
    }
    return rep;
}

Mat2 htheta_limit_sequence(const TowerContextPtr& t, const PadicScalar& a,
                           const PadicScalar& z, int sign, long n) {
    auto prime = t->prime();
    PadicScalar y = z.is_exact_zero()
                        ? PadicScalar::zero(prime)
                        : (z / a) * PadicScalar::one(prime).shift(2 * n);
    return h_theta_a_element(t, Level::QP, a, y, sign);
}

MuTwoReport verify_htheta_limits(const TowerContextPtr& t, const PadicScalar& a,
                                 const PadicScalar& z, int sign, long n_min, long n_max) {
    auto prime = t->prime();
    MuTwoReport rep;
    rep.hensel_threshold = -1;

    ExtScalar sgn = sign >= 0 ? ExtScalar::one(t, Level::QP)
                              : -ExtScalar::one(t, Level::QP);
    Mat2 tgt(sgn, ExtScalar::zero(t, Level::QP), ExtScalar::from_padic(t, Level::QP, z), sgn);
    LimitGroupDescriptor L{LimitGroupDescriptor::Shape::UnipotentMu2};

    std::vector<std::pair<double, double>> pts;
    rep.diagonal_in_mu2 = true;
    ExtScalar one = ExtScalar::one(t, Level::QP);
    for (long n = n_min; n <= n_max; ++n) {
        Mat2 hn;
        try {
            hn = htheta_limit_sequence(t, a, z, sign, n);
        } catch (const HenselConditionFailed&) {
            if (rep.hensel_threshold >= 0) throw;
            continue;
        }
        if (rep.hensel_threshold < 0) rep.hensel_threshold = n;
        Mat2 gn = conjugate_by_diag_power(hn, n);

        ConvergenceRecord rec;
        rec.n = n;
        rec.shape_defect = to_local(t, Level::QP, limit_membership_defect(gn, L));
        rec.target_defect = to_local(t, Level::QP, gn.defect_q(tgt));
        ExtScalar det1 = gn.det() - ExtScalar::one(t, Level::QP);
        rec.sl_defect = det1.is_exact_zero() ? kInfVal : to_local(t, Level::QP, det1.vq().q);
        rec.sl_ok = gn.is_sl();
        rec.matrix = gn.str();
        rep.records.push_back(rec);
        // Step variable: v(y_n) = 2n.
        pts.emplace_back(static_cast<double>(2 * n), static_cast<double>(rec.target_defect));

        // mu_2 dichotomy: the conjugated diagonal sits next to +1 or -1,
        // visibly closer as n grows.
        long dplus = std::min((gn.e11() - one).vq().q, (gn.e22() - one).vq().q);
        long dminus = std::min((gn.e11() + one).vq().q, (gn.e22() + one).vq().q);
        if (std::max(dplus, dminus) < 4 * (n - rep.hensel_threshold + 1))
            rep.diagonal_in_mu2 = false;
    }
    if (rep.records.empty()) rep.diagonal_in_mu2 = false;
    rep.slope_per_step = fit_line(pts).slope;
    return rep;
}

BoundaryDisjointnessReport boundary_disjointness_check(const ConjugatorCertificate& cert,
                                                       int samples, Rng& rng) {
    if (cert.level != Level::K)
        throw Error("boundary check applies to biquadratic-level certificates (c in K - E)");
    const auto& t = cert.tower();
    auto prime = t->prime();
    BoundaryDisjointnessReport rep;
    rep.min_beta_defect = kInfVal;
    const long tol = 4 * (prime->precision() - 6);

    auto push = [&](const ExtScalar& coord, bool at_infinity) {
        End e = at_infinity ? End::infinity(t, Level::K) : End::finite(coord);
        End img = act_end(cert.B, e);
        ++rep.samples;
        if (img.inf) {
            ++rep.rational_images;   // [0:1] is an E-rational end
            return;
        }
        const PadicScalar& b0 = img.x.comp(2);
        const PadicScalar& b1 = img.x.comp(3);
        if (b0.is_zero_like() && b1.is_zero_like()) {
            if (b0.is_exact_zero() && b1.is_exact_zero())
                ++rep.rational_images;
            else
                ++rep.inconclusive;
            return;
        }
        long q = std::min(b0.is_zero_like() ? kInfVal : 4 * b0.val(),
                          b1.is_zero_like() ? kInfVal : 4 * b1.val());
        if (q >= tol) {
            ++rep.inconclusive;   // nonzero but only in the noise window
            return;
        }
        rep.min_beta_defect = std::min(rep.min_beta_defect, q);
    };

    // sigma-fixed ends: coordinates in K^sigma = Q_p(beta), plus infinity.
    push(ExtScalar::zero(t, Level::K), true);
    push(ExtScalar::zero(t, Level::K), false);
    for (int i = 2; i < samples; ++i) {
        PadicScalar x0 = rng.flip() ? rng.scalar(prime, -2, 2) : PadicScalar::zero(prime);
        PadicScalar x1 = rng.flip() ? rng.scalar(prime, -2, 2) : PadicScalar::zero(prime);
        if (x0.is_zero_like() && x1.is_zero_like()) x1 = PadicScalar::one(prime);
        push(ExtScalar::make_k(t, x0, PadicScalar::zero(prime), x1, PadicScalar::zero(prime)),
             false);
    }

    // Obstruction system: (A1 - c1)(x1,y1)^T = a^2 (z2+c2)(x2,y2)^T and
    // (A1 + c1)(x2,y2)^T = (z2-c2)(x1,y1)^T has no rational solution.
    // Sampled residual check over random rational 4-vectors.
    const ExtScalar c1 = ExtScalar::make_k(t, cert.c.comp(0), PadicScalar::zero(prime),
                                           cert.c.comp(2), PadicScalar::zero(prime));
    const ExtScalar c2 = ExtScalar::make_k(t, cert.c.comp(1), PadicScalar::zero(prime),
                                           cert.c.comp(3), PadicScalar::zero(prime));
    // A = A1 + alpha A2 with A2 = z2 Id; decompose the certificate's A.
    Mat2 a1(ExtScalar::make_k(t, cert.A.e11().comp(0), PadicScalar::zero(prime),
                              cert.A.e11().comp(2), PadicScalar::zero(prime)),
            ExtScalar::make_k(t, cert.A.e12().comp(0), PadicScalar::zero(prime),
                              cert.A.e12().comp(2), PadicScalar::zero(prime)),
            ExtScalar::make_k(t, cert.A.e21().comp(0), PadicScalar::zero(prime),
                              cert.A.e21().comp(2), PadicScalar::zero(prime)),
            ExtScalar::make_k(t, cert.A.e22().comp(0), PadicScalar::zero(prime),
                              cert.A.e22().comp(2), PadicScalar::zero(prime)));
    ExtScalar z2 = ExtScalar::make_k(t, cert.A.e11().comp(1), PadicScalar::zero(prime),
                                     cert.A.e11().comp(3), PadicScalar::zero(prime));
    ExtScalar s = ExtScalar::from_padic(t, Level::K, t->alpha_square());
    for (int i = 0; i < samples; ++i) {
        ExtScalar x1 = ExtScalar::integer(t, Level::K, rng.range(-50, 50));
        ExtScalar y1 = ExtScalar::integer(t, Level::K, rng.range(-50, 50));
        ExtScalar x2 = ExtScalar::integer(t, Level::K, rng.range(-50, 50));
        ExtScalar y2 = ExtScalar::integer(t, Level::K, rng.range(-50, 50));
        if (x1.is_exact_zero() && y1.is_exact_zero() && x2.is_exact_zero() &&
            y2.is_exact_zero())
            continue;
        ExtScalar r1a = a1.e11() * x1 + a1.e12() * y1 - c1 * x1 - s * (z2 + c2) * x2;
        ExtScalar r1b = a1.e21() * x1 + a1.e22() * y1 - c1 * y1 - s * (z2 + c2) * y2;
        ExtScalar r2a = a1.e11() * x2 + a1.e12() * y2 + c1 * x2 - (z2 - c2) * x1;
        ExtScalar r2b = a1.e21() * x2 + a1.e22() * y2 + c1 * y2 - (z2 - c2) * y1;
        bool solved = r1a.is_zero_like() && r1b.is_zero_like() && r2a.is_zero_like() &&
                      r2b.is_zero_like();
        if (solved) ++rep.obstruction_solutions;
    }
    return rep;
}

}  // namespace sl2limits
