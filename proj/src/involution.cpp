#include "sl2limits/involution.hpp"

namespace sl2limits {

Involution Involution::family_zy(const TowerContextPtr& t, const ExtScalar& z,
                                 const PadicScalar& y) {
    if (z.level() != Level::E) throw LevelMismatch("z must live at level E");
    ExtScalar ye = ExtScalar::from_padic(t, Level::E, y);
    ExtScalar q = z * z.sigma() + ye;
    if (q.is_zero_like()) throw Error("family_zy: z sigma(z) + y must be nonzero");
    Involution th;
    th.gamma_ = Gamma::Sigma;
    th.family_ = Family::ZY;
    th.z_ = z;
    th.y_ = y;
    th.q_ = q;
    th.a_ = Mat2(z, ye, ExtScalar::one(t, Level::E), -z.sigma());
    return th;
}

Involution Involution::family_diag(const TowerContextPtr& t, const ExtScalar& x) {
    if (x.level() != Level::E) throw LevelMismatch("x must live at level E");
    ExtScalar n = x * x.sigma();
    if (!n.indistinguishable(ExtScalar::one(t, Level::E)))
        throw Error("family_diag: x sigma(x) must be 1");
    Involution th;
    th.gamma_ = Gamma::Sigma;
    th.family_ = Family::DiagX;
    th.x_ = x;
    th.q_ = ExtScalar::one(t, Level::E);
    th.a_ = Mat2::diag(x, ExtScalar::one(t, Level::E));
    return th;
}

Involution Involution::family_weyl(const TowerContextPtr& t, Level level,
                                   const PadicScalar& a) {
    if (a.is_zero_like()) throw Error("family_weyl: a must be nonzero");
    Involution th;
    th.gamma_ = Gamma::Identity;
    th.family_ = Family::Weyl;
    th.aa_ = a;
    th.q_ = ExtScalar::from_padic(t, level, a);
    th.a_ = Mat2::weyl_times(th.q_);
    return th;
}

Mat2 Involution::gamma_apply(const Mat2& g) const {
    return gamma_ == Gamma::Sigma ? g.sigma() : g;
}

Mat2 Involution::apply(const Mat2& g) const {
    if (g.level() != a_.level()) throw LevelMismatch("apply: group element at wrong level");
    return a_ * gamma_apply(g) * a_.inverse();
}

ExtScalar Involution::verify(Rng& rng) const {
    Mat2 prod = a_ * gamma_apply(a_);
    ExtScalar q;
    if (!prod.scalar_multiple_of_identity(q))
        throw NotAnInvolution("A gamma(A) is not a scalar matrix");
    if (!q.indistinguishable(q_))
        throw NotAnInvolution("cached q disagrees with A gamma(A)");
    // theta^2 = id: every known digit of theta(theta(g)) - g must cancel,
    // with a hard floor against silent precision collapse.
    const long floor = 4 * (prime()->precision() - 12);
    for (int i = 0; i < 10; ++i) {
        Mat2 g = random_sl2(a_.tower(), a_.level(), rng);
        Mat2 diff = apply(apply(g)) - g;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                if (!diff.at(r, c).is_zero_like())
                    throw NotAnInvolution("theta^2 differs from the identity on a sample");
        if (diff.min_entry_q() < floor)
            throw NotAnInvolution("theta^2 check lost too much precision to be meaningful");
    }
    return q;
}

Involution Involution::retower(const TowerContextPtr& t, Level level) const {
    Involution th = *this;
    th.a_ = a_.retower(t, level);
    th.q_ = Mat2::diag(q_, q_).retower(t, level).e11();
    if (family_ == Family::ZY) th.z_ = Mat2::diag(z_, z_).retower(t, level).e11();
    if (family_ == Family::DiagX) th.x_ = Mat2::diag(x_, x_).retower(t, level).e11();
    return th;
}

std::optional<ExtScalar> conj_cond_check(const Mat2& x, const Involution& theta) {
    if (theta.gamma() != Gamma::Sigma)
        throw Error("conj_cond_check: needs an involution of sigma type");
    if (!x.is_invertible()) throw SingularMatrix("conj_cond_check: X not invertible");
    Mat2 lhs = theta.matrix() * x.sigma();
    ExtScalar q;
    if (x.proportional_to(lhs, q)) return q;
    return std::nullopt;
}

FixedPointResult fixed_point_test(const Involution& theta, const Mat2& g) {
    Mat2 diff = theta.apply(g) - g;
    FixedPointResult r;
    r.defect_q = diff.min_entry_q();
    bool fixed = true;
    for (int i = 0; i < 2 && fixed; ++i)
        for (int j = 0; j < 2; ++j)
            if (!diff.at(i, j).is_zero_like()) { fixed = false; break; }
    r.fixed = fixed;
    return r;
}

Mat2 h_theta_a_element(const TowerContextPtr& t, Level level, const PadicScalar& a,
                       const PadicScalar& y, int sign) {
    auto prime = t->prime();
    ExtScalar ay2 = ExtScalar::from_padic(t, level, a * y * y);
    ExtScalar one = ExtScalar::one(t, level);
    std::vector<ExtScalar> f = {-(one + ay2), ExtScalar::zero(t, level), one};
    ExtScalar start = sign >= 0
                          ? one
                          : ExtScalar::integer(t, level, prime->p() - 1);
    ExtScalar x = hensel_root(f, start);
    ExtScalar ye = ExtScalar::from_padic(t, level, y);
    ExtScalar aye = ExtScalar::from_padic(t, level, a * y);
    return Mat2(x, ye, aye, x);
}

std::vector<Mat2> h_theta_a_sample(const TowerContextPtr& t, Level level,
                                   const PadicScalar& a, int count, Rng& rng) {
    auto prime = t->prime();
    std::vector<Mat2> out;
    int guard = 0;
    while (static_cast<int>(out.size()) < count && guard < 40 * count) {
        ++guard;
        PadicScalar y = rng.flip() ? rng.scalar(prime, 1, 3)
                                   : rng.scalar(prime, 0, 2);
        if (y.is_zero_like()) continue;
        if ((a * y * y).val() >= 1) {
            // Newton branches from both start residues.
            out.push_back(h_theta_a_element(t, level, a, y, +1));
            if (static_cast<int>(out.size()) < count)
                out.push_back(h_theta_a_element(t, level, a, y, -1));
        } else {
            PadicScalar s = a * y * y + PadicScalar::one(prime);
            try {
                PadicScalar x = s.sqrt();
                ExtScalar xe = ExtScalar::from_padic(t, level, x);
                ExtScalar ye = ExtScalar::from_padic(t, level, y);
                ExtScalar aye = ExtScalar::from_padic(t, level, a * y);
                out.push_back(Mat2(xe, ye, aye, xe));
                if (static_cast<int>(out.size()) < count)
                    out.push_back(Mat2(-xe, ye, aye, -xe));
            } catch (const NonSquare&) {
                continue;   // 1 + a y^2 falls outside the square class; skip
            }
        }
    }
    return out;
}

namespace {
/// eta(t) = sqrt(a) (t - sqrt(a)) / (t + sqrt(a)) over the sqrt(a)-tower;
/// empty at the fixed end t = -sqrt(a).
std::optional<ExtScalar> eta_coordinate(const FixedEnds& fe, const End& e) {
    const auto& t = fe.tower;
    Level lvl = fe.level;
    if (e.inf) return fe.sqrt_a;
    ExtScalar te = e.x.level() == lvl ? e.x : ExtScalar::from_padic(t, lvl, e.x.comp(0));
    ExtScalar den = te + fe.sqrt_a;
    if (den.is_zero_like()) return std::nullopt;
    return fe.sqrt_a * (te - fe.sqrt_a) / den;
}
}  // namespace

std::optional<Mat2> fixed_group_transitivity_witness(const FixedEnds& fe, const End& from,
                                                     const End& to) {
    auto eta_from = eta_coordinate(fe, from);
    auto eta_to = eta_coordinate(fe, to);
    if (!eta_from || !eta_to) return std::nullopt;
    if (eta_from->is_zero_like() || eta_to->is_zero_like()) return std::nullopt;
    ExtScalar r = *eta_to / *eta_from;
    ExtScalar delta;
    try {
        delta = r.sqrt();
    } catch (const NonSquare&) {
        return std::nullopt;
    }
    // delta must sit on the norm-one torus for the witness to be rational.
    if (fe.level == Level::E) {
        ExtScalar n = delta.norm_down();
        if (!(n - ExtScalar::one(fe.tower, Level::QP)).is_zero_like()) {
            if (!(n + ExtScalar::one(fe.tower, Level::QP)).is_zero_like()) return std::nullopt;
            return std::nullopt;   // norm -1 root: not in the torus
        }
    } else if (!(delta * delta - r).is_zero_like()) {
        return std::nullopt;
    }

    // h = C diag(1/delta, delta) C^-1 with C = [[1, -1/sqrt(a)],[sqrt(a), 1]]:
    // entries (delta + 1/delta)/2 and offsets, all rational for torus delta.
    const auto& t = fe.tower;
    Level lvl = fe.level;
    ExtScalar one = ExtScalar::one(t, lvl);
    Mat2 c(one, -fe.sqrt_a.inv(), fe.sqrt_a, one);
    Mat2 h = c * Mat2::diag(delta.inv(), delta) * c.inverse();
    End moved = act_end(h, from.inf || from.x.level() == lvl
                                ? from
                                : End::finite(ExtScalar::from_padic(t, lvl, from.x.comp(0))));
    End target = to.inf || to.x.level() == lvl
                     ? to
                     : End::finite(ExtScalar::from_padic(t, lvl, to.x.comp(0)));
    if (!moved.same(target)) return std::nullopt;
    return h;
}

OrbitLabel fixed_group_end_label(const FixedEnds& fe, const End& e) {
    const auto& t = fe.tower;
    Level lvl = fe.level;
    ExtScalar ra = fe.sqrt_a;
    ExtScalar coord;
    if (e.inf) {
        // eta(inf) = sqrt(a).
        coord = ra;
    } else {
        ExtScalar te = e.x.level() == lvl ? e.x
                                          : ExtScalar::from_padic(t, lvl, e.x.comp(0));
        ExtScalar den = te + ra;
        OrbitLabel l;
        if (den.is_zero_like()) {
            l.variant = OrbitLabel::EndInf;   // t = -sqrt(a): the fixed end itself
            return l;
        }
        coord = ra * (te - ra) / den;
    }
    OrbitLabel l;
    if (coord.is_zero_like()) {
        l.variant = OrbitLabel::EndZero;
        return l;
    }
    l.variant = OrbitLabel::Class;
    l.cls = coord.square_class_level();
    return l;
}

FixedEnds fixed_ends(const PrimeContextPtr& prime, const PadicScalar& a) {
    if (a.is_zero_like()) throw Error("fixed_ends: a must be nonzero");
    FixedEnds fe;
    SquareClass cls = a.square_class();
    if (cls.label() == SquareClass::One) {
        auto t = TowerContext::make(prime, ExtensionDescriptor::make(ExtensionKind::Unramified));
        fe.tower = t;
        fe.level = Level::QP;
        fe.sqrt_a = ExtScalar::from_padic(t, Level::QP, a.sqrt());
        fe.rational = true;
    } else {
        ExtensionKind kind = cls.label() == SquareClass::S
                                 ? ExtensionKind::Unramified
                                 : (cls.label() == SquareClass::Omega ? ExtensionKind::RamifiedP
                                                                      : ExtensionKind::RamifiedPS);
        auto t = TowerContext::make(prime, ExtensionDescriptor::make(kind));
        // a = s * d^2 for the descriptor scalar s, so sqrt(a) = d * alpha.
        PadicScalar d = (a / t->alpha_square()).sqrt();
        fe.tower = t;
        fe.level = Level::E;
        fe.sqrt_a = ExtScalar::make_e(t, PadicScalar::zero(prime), d);
        fe.rational = false;
    }
    fe.xi_plus = End::finite(fe.sqrt_a);
    fe.xi_minus = End::finite(-fe.sqrt_a);

    // Eigen-check: A (1, xi)^T is proportional to (1, xi)^T with factor xi.
    Mat2 A = Mat2::weyl_times(ExtScalar::from_padic(fe.tower, fe.level, a));
    for (const ExtScalar& xi : {fe.sqrt_a, -fe.sqrt_a}) {
        ExtScalar top = A.e11() + A.e12() * xi;
        ExtScalar bot = A.e21() + A.e22() * xi;
        if (!(top - xi).is_zero_like() || !(bot - xi * xi).is_zero_like())
            throw InternalInvariantViolation("fixed_ends: eigen-check failed");
    }
    return fe;
}

}  // namespace sl2limits
