#include "sl2limits/polar.hpp"

namespace sl2limits {

namespace {

int class_index(const SquareClass& c) {
    switch (c.label()) {
        case SquareClass::One: return 0;
        case SquareClass::S: return 1;
        case SquareClass::Omega: return 2;
        default: return 3;
    }
}

PadicScalar class_rep(const PrimeContextPtr& prime, const SquareClass& c) {
    switch (c.label()) {
        case SquareClass::One: return PadicScalar::one(prime);
        case SquareClass::S: return PadicScalar::integer(prime, prime->nonsquare());
        case SquareClass::Omega: return PadicScalar::uniformizer(prime);
        default: return PadicScalar::integer(prime, prime->nonsquare()).shift(1);
    }
}

Mat2 f_mat(const TowerContextPtr& t, Level lvl, const PadicScalar& a, const PadicScalar& b,
           const PadicScalar& c, const PadicScalar& d) {
    return Mat2(ExtScalar::from_padic(t, lvl, a), ExtScalar::from_padic(t, lvl, b),
                ExtScalar::from_padic(t, lvl, c), ExtScalar::from_padic(t, lvl, d));
}

long floor_div(long num, long den) {
    long q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
    return q;
}

/// h in SL(2,F) with h([[w^k, u],[0,1]]) close to the base vertex; u must be
/// an exact rational scalar.
Mat2 carry_rational(const TowerContextPtr& t, Level lvl, long k, const PadicScalar& u) {
    auto prime = t->prime();
    // Powers are in omega_level units; the F-diagonal shifts k by 2e per
    // p-power, so land k - 2e*a in the window [-1, 2e - 2].
    long per = 2 * t->ram_index(lvl);
    long a = floor_div(k + 1, per);
    PadicScalar pa = PadicScalar::one(prime).shift(a);
    PadicScalar pai = PadicScalar::one(prime).shift(-a);
    return f_mat(t, lvl, pai, -(u * pai), PadicScalar::zero(prime), pa);
}

PolarDecomposition finish(const Mat2& g, const Mat2& h_total, const Mat2& a, long n,
                          int orbit_index, long bound) {
    const auto& t = g.tower();
    Level lvl = g.level();
    Mat2 tail = Mat2::identity(t, lvl);            // a^-n h
    Mat2 ainv = n == 0 ? tail : a.inverse();
    for (long i = 0; i < n; ++i) tail = tail * ainv;
    tail = tail * h_total;
    Mat2 kappa = tail * g.inverse();

    PolarDecomposition d;
    d.k = g * tail.inverse();
    d.a = a;
    d.n = -n;
    d.h = h_total;
    d.orbit_index = orbit_index;
    d.displacement = tree_distance(base_vertex(t, lvl), canonical_vertex(kappa));
    if (d.displacement > bound)
        throw DecompositionSearchExhausted("compact part displaced beyond the bound: " +
                                           std::to_string(d.displacement));

    Mat2 recon = d.k * tail;
    d.recon_defect_q = recon.defect_q(g);
    const long tol = 4 * (g.prime()->precision() - 4);
    if (d.recon_defect_q < tol)
        throw InternalInvariantViolation("polar reconstruction misses g at precision");
    return d;
}

PolarDecomposition decompose_rational_in_extension(const Mat2& g) {
    const auto& t = g.tower();
    auto prime = t->prime();
    if (g.level() != Level::E) throw LevelMismatch("pair needs level E");
    if (!g.is_sl()) throw Error("polar_decompose: g is not in SL(2,E) at precision");
    const bool ram = t->ext().e == 2;
    const long bound = polar_displacement_bound(PolarPair::RationalInsideExtension);

    TreeVertex w = canonical_vertex(g.inverse());
    Mat2 h_total = Mat2::identity(t, Level::E);
    bool flipped = false;

    for (int iter = 0; iter < 8; ++iter) {
        if (subtree_point_TF(w)) {
            Mat2 carry = carry_rational(t, Level::E, w.k, w.u.comp(0));
            h_total = carry * h_total;
            return finish(g, h_total, Mat2::identity(t, Level::E), 0, -1, bound);
        }
        if (!w.u.comp(0).is_zero_like()) {
            // Shear off the rational part of the hanging direction.  The
            // (k, u) rays head to the end [u : 1], so the translation acts
            // from the upper triangle.
            Mat2 shear = f_mat(t, Level::E, PadicScalar::one(prime), -w.u.comp(0),
                               PadicScalar::zero(prime), PadicScalar::one(prime));
            w = act_vertex(shear, w);
            h_total = shear * h_total;
            continue;
        }
        PadicScalar tpart = w.u.comp(1);
        if (tpart.is_zero_like())
            throw InternalInvariantViolation("vertex left the subtree with no direction");
        SquareClass cls = tpart.square_class();
        if (ram && cls.vparity == 1 && !flipped) {
            // Odd classes hang at unreachable midpoints; one Weyl flip moves
            // the direction into an even class.
            Mat2 flip = f_mat(t, Level::E, PadicScalar::zero(prime),
                              -PadicScalar::one(prime).shift(-1), PadicScalar::uniformizer(prime),
                              PadicScalar::zero(prime));
            w = act_vertex(flip, w);
            h_total = flip * h_total;
            flipped = true;
            continue;
        }
        PadicScalar mhat = class_rep(prime, cls);
        PadicScalar e = (tpart / mhat).sqrt();
        Mat2 diag = f_mat(t, Level::E, e.inv(), PadicScalar::zero(prime),
                          PadicScalar::zero(prime), e);
        w = act_vertex(diag, w);
        h_total = diag * h_total;

        ExtScalar malpha = ExtScalar::make_e(t, PadicScalar::zero(prime), mhat);
        long exitd = malpha.local_val();
        if (w.k <= exitd) continue;   // now a subtree point; carried next pass

        long n = (w.k - exitd + 1) / 2;
        Mat2 r = Mat2(ExtScalar::one(t, Level::E), malpha, ExtScalar::zero(t, Level::E),
                      ExtScalar::one(t, Level::E));
        ExtScalar we = ExtScalar::omega(t, Level::E);
        Mat2 a = r * Mat2::diag(we, we.inv()) * r.inverse();
        return finish(g, h_total, a, n, class_index(cls), bound);
    }
    throw DecompositionSearchExhausted("normalization loop did not converge");
}

PolarDecomposition decompose_fixed_group_a1(const Mat2& g) {
    const auto& t = g.tower();
    auto prime = t->prime();
    if (g.level() != Level::QP) throw LevelMismatch("pair needs level QP");
    if (!g.is_sl()) throw Error("polar_decompose: g is not in SL(2,F) at precision");
    const long bound = polar_displacement_bound(PolarPair::FixedGroupA1InsideRational);

    // Transport through C: H = C Diag C^-1 with C = [[1,-1],[1,1]].
    PadicScalar one = PadicScalar::one(prime);
    Mat2 c = f_mat(t, Level::QP, one, -one, one, one);
    Mat2 ci = c.inverse();
    Mat2 gh = ci * g * c;

    TreeVertex w = canonical_vertex(gh.inverse());
    Mat2 h_total = Mat2::identity(t, Level::QP);

    for (int iter = 0; iter < 8; ++iter) {
        if (w.u.is_zero_like()) {
            // On the invariant axis: carry along it by a diagonal power.
            long a = w.k >= 0 ? w.k / 2 : -((-w.k + 1) / 2);
            Mat2 diag = f_mat(t, Level::QP, one.shift(-a), PadicScalar::zero(prime),
                              PadicScalar::zero(prime), one.shift(a));
            h_total = diag * h_total;
            Mat2 hc = c * h_total * ci;
            PolarDecomposition d =
                finish(g, hc, Mat2::identity(t, Level::QP), 0, -1, bound);
            return d;
        }
        PadicScalar tpart = w.u.comp(0);
        SquareClass cls = tpart.square_class();
        PadicScalar mhat = class_rep(prime, cls);
        PadicScalar e = (tpart / mhat).sqrt();
        Mat2 diag = f_mat(t, Level::QP, e.inv(), PadicScalar::zero(prime),
                          PadicScalar::zero(prime), e);
        w = act_vertex(diag, w);
        h_total = diag * h_total;

        long exitd = mhat.val();
        if (w.k <= exitd) continue;

        long n = (w.k - exitd + 1) / 2;
        Mat2 shear = f_mat(t, Level::QP, one, mhat, PadicScalar::zero(prime), one);
        Mat2 a = shear *
                 f_mat(t, Level::QP, one.shift(1), PadicScalar::zero(prime),
                       PadicScalar::zero(prime), one.shift(-1)) *
                 shear.inverse();

        // Assemble in hat coordinates, then transport everything through C.
        Mat2 tail_hat = Mat2::identity(t, Level::QP);
        Mat2 ai = a.inverse();
        for (long i = 0; i < n; ++i) tail_hat = tail_hat * ai;
        tail_hat = tail_hat * h_total;
        Mat2 kappa = c * (tail_hat * gh.inverse()) * ci;
        Mat2 tail = c * tail_hat * ci;

        PolarDecomposition d;
        d.k = g * tail.inverse();
        d.a = c * a * ci;
        d.n = -n;
        d.h = c * h_total * ci;
        d.orbit_index = class_index(cls);
        d.displacement = tree_distance(base_vertex(t, Level::QP), canonical_vertex(kappa));
        if (d.displacement > bound)
            throw DecompositionSearchExhausted("compact part displaced beyond the bound");
        d.recon_defect_q = (d.k * tail).defect_q(g);
        const long tol = 4 * (prime->precision() - 4);
        if (d.recon_defect_q < tol)
            throw InternalInvariantViolation("polar reconstruction misses g at precision");
        return d;
    }
    throw DecompositionSearchExhausted("normalization loop did not converge");
}

}  // namespace

long polar_displacement_bound(PolarPair pair) {
    // Fundamental-region diameter (an edge, or two subdivided edges) plus
    // one for the parity of the landing vertex.
    (void)pair;
    return 2;
}

PolarDecomposition polar_decompose(const Mat2& g, PolarPair pair) {
    return pair == PolarPair::RationalInsideExtension ? decompose_rational_in_extension(g)
                                                      : decompose_fixed_group_a1(g);
}

}  // namespace sl2limits
