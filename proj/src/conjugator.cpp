#include "sl2limits/conjugator.hpp"

namespace sl2limits {

const char* case_name(CaseTag tag) {
    switch (tag) {
        case CaseTag::C1: return "C1";
        case CaseTag::C2: return "C2";
        case CaseTag::C4: return "C4";
        case CaseTag::C5_1: return "C5.1";
        case CaseTag::C5_2: return "C5.2";
        case CaseTag::C5_3: return "C5.3";
        case CaseTag::C5_4a: return "C5.4a";
        case CaseTag::C5_4b: return "C5.4b";
        case CaseTag::C5_4c: return "C5.4c";
        case CaseTag::Diag: return "diag";
    }
    return "?";
}

namespace {

/// sqrt of a Q_p scalar as a sigma-fixed element: in Q_p when the class is
/// trivial, as the new generator beta otherwise.  A value in the class of
/// alpha^2 has no sigma-fixed root in any biquadratic tower.
struct SigmaFixedRoot {
    TowerContextPtr tower;
    Level level;         // E if the root stayed rational, K otherwise
    ExtScalar c1;
};

SigmaFixedRoot sigma_fixed_sqrt(const TowerContextPtr& t, const PadicScalar& v) {
    SigmaFixedRoot r;
    if (v.is_exact_zero()) {
        r.tower = t;
        r.level = Level::E;
        r.c1 = ExtScalar::zero(t, Level::E);
        return r;
    }
    if (v.is_zero_like())
        throw CaseUndecidable("case condition rests on a scalar with no known digits");
    SquareClass cls = v.square_class();
    if (cls.label() == SquareClass::One) {
        r.tower = t;
        r.level = Level::E;
        r.c1 = ExtScalar::from_padic(t, Level::E, v.sqrt());
        return r;
    }
    if (cls == t->alpha_square().square_class())
        throw NoAdmissibleC("c1^2 lies in the square class of alpha^2");
    r.tower = t->with_beta(v);
    r.level = Level::K;
    r.c1 = ExtScalar::beta(r.tower);
    return r;
}

ConjugatorCertificate finish_sigma(const Involution& theta, Mat2 b, ExtScalar c,
                                   CaseTag tag, const TowerContextPtr& t, Level level) {
    ConjugatorCertificate cert;
    cert.B = std::move(b);
    cert.A = theta.matrix().retower(t, level);
    cert.c = std::move(c);
    cert.tag = tag;
    cert.target = ConjugatorCertificate::Target::Sigma;
    cert.level = level;

    if (!cert.B.is_invertible())
        throw InternalInvariantViolation(std::string("det B vanishes in case ") +
                                         case_name(tag));
    Mat2 resid = cert.A * cert.B.sigma() - cert.B.scale(cert.c);
    cert.residual_q = resid.min_entry_q();
    const long tol = 4 * (theta.prime()->precision() - 4);
    if (cert.residual_q < tol)
        throw InternalInvariantViolation(std::string("A sigma(B) != cB in case ") +
                                         case_name(tag));
    return cert;
}

bool zero_like_or_undecidable(const ExtScalar& x, const char* what) {
    if (x.is_zero_like()) {
        if (x.is_exact_zero()) return true;
        throw CaseUndecidable(std::string(what) + " is zero only within precision noise");
    }
    return false;
}

ConjugatorCertificate case_diag_family(const Involution& theta) {
    const auto& t = theta.tower();
    ExtScalar x = theta.param_x();
    ExtScalar one = ExtScalar::one(t, Level::E);
    const PadicScalar& x2 = x.comp(1);
    if (x2.is_zero_like()) {
        if (!x2.is_exact_zero())
            throw CaseUndecidable("alpha part of x is zero only within precision noise");
        // x = +-1.  For x = 1 theta is sigma itself; for x = -1 conjugate by
        // diag(alpha, 1).
        if ((x - one).is_zero_like())
            return finish_sigma(theta, Mat2::identity(t, Level::E), one, CaseTag::C1, t,
                                Level::E);
        if ((x + one).is_zero_like())
            return finish_sigma(theta, Mat2::diag(ExtScalar::alpha(t), one), one,
                                CaseTag::C1, t, Level::E);
        throw InternalInvariantViolation("x sigma(x) = 1 with rational x forces x = +-1");
    }
    // Case 2: B = diag((x1+1)/x2 + alpha, 1).
    ExtScalar top = ExtScalar::make_e(t, (x.comp(0) + PadicScalar::one(theta.prime())) / x2,
                                      PadicScalar::one(theta.prime()));
    return finish_sigma(theta, Mat2::diag(top, one), one, CaseTag::C2, t, Level::E);
}

ExtScalar embed_k(const TowerContextPtr& t, Level lvl, const PadicScalar& v) {
    return ExtScalar::from_padic(t, lvl, v);
}

ConjugatorCertificate case4(const Involution& theta, const PadicScalar& c2) {
    const ExtScalar& z = theta.param_z();
    PadicScalar z1 = z.comp(0), z2 = z.comp(1);
    PadicScalar s = theta.tower()->alpha_square();
    if ((z2 * z2 - c2 * c2).is_zero_like())
        throw NoAdmissibleC("case 4 needs c2^2 != z2^2; re-choose c2");

    PadicScalar q0 = theta.q().comp(0);
    SigmaFixedRoot root = sigma_fixed_sqrt(theta.tower(), q0 + s * c2 * c2);
    const auto& t = root.tower;
    Level lvl = root.level;

    ExtScalar alpha = ExtScalar::alpha(t, lvl);
    ExtScalar c1 = root.c1.lift_to(lvl);
    ExtScalar dz = embed_k(t, lvl, z2 - c2);
    ExtScalar dzi = dz.inv();
    ExtScalar b11 = embed_k(t, lvl, theta.param_y()) * dzi;
    ExtScalar b12 = (embed_k(t, lvl, z1) + c1) * dzi + alpha;
    ExtScalar b21 = (embed_k(t, lvl, -z1) + c1) * dzi + alpha;
    ExtScalar b22 = dzi;
    ExtScalar c = c1 + alpha * embed_k(t, lvl, c2);
    return finish_sigma(theta, Mat2(b11, b12, b21, b22), c, CaseTag::C4, t, lvl);
}

ConjugatorCertificate case5_12(const Involution& theta, bool plus) {
    const ExtScalar& z = theta.param_z();
    PadicScalar z1 = z.comp(0), z2 = z.comp(1);
    PadicScalar y = theta.param_y();
    if (z2.is_zero_like()) {
        if (!z2.is_exact_zero())
            throw CaseUndecidable("z2 is zero only within precision noise");
        throw NoAdmissibleC("cases 5.1/5.2 need z2 != 0");
    }
    PadicScalar c2 = plus ? z2 : -z2;

    SigmaFixedRoot root = sigma_fixed_sqrt(theta.tower(), z1 * z1 + y);
    const auto& t = root.tower;
    Level lvl = root.level;

    ExtScalar alpha = ExtScalar::alpha(t, lvl);
    ExtScalar c1 = root.c1.lift_to(lvl);
    ExtScalar se = embed_k(t, lvl, t->alpha_square());
    ExtScalar z1e = embed_k(t, lvl, z1);
    ExtScalar ye = embed_k(t, lvl, y);
    ExtScalar one = ExtScalar::one(t, lvl);
    ExtScalar zp = z1e + c1;                       // z1 + c1
    ExtScalar zm = z1e - c1;                       // z1 - c1
    Mat2 b = Mat2::identity(t, lvl);
    CaseTag tag;
    if (plus) {
        // B2 with z2 = c2.
        ExtScalar sum2 = embed_k(t, lvl, z2 + c2);
        b = Mat2(-se * sum2 * zp / ye + alpha, se * sum2 + zp + alpha * zm,
                 -alpha * zp / ye, one + alpha);
        tag = CaseTag::C5_1;
    } else {
        // B3 with z2 = -c2.  The 2 z2 terms enter with a plus sign: the
        // columns (u, v) must satisfy u = z v + sigma(c) sigma(v).
        ExtScalar z2e = embed_k(t, lvl, z2);
        ExtScalar two = ExtScalar::integer(t, lvl, 2);
        b = Mat2(one + alpha * two * z2e / zp, zp + alpha * (zm + two * z2e),
                 zp.inv(), one + alpha);
        tag = CaseTag::C5_2;
    }
    ExtScalar c = c1 + alpha * embed_k(t, lvl, c2);
    return finish_sigma(theta, b, c, tag, t, lvl);
}

ConjugatorCertificate case5_3(const Involution& theta) {
    const ExtScalar& z = theta.param_z();
    PadicScalar z1 = z.comp(0), z2 = z.comp(1);
    PadicScalar y = theta.param_y();
    if (!z2.is_zero_like())
        throw NoAdmissibleC("case 5.3 needs z2 = 0");
    if (!z2.is_exact_zero())
        throw CaseUndecidable("z2 is zero only within precision noise");

    SigmaFixedRoot root = sigma_fixed_sqrt(theta.tower(), z1 * z1 + y);
    const auto& t = root.tower;
    Level lvl = root.level;

    ExtScalar alpha = ExtScalar::alpha(t, lvl);
    ExtScalar c1 = root.c1.lift_to(lvl);
    ExtScalar z1e = embed_k(t, lvl, z1);
    ExtScalar ye = embed_k(t, lvl, y);
    Mat2 b(alpha * (z1e - c1), ExtScalar::one(t, lvl), alpha, (c1 - z1e) / ye);
    return finish_sigma(theta, b, c1, CaseTag::C5_3, t, lvl);
}

ConjugatorCertificate case5_4(const Involution& theta) {
    const auto& t = theta.tower();
    auto prime = theta.prime();
    const ExtScalar& z = theta.param_z();
    // Normalize A = [[z,0],[1,-sigma(z)]] by -1/sigma(z) to [[x,0],[w,1]]
    // with x sigma(x) = 1 and w = -x sigma(w).
    ExtScalar szi = -z.sigma().inv();
    ExtScalar x = z * szi;
    ExtScalar w = szi;
    PadicScalar x1 = x.comp(0), x2 = x.comp(1);
    PadicScalar w1 = w.comp(0), w2 = w.comp(1);
    ExtScalar alpha = ExtScalar::alpha(t);
    ExtScalar one = ExtScalar::one(t, Level::E);
    ExtScalar zero = ExtScalar::zero(t, Level::E);
    PadicScalar z1 = z.comp(0), z2 = z.comp(1);

    // c = A sigma(B) / B is x-dependent; compute it from the top-left later.
    Mat2 b = Mat2::identity(t, Level::E);
    CaseTag tag;
    if (!z1.is_zero_like() && !z2.is_zero_like()) {
        ExtScalar b11 =
            ExtScalar::make_e(t, (PadicScalar::one(prime) + x1) / x2, PadicScalar::one(prime));
        ExtScalar b21 = alpha * ExtScalar::from_padic(t, Level::E, w2 / x2);
        b = Mat2(b11, zero, b21, one);
        tag = CaseTag::C5_4a;
    } else if (z1.is_zero_like()) {
        if (!z1.is_exact_zero())
            throw CaseUndecidable("z1 is zero only within precision noise");
        // x = 1, w = alpha w2.
        ExtScalar half = ExtScalar::integer(t, Level::E, 2).inv();
        b = Mat2(one, zero, alpha * ExtScalar::from_padic(t, Level::E, w2) * half, one);
        tag = CaseTag::C5_4b;
    } else {
        if (!z2.is_exact_zero())
            throw CaseUndecidable("z2 is zero only within precision noise");
        // x = -1, w = w1.
        ExtScalar half_w1 = ExtScalar::from_padic(t, Level::E, w1) *
                            ExtScalar::integer(t, Level::E, 2).inv();
        b = Mat2(alpha, alpha, one - alpha * half_w1, -one - alpha * half_w1);
        tag = CaseTag::C5_4c;
    }
    // Recover c entrywise: c = (A sigma(B))_ij / B_ij at a nonzero position.
    Mat2 lhs = theta.matrix() * b.sigma();
    ExtScalar c;
    if (!b.proportional_to(lhs, c))
        throw InternalInvariantViolation("case 5.4: A sigma(B) is not proportional to B");
    return finish_sigma(theta, b, c, tag, t, Level::E);
}

}  // namespace

ConjugatorCertificate conjugator_to_sigma(const Involution& theta,
                                          const ConjugatorOptions& opts) {
    if (theta.gamma() != Gamma::Sigma)
        throw Error("conjugator_to_sigma: involution is not of sigma type");
    auto prime = theta.prime();

    if (theta.family() == Involution::Family::DiagX) {
        if (opts.force_case && *opts.force_case != CaseTag::C1 &&
            *opts.force_case != CaseTag::C2)
            throw Error("requested case does not apply to the diagonal family");
        return case_diag_family(theta);
    }

    PadicScalar y = theta.param_y();
    PadicScalar c2 = opts.c2 ? *opts.c2 : PadicScalar::zero(prime);

    if (opts.force_case) {
        switch (*opts.force_case) {
            case CaseTag::C4: return case4(theta, c2);
            case CaseTag::C5_1: return case5_12(theta, true);
            case CaseTag::C5_2: return case5_12(theta, false);
            case CaseTag::C5_3: return case5_3(theta);
            case CaseTag::C5_4a:
            case CaseTag::C5_4b:
            case CaseTag::C5_4c: return case5_4(theta);
            default: throw Error("requested case does not apply to this family");
        }
    }

    if (zero_like_or_undecidable(ExtScalar::from_padic(theta.tower(), Level::E, y), "y"))
        return case5_4(theta);

    // Case 4 first, then the degenerate 5.x cases.
    try {
        return case4(theta, c2);
    } catch (const NoAdmissibleC&) {
        if (!opts.c2) {
            // Default retry with c2 = 1 before falling through.
            try {
                return case4(theta, PadicScalar::one(prime));
            } catch (const NoAdmissibleC&) {
            }
        }
    }
    if (theta.param_z().comp(1).is_zero_like()) return case5_3(theta);
    return case5_12(theta, true);
}

ConjugatorCertificate conjugator_to_diagonal(const PrimeContextPtr& prime,
                                             const PadicScalar& a) {
    if (a.is_zero_like()) throw Error("conjugator_to_diagonal: a must be nonzero");
    FixedEnds fe = fixed_ends(prime, a);
    const auto& t = fe.tower;
    Level lvl = fe.level;
    ExtScalar one = ExtScalar::one(t, lvl);
    ExtScalar ra = fe.sqrt_a;
    Mat2 c(one, -ra.inv(), ra, one);

    ConjugatorCertificate cert;
    cert.B = c;
    cert.A = Mat2::weyl_times(ExtScalar::from_padic(t, lvl, a));
    cert.c = one;
    cert.tag = CaseTag::Diag;
    cert.target = ConjugatorCertificate::Target::Diag;
    cert.level = lvl;

    Mat2 conj = c.inverse() * cert.A * c;
    Mat2 target = Mat2::diag(one, -one);
    ExtScalar q;
    if (!target.proportional_to(conj, q))
        throw InternalInvariantViolation("C^-1 A C is not proportional to diag(1,-1)");
    cert.residual_q = conj.defect_q(target.scale(q));
    return cert;
}

bool h_theta_sigma_membership(const ConjugatorCertificate& cert, const Mat2& g) {
    if (cert.target != ConjugatorCertificate::Target::Sigma)
        throw Error("membership needs a sigma-target certificate");
    Mat2 lifted = g.retower(cert.tower(), cert.level);
    Mat2 m = cert.B.inverse() * lifted * cert.B;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const ExtScalar& e = m.at(i, j);
            if (!e.comp(1).is_zero_like()) return false;
            if (cert.level == Level::K && !e.comp(3).is_zero_like()) return false;
        }
    return true;
}

}  // namespace sl2limits
