#include "sl2limits/real_limits.hpp"

#include <algorithm>
#include <cmath>

namespace sl2limits {

CMat2 CMat2::operator*(const CMat2& o) const {
    CMat2 r;
    r.e = {e[0] * o.e[0] + e[1] * o.e[2], e[0] * o.e[1] + e[1] * o.e[3],
           e[2] * o.e[0] + e[3] * o.e[2], e[2] * o.e[1] + e[3] * o.e[3]};
    return r;
}

CMat2 CMat2::operator-(const CMat2& o) const {
    CMat2 r;
    for (int i = 0; i < 4; ++i) r.e[static_cast<size_t>(i)] = e[static_cast<size_t>(i)] - o.e[static_cast<size_t>(i)];
    return r;
}

double CMat2::max_abs() const {
    double m = 0.0;
    for (const auto& x : e) m = std::max(m, std::abs(x));
    return m;
}

CMat2 CMat2::identity() {
    CMat2 r;
    r.e = {cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(1, 0)};
    return r;
}

CMat2 rotated_real_subgroup_element(double a, double b, double c, double d) {
    if (std::abs(a * d - b * c - 1.0) > 1e-12)
        throw Error("rotated_real_subgroup_element: input is not in SL(2,R)");
    CMat2 r;
    r.e[0] = cplx(-a + 2 * d, 2 * c + b);
    r.e[1] = cplx(-c - b / 4.0, (d - a) / 2.0);
    r.e[2] = cplx(-4 * c - 4 * b, -4 * a + 4 * d);
    r.e[3] = cplx(2 * a - d, -b - 2 * c);
    return r;
}

CMat2 rotated_real_subgroup_product(double a, double b, double c, double d) {
    const cplx i(0.0, 1.0);
    CMat2 m, h, mi;
    m.e = {1.0 / (2.0 * i) + i, cplx(1, 0), cplx(-2, 0), 2.0 * i};
    h.e = {cplx(a, 0), cplx(b, 0), cplx(c, 0), cplx(d, 0)};
    mi.e = {2.0 * i, cplx(-1, 0), cplx(2, 0), i + 1.0 / (2.0 * i)};
    return m * h * mi;
}

std::array<double, 4> real_limit_sequence(const RealTarget& target, long n) {
    if (std::abs(target.a * target.a + target.b * target.b - 1.0) > 1e-12)
        throw Error("real_limit_sequence: target is not on the unit circle");
    // The achievable upper entry is z1 + i z2/2, so feed doubled imaginary part.
    const double z1 = target.z.real();
    const double z2 = 2.0 * target.z.imag();
    const double decay = std::exp(-2.0 * static_cast<double>(n));

    double an, bn, cn, dn;
    if (std::abs(target.b * target.b - 1.0) < 1e-14) {
        // b^2 = 1: a_n = 0 and the determinant is quadratic in c_n.
        an = 0.0;
        double beta = z1 * decay;
        double disc = beta * beta + 1.0;
        double sign = target.b >= 0 ? 1.0 : -1.0;
        cn = (-beta + sign * std::sqrt(disc)) / 2.0;
        dn = z2 * decay + an;
        bn = -4.0 * (z1 * decay + cn);
    } else {
        // b^2 != 1: c_n is pinned and the determinant is quadratic in a_n.
        cn = target.b / 2.0;
        double lin = z2 * decay;
        double cst = target.b * target.b - 1.0 + 2.0 * target.b * z1 * decay;
        double disc = lin * lin - 4.0 * cst;
        if (disc < 0.0)
            throw NoRealRoot("discriminant negative; retry with larger n");
        double r1 = (-lin + std::sqrt(disc)) / 2.0;
        double r2 = (-lin - std::sqrt(disc)) / 2.0;
        an = std::abs(r1 - target.a) <= std::abs(r2 - target.a) ? r1 : r2;
        dn = z2 * decay + an;
        bn = -4.0 * (z1 * decay + target.b / 2.0);
    }
    return {an, bn, cn, dn};
}

RealConvergenceReport verify_real_convergence(const RealTarget& target, long n_min,
                                              long n_max) {
    RealConvergenceReport rep;
    const cplx i(0.0, 1.0);
    const cplx lim11 = cplx(target.a, -target.b);
    const cplx lim22 = cplx(target.a, target.b);

    std::vector<std::pair<double, double>> pts;
    CMat2 last = CMat2::identity();
    for (long n = n_min; n <= n_max; ++n) {
        std::array<double, 4> q;
        try {
            q = real_limit_sequence(target, n);
        } catch (const NoRealRoot&) {
            continue;
        }
        CMat2 g = rotated_real_subgroup_element(q[0], q[1], q[2], q[3]);
        double grow = std::exp(2.0 * static_cast<double>(n));
        g.e[1] *= grow;
        g.e[2] /= grow;

        RealConvergenceRecord rec;
        rec.n = n;
        rec.err_lower_left = std::abs(g.e21());
        rec.err_diag = std::abs(g.e11() - lim11) + std::abs(g.e22() - lim22);
        rec.err_upper = std::abs(g.e12() - target.z);
        rec.det_err = std::abs(g.det() - cplx(1, 0));
        rep.records.push_back(rec);
        last = g;

        // The e^2n-rescaled upper entry amplifies rounding noise, so the
        // decay fit runs on the unamplified components; the upper entry is
        // reported verbatim and checked against its own float budget.
        double decay_err = rec.err_lower_left + rec.err_diag;
        rep.upper_err_max = std::max(rep.upper_err_max, rec.err_upper);
        if (decay_err > 1e-13) pts.emplace_back(static_cast<double>(n), std::log(decay_err));
    }
    if (pts.size() < 3) {
        rep.degenerate = true;
    } else {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [x, y] : pts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double m = static_cast<double>(pts.size());
        rep.log_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    rep.diag_conjugacy_err = std::abs(std::conj(last.e11()) - last.e22());
    double ahat = (last.e11().real() + last.e22().real()) / 2.0;
    double bhat = (last.e22().imag() - last.e11().imag()) / 2.0;
    rep.norm_err = std::abs(ahat * ahat + bhat * bhat - 1.0);
    return rep;
}

}  // namespace sl2limits
