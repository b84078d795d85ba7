#pragma once

#include <array>
#include <complex>
#include <vector>

#include "sl2limits/errors.hpp"

namespace sl2limits {

using cplx = std::complex<double>;

/// 2x2 complex matrix in row-major order.
struct CMat2 {
    std::array<cplx, 4> e{};

    const cplx& e11() const { return e[0]; }
    const cplx& e12() const { return e[1]; }
    const cplx& e21() const { return e[2]; }
    const cplx& e22() const { return e[3]; }

    CMat2 operator*(const CMat2& o) const;
    CMat2 operator-(const CMat2& o) const;
    cplx det() const { return e[0] * e[3] - e[1] * e[2]; }
    double max_abs() const;
    static CMat2 identity();
};

/// The rotated real subgroup element M h M^-1 with M = [[(2i)^-1 + i, 1],[-2, 2i]],
/// evaluated as the displayed closed form; |ad - bc - 1| <= 1e-12 required.
CMat2 rotated_real_subgroup_element(double a, double b, double c, double d);

/// The same element by the direct triple product (cross-check oracle).
CMat2 rotated_real_subgroup_product(double a, double b, double c, double d);

struct RealTarget {
    double a = 1.0;
    double b = 0.0;      // a^2 + b^2 = 1
    cplx z{0.0, 0.0};
};

/// The n-th approximating quadruple (a_n, b_n, c_n, d_n) in SL(2,R); both
/// proof subcases (b^2 = 1 and b^2 != 1) are implemented.  Throws NoRealRoot
/// when the quadratic has no real solution yet.
std::array<double, 4> real_limit_sequence(const RealTarget& target, long n);

struct RealConvergenceRecord {
    long n = 0;
    double err_lower_left = 0.0;   // |e21 entry| of the conjugated element
    double err_diag = 0.0;         // distance of the diagonal to (a - ib, a + ib)
    double err_upper = 0.0;        // distance of e12 to z
    double det_err = 0.0;
};

struct RealConvergenceReport {
    std::vector<RealConvergenceRecord> records;
    double log_slope = 0.0;        // fitted slope of the unamplified error vs n
    double upper_err_max = 0.0;    // worst rescaled upper-entry error
    double diag_conjugacy_err = 0.0;   // |conj(e11) - e22| at the last step
    double norm_err = 0.0;             // |a^2 + b^2 - 1| of the recovered diagonal
    bool degenerate = false;       // errors at machine epsilon; no slope fit
};

/// Conjugates the approximating sequence by diag(e^n, e^-n) and fits the
/// exponential error decay against the limit [[a - ib, z],[0, a + ib]].
RealConvergenceReport verify_real_convergence(const RealTarget& target, long n_min,
                                              long n_max);

}  // namespace sl2limits
