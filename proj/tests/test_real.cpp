#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sl2limits/real_limits.hpp"

using namespace sl2limits;

TEST_CASE("closed form matches the triple product") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    CMat2 id = rotated_real_subgroup_element(1, 0, 0, 1);
    CHECK((id - CMat2::identity()).max_abs() < 1e-12);

    for (int i = 0; i < 200; ++i) {
        double a = d(gen), b = d(gen), c = d(gen);
        if (std::abs(a) < 0.1) a = 0.5;
        double dd = (1.0 + b * c) / a;
        CMat2 lhs = rotated_real_subgroup_element(a, b, c, dd);
        CMat2 rhs = rotated_real_subgroup_product(a, b, c, dd);
        CHECK((lhs - rhs).max_abs() < 1e-10);
        CHECK(std::abs(lhs.det() - cplx(1, 0)) < 1e-9);
    }
    // The two worked rows: (0,1,-1,0) and (2,0,0,1/2).
    CHECK((rotated_real_subgroup_element(0, 1, -1, 0) -
           rotated_real_subgroup_product(0, 1, -1, 0))
              .max_abs() < 1e-12);
    CHECK((rotated_real_subgroup_element(2, 0, 0, 0.5) -
           rotated_real_subgroup_product(2, 0, 0, 0.5))
              .max_abs() < 1e-12);

    CHECK_THROWS_AS(rotated_real_subgroup_element(1, 1, 1, 1), Error);
}

TEST_CASE("sequence members stay on SL(2,R)") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> d(0.0, 6.28318530717958648);
    for (int i = 0; i < 100; ++i) {
        double phi = d(gen);
        RealTarget t{std::cos(phi), std::sin(phi), cplx(d(gen) - 3.0, d(gen) - 3.0)};
        for (long n : {8L, 10L, 12L}) {
            auto q = real_limit_sequence(t, n);
            CHECK(std::abs(q[0] * q[3] - q[1] * q[2] - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("both proof subcases produce real roots at moderate n") {
    // b^2 = 1 branch.
    RealTarget t1{0.0, 1.0, cplx(1.0, 0.0)};
    auto q1 = real_limit_sequence(t1, 10);
    CHECK(std::abs(q1[0] * q1[3] - q1[1] * q1[2] - 1.0) < 1e-12);

    // b^2 != 1 branch.
    RealTarget t2{0.8, 0.6, cplx(0.0, 1.0)};
    auto q2 = real_limit_sequence(t2, 10);
    CHECK(std::abs(q2[0] * q2[3] - q2[1] * q2[2] - 1.0) < 1e-12);

    CHECK_THROWS_AS(real_limit_sequence(RealTarget{2.0, 0.0, cplx(0, 0)}, 10), Error);
}

TEST_CASE("degenerate target sits at machine epsilon") {
    RealTarget t{1.0, 0.0, cplx(0.0, 0.0)};
    auto rep = verify_real_convergence(t, 1, 15);
    CHECK(rep.degenerate);
    for (const auto& rec : rep.records) {
        CHECK(rec.err_diag < 1e-12);
        CHECK(rec.err_lower_left < 1e-12);
        CHECK(rec.det_err < 1e-9);
    }
}

TEST_CASE("log-error slope is -2 and the limit diagonal is conjugate") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> d(0.1, 6.0);
    int checked = 0;
    for (int i = 0; i < 10; ++i) {
        double phi = d(gen);
        RealTarget t{std::cos(phi), std::sin(phi), cplx(d(gen) - 3.0, d(gen) - 3.0)};
        auto rep = verify_real_convergence(t, 5, 15);
        if (rep.degenerate) continue;
        ++checked;
        CHECK(rep.log_slope > -2.2);
        CHECK(rep.log_slope < -1.8);
        CHECK(rep.upper_err_max < 5e-3);
        CHECK(rep.diag_conjugacy_err < 1e-9);
        CHECK(rep.norm_err < 1e-9);
        for (const auto& rec : rep.records) CHECK(rec.det_err < 1e-9);
    }
    CHECK(checked >= 8);
}
