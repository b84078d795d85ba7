#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sl2limits/padic.hpp"
#include "sl2limits/rng.hpp"

using namespace sl2limits;

namespace {
PrimeContextPtr q5() {
    static PrimeContextPtr ctx = PrimeContext::make(5, 40);
    return ctx;
}

// Independent oracle: all square roots of n mod p^k by exhaustive search.
std::vector<long> roots_mod_pk(long n, long p, int k) {
    long mod = 1;
    for (int i = 0; i < k; ++i) mod *= p;
    std::vector<long> out;
    long nn = ((n % mod) + mod) % mod;
    for (long r = 0; r < mod; ++r)
        if ((r * r) % mod == nn) out.push_back(r);
    return out;
}
}  // namespace

TEST_CASE("context picks the smallest non-residue") {
    CHECK(q5()->nonsquare() == 2);
    CHECK(PrimeContext::make(7)->nonsquare() == 3);
    CHECK(PrimeContext::make(3)->nonsquare() == 2);
    CHECK_THROWS_AS(PrimeContext::make(4), ConfigError);
    CHECK_THROWS_AS(PrimeContext::make(2), ConfigError);
}

TEST_CASE("exact cancellation collapses to exact zero") {
    auto one = PadicScalar::one(q5());
    auto sum = one + (-one);
    CHECK(sum.is_exact_zero());
}

TEST_CASE("uniformizer inverse") {
    auto p = PadicScalar::uniformizer(q5());
    auto ip = p.inv();
    CHECK(ip.val() == -1);
    CHECK(ip.unit() == 1);
    CHECK((p * ip - PadicScalar::one(q5())).is_exact_zero());
}

TEST_CASE("inexact cancellation keeps only the bound") {
    Rng rng(7);
    auto x = rng.unit(q5());
    auto noisy = x.inv().inv();       // no longer exact
    CHECK_FALSE(noisy.is_exact());
    auto diff = noisy - x;
    CHECK(diff.is_zero_like());
    CHECK_FALSE(diff.is_exact_zero());
    CHECK(diff.val_or_bound() >= 36);
    CHECK_THROWS_AS(diff.inv(), DivisionByInexactZero);
}

TEST_CASE("square classes over Q_5") {
    auto cls = [&](long n) { return PadicScalar::integer(q5(), n).square_class().label(); };
    CHECK(cls(1) == SquareClass::One);
    CHECK(cls(4) == SquareClass::One);
    CHECK(cls(2) == SquareClass::S);
    CHECK(cls(50) == SquareClass::S);      // v = 2 even, unit 2 NQR
    CHECK(cls(5) == SquareClass::Omega);
    CHECK(cls(10) == SquareClass::SOmega);
    CHECK_THROWS_AS(PadicScalar::zero(q5()).square_class(), ZeroHasNoClass);
}

TEST_CASE("square class partitions and is square-invariant") {
    for (long pr : {3L, 5L, 7L}) {
        auto ctx = PrimeContext::make(pr);
        Rng rng(11 + pr);
        bool seen[4] = {false, false, false, false};
        for (int i = 0; i < 1000; ++i) {
            auto x = rng.scalar(ctx, -3, 3);
            auto y = rng.scalar(ctx, -2, 2);
            auto cx = x.square_class();
            seen[cx.label()] = true;
            CHECK((x * y * y).square_class() == cx);
        }
        for (bool s : seen) CHECK(s);
    }
}

TEST_CASE("hensel root agrees with exhaustive search mod 25") {
    auto six = PadicScalar::integer(q5(), 6);
    std::vector<PadicScalar> f = {-six, PadicScalar::zero(q5()), PadicScalar::one(q5())};
    auto x = hensel_root_qp(f, PadicScalar::one(q5()));
    auto oracle = roots_mod_pk(6, 5, 2);
    REQUIRE(oracle.size() == 2);
    long rep = static_cast<long>(x.mod_pk(2).unit() % 25);
    CHECK((rep == oracle[0] || rep == oracle[1]));
    CHECK(rep == 16);
    CHECK((x * x - six).val_or_bound() >= 36);
}

TEST_CASE("hensel rejects a non-residue and trivial fixed point") {
    std::vector<PadicScalar> f2 = {PadicScalar::integer(q5(), -2), PadicScalar::zero(q5()),
                                   PadicScalar::one(q5())};
    CHECK_THROWS_AS(hensel_root_qp(f2, PadicScalar::one(q5())), HenselConditionFailed);

    std::vector<PadicScalar> f1 = {PadicScalar::integer(q5(), -1), PadicScalar::zero(q5()),
                                   PadicScalar::one(q5())};
    auto x = hensel_root_qp(f1, PadicScalar::one(q5()));
    CHECK((x - PadicScalar::one(q5())).is_exact_zero());
}

TEST_CASE("hensel uniqueness inside a residue disc") {
    auto six = PadicScalar::integer(q5(), 6);
    std::vector<PadicScalar> f = {-six, PadicScalar::zero(q5()), PadicScalar::one(q5())};
    auto a = hensel_root_qp(f, PadicScalar::one(q5()));
    auto b = hensel_root_qp(f, PadicScalar::integer(q5(), 16));
    CHECK(a.indistinguishable(b));
}

TEST_CASE("sqrt canonical branch and errors") {
    auto r = PadicScalar::integer(q5(), 4).sqrt();
    CHECK((r - PadicScalar::integer(q5(), 2)).is_zero_like());

    CHECK_THROWS_AS(PadicScalar::uniformizer(q5()).sqrt(), NonSquare);
    try {
        PadicScalar::uniformizer(q5()).sqrt();
    } catch (const NonSquare& e) {
        CHECK(e.vparity == 1);
    }

    auto s6 = PadicScalar::integer(q5(), 6).sqrt();
    CHECK(s6.mod_pk(2).unit() == 16);
}

TEST_CASE("sqrt squares back on random squares") {
    Rng rng(23);
    for (int i = 0; i < 500; ++i) {
        auto y = rng.scalar(q5(), -2, 2);
        auto x = y * y;
        auto r = x.sqrt();
        CHECK((r * r - x).is_zero_like());
    }
}

TEST_CASE("valuation is additive and ultrametric") {
    Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
        auto x = rng.scalar(q5(), -4, 4);
        auto y = rng.scalar(q5(), -4, 4);
        CHECK((x * y).val() == x.val() + y.val());
        auto s = x + y;
        long bound = std::min(x.val(), y.val());
        CHECK(s.val_or_bound() >= bound);
        if (x.val() != y.val()) CHECK(s.val() == bound);
    }
}

TEST_CASE("digit windows truncate pessimistically") {
    // A product of two 40-digit units keeps 40 digits, not 80.
    Rng rng(41);
    auto x = rng.unit(q5());
    auto y = rng.unit(q5());
    CHECK((x * y).rel_precision() <= 40);
    // Inverse of a non-trivial unit is inexact.
    CHECK_FALSE(PadicScalar::integer(q5(), 3).inv().is_exact());
    // mod_pk of a known window works; beyond it throws.
    auto z = PadicScalar::from_unit(q5(), 7, 0, 5, false);
    CHECK(z.mod_pk(3).unit() == 7);
    CHECK_THROWS_AS(z.mod_pk(9), PrecisionExhausted);
}
