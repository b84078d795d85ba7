#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sl2limits/rng.hpp"
#include "sl2limits/tower.hpp"

using namespace sl2limits;

namespace {
TowerContextPtr tower(ExtensionKind k, long p = 5) {
    return TowerContext::make(PrimeContext::make(p), ExtensionDescriptor::make(k));
}
}  // namespace

TEST_CASE("defining relation alpha^2 = s") {
    for (auto kind : {ExtensionKind::Unramified, ExtensionKind::RamifiedP,
                      ExtensionKind::RamifiedPS}) {
        auto t = tower(kind);
        auto a = ExtScalar::alpha(t);
        auto sq = a * a;
        CHECK(sq.comp(1).is_exact_zero());
        CHECK((sq.comp(0) - t->alpha_square()).is_exact_zero());
    }
}

TEST_CASE("valuations across levels") {
    auto tu = tower(ExtensionKind::Unramified);
    auto tr = tower(ExtensionKind::RamifiedP);

    CHECK(ExtScalar::integer(tu, Level::E, 5).vq().q == 4);       // v(p) = 1
    CHECK(ExtScalar::alpha(tr).vq().q == 2);                      // v(alpha) = 1/2
    CHECK(ExtScalar::alpha(tr).local_val() == 1);
    auto x = ExtScalar::make_e(tu, PadicScalar::integer(tu->prime(), 3),
                               PadicScalar::integer(tu->prime(), 5));
    CHECK(x.vq().q == 0);                                          // min(0, 1)
    CHECK(x.local_val() == 0);
}

TEST_CASE("sigma conjugation and relative norm") {
    auto t = tower(ExtensionKind::Unramified);
    auto x = ExtScalar::make_e(t, PadicScalar::integer(t->prime(), 3),
                               PadicScalar::integer(t->prime(), 4));
    auto sx = x.sigma();
    CHECK((sx.comp(0) - x.comp(0)).is_exact_zero());
    CHECK((sx.comp(1) + x.comp(1)).is_exact_zero());
    CHECK(sx.sigma().indistinguishable(x));

    // norm(3 + 2a) with a^2 = 2: 9 - 2*4 = 1
    auto y = ExtScalar::make_e(t, PadicScalar::integer(t->prime(), 3),
                               PadicScalar::integer(t->prime(), 2));
    auto n = y.norm_down();
    CHECK(n.level() == Level::QP);
    CHECK((n - ExtScalar::one(t, Level::QP)).is_exact_zero());

    CHECK_THROWS_AS(ExtScalar::one(t, Level::QP).sigma(), LevelMismatch);
}

TEST_CASE("sigma is an involution on random scalars at E and K") {
    auto t0 = tower(ExtensionKind::Unramified);
    auto t = t0->with_beta(PadicScalar::uniformizer(t0->prime()));
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        auto x = rng.ext(t, i % 2 == 0 ? Level::E : Level::K);
        CHECK(x.sigma().sigma().indistinguishable(x));
    }
}

TEST_CASE("field axioms at level K (sampled)") {
    auto t0 = tower(ExtensionKind::RamifiedP);
    auto t = t0->with_beta(PadicScalar::integer(t0->prime(), 2));   // beta^2 = S
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        auto x = rng.ext(t, Level::K);
        auto y = rng.ext(t, Level::K);
        auto z = rng.ext(t, Level::K);
        CHECK((x * (y + z)).indistinguishable(x * y + x * z));
        CHECK((x * y).indistinguishable(y * x));
        auto xi = x.inv();
        CHECK((x * xi).indistinguishable(ExtScalar::one(t, Level::K)));
    }
}

TEST_CASE("K valuation via norm and multiplicativity") {
    auto t0 = tower(ExtensionKind::Unramified);
    auto t = t0->with_beta(PadicScalar::uniformizer(t0->prime()));
    Rng rng(19);
    auto b = ExtScalar::beta(t);
    CHECK(b.vq().q == 2);                     // v(beta) = 1/2
    CHECK(b.local_val() == 1);
    for (int i = 0; i < 200; ++i) {
        auto x = rng.ext(t, Level::K);
        auto y = rng.ext(t, Level::K);
        CHECK((x * y).vq().q == x.vq().q + y.vq().q);
    }
}

TEST_CASE("sigma fixes K^sigma pointwise") {
    auto t0 = tower(ExtensionKind::Unramified);
    auto t = t0->with_beta(PadicScalar::uniformizer(t0->prime()));
    Rng rng(23);
    for (int i = 0; i < 100; ++i) {
        auto x = ExtScalar::make_k(t, rng.scalar(t->prime(), -1, 1),
                                   PadicScalar::zero(t->prime()),
                                   rng.scalar(t->prime(), -1, 1),
                                   PadicScalar::zero(t->prime()));
        CHECK(x.sigma().indistinguishable(x));
    }
}

TEST_CASE("extension square classes see four labels") {
    for (auto kind : {ExtensionKind::Unramified, ExtensionKind::RamifiedP}) {
        auto t = tower(kind);
        Rng rng(29);
        bool seen[4] = {false, false, false, false};
        for (int i = 0; i < 800; ++i) {
            auto x = rng.ext(t, Level::E, -2, 2);
            auto y = rng.ext(t, Level::E, -1, 1);
            auto c = x.square_class_level();
            seen[c.label()] = true;
            CHECK((x * y * y).square_class_level() == c);
        }
        for (bool s : seen) CHECK(s);
    }
}

TEST_CASE("sqrt at level E") {
    for (auto kind : {ExtensionKind::Unramified, ExtensionKind::RamifiedP,
                      ExtensionKind::RamifiedPS}) {
        auto t = tower(kind);
        Rng rng(31);
        for (int i = 0; i < 120; ++i) {
            auto y = rng.ext(t, Level::E, -1, 1);
            auto x = y * y;
            auto r = x.sqrt();
            CHECK((r * r - x).is_zero_like());
        }
    }
    // alpha itself is not a square at level E of a ramified tower.
    auto t = tower(ExtensionKind::RamifiedP);
    CHECK_THROWS_AS(ExtScalar::alpha(t).sqrt(), NonSquare);
}

TEST_CASE("hensel at level E finds sqrt of 1 + small") {
    auto t = tower(ExtensionKind::Unramified);
    auto eps = ExtScalar::make_e(t, PadicScalar::integer(t->prime(), 5),
                                 PadicScalar::integer(t->prime(), 10));
    auto u = ExtScalar::one(t, Level::E) + eps;
    std::vector<ExtScalar> f = {-u, ExtScalar::zero(t, Level::E), ExtScalar::one(t, Level::E)};
    auto r = hensel_root(f, ExtScalar::one(t, Level::E));
    CHECK((r * r - u).is_zero_like());
}

TEST_CASE("tower construction guards") {
    auto t = tower(ExtensionKind::Unramified);
    CHECK_THROWS(t->with_beta(PadicScalar::integer(t->prime(), 4)));   // square
    CHECK_THROWS(t->with_beta(PadicScalar::integer(t->prime(), 2)));   // same class as S
    auto tk = t->with_beta(PadicScalar::uniformizer(t->prime()));
    CHECK(tk->has_beta());
    CHECK_THROWS_AS(ExtScalar::zero(t, Level::K), LevelMismatch);
}
