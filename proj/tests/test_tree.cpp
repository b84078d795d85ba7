#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "sl2limits/orbit.hpp"
#include "sl2limits/tree.hpp"

using namespace sl2limits;

namespace {
TowerContextPtr tw(ExtensionKind k = ExtensionKind::Unramified, long p = 5) {
    return TowerContext::make(PrimeContext::make(p), ExtensionDescriptor::make(k));
}

// Column-reduction oracle for small cases: distance by brute BFS.
long bfs_distance(const TreeVertex& a, const TreeVertex& b, int radius) {
    if (a.same(b)) return 0;
    std::vector<TreeVertex> frontier{a};
    std::set<std::string> seen{a.key()};
    for (int d = 1; d <= radius; ++d) {
        std::vector<TreeVertex> next;
        for (const auto& v : frontier)
            for (const auto& n : neighbors(v)) {
                if (!seen.insert(n.key()).second) continue;
                if (n.same(b)) return d;
                next.push_back(n);
            }
        frontier = std::move(next);
    }
    return -1;
}
}  // namespace

TEST_CASE("canonical vertices") {
    auto t = tw();
    Mat2 id = Mat2::identity(t, Level::QP);
    auto v0 = canonical_vertex(id);
    CHECK(v0.k == 0);
    CHECK(v0.u.is_exact_zero());

    auto w = ExtScalar::omega(t, Level::QP);
    auto v1 = canonical_vertex(Mat2::diag(w, ExtScalar::one(t, Level::QP)));
    CHECK(v1.k == 1);

    // Unimodular matrices fix the base vertex.
    Mat2 uni(ExtScalar::one(t, Level::QP), ExtScalar::zero(t, Level::QP),
             ExtScalar::one(t, Level::QP), ExtScalar::one(t, Level::QP));
    CHECK(canonical_vertex(uni).same(v0));

    CHECK_THROWS_AS(canonical_vertex(Mat2::zero(t, Level::QP)), SingularMatrix);
}

TEST_CASE("distances") {
    auto t = tw();
    auto v0 = base_vertex(t, Level::QP);
    auto w = ExtScalar::omega(t, Level::QP);
    auto one = ExtScalar::one(t, Level::QP);
    auto v1 = canonical_vertex(Mat2::diag(w, one));
    auto v2 = canonical_vertex(Mat2::diag(w * w, one));
    CHECK(tree_distance(v0, v0) == 0);
    CHECK(tree_distance(v0, v1) == 1);
    CHECK(tree_distance(v0, v2) == 2);
    CHECK(tree_distance(v1, v2) == 1);
}

TEST_CASE("distance agrees with BFS oracle on random vertices") {
    for (auto kind : {ExtensionKind::Unramified, ExtensionKind::RamifiedP}) {
        auto t = tw(kind, 3);
        Rng rng(13);
        auto v0 = base_vertex(t, Level::E);
        for (int i = 0; i < 12; ++i) {
            Mat2 g = random_gl2(t, Level::E, rng);
            auto v = act_vertex(g, v0);
            long d = tree_distance(v0, v);
            if (d <= 4) CHECK(bfs_distance(v0, v, 4) == d);
        }
    }
}

TEST_CASE("vertex action is isometric") {
    auto t = tw(ExtensionKind::RamifiedP);
    Rng rng(17);
    for (int i = 0; i < 500; ++i) {
        Mat2 g = random_sl2(t, Level::E, rng);
        Mat2 h = random_gl2(t, Level::E, rng);
        auto v = act_vertex(h, base_vertex(t, Level::E));
        auto w = act_vertex(h * h, base_vertex(t, Level::E));
        CHECK(tree_distance(act_vertex(g, v), act_vertex(g, w)) == tree_distance(v, w));
    }
}

TEST_CASE("end actions") {
    auto t = tw();
    auto zero = ExtScalar::zero(t, Level::E);
    auto one = ExtScalar::one(t, Level::E);
    auto alpha = ExtScalar::alpha(t);

    // [[1,0],[alpha,1]] [1:0] = [1:alpha]
    Mat2 g(one, zero, alpha, one);
    End e = act_end(g, End::finite(zero));
    CHECK_FALSE(e.inf);
    CHECK(e.x.indistinguishable(alpha));

    // diag(w, w^-1) [1:x] = [1 : w^-2 x]
    auto w = ExtScalar::omega(t, Level::E);
    Mat2 d = Mat2::diag(w, w.inv());
    End e2 = act_end(d, End::finite(alpha));
    CHECK(e2.x.indistinguishable(alpha * w.pow(-2)));

    // [[0,1],[1,0]] INF = [1:0]
    Mat2 s = Mat2::weyl_times(one);
    End e3 = act_end(s, End::infinity(t, Level::E));
    CHECK_FALSE(e3.inf);
    CHECK(e3.x.is_zero_like());

    // A denominator that vanishes only within noise raises loudly.
    {
        Rng nrng(43);
        auto x = nrng.unit(t->prime());
        auto noisy = ExtScalar::from_padic(t, Level::E, x.inv().inv());   // inexact copy
        Mat2 bad(-noisy, one, one, one + noisy);
        CHECK_THROWS_AS(act_end(bad, End::finite(ExtScalar::from_padic(t, Level::E, x))),
                        PrecisionExhausted);
    }

    // Ends move bijectively on a sample set.
    Rng rng(19);
    Mat2 r = random_gl2(t, Level::E, rng);
    std::set<std::string> keys;
    int n = 0;
    for (int i = 0; i < 30; ++i) {
        End src = End::finite(ExtScalar::integer(t, Level::E, i));
        try {
            keys.insert(act_end(r, src).canonical_key());
            ++n;
        } catch (const PrecisionExhausted&) {}
    }
    CHECK(static_cast<int>(keys.size()) == n);
}

TEST_CASE("hyperbolic data") {
    auto t = tw();
    auto w = ExtScalar::omega(t, Level::E);
    auto one = ExtScalar::one(t, Level::E);
    auto zero = ExtScalar::zero(t, Level::E);

    Mat2 d = Mat2::diag(w, w.inv());
    auto h = hyperbolic_data(d);
    REQUIRE(h.has_value());
    CHECK(h->length == 2);
    CHECK(h->attracting.inf);
    CHECK_FALSE(h->repelling.inf);
    CHECK(h->repelling.x.is_zero_like());

    CHECK_FALSE(hyperbolic_data(Mat2(one, one, zero, one)).has_value());
    CHECK_FALSE(hyperbolic_data(Mat2::weyl_times(-one)).has_value());

    // d(v, g v) >= length with equality on the axis.
    Rng rng(23);
    Mat2 r = random_sl2(t, Level::E, rng);
    Mat2 g = r * d * d * r.inverse();   // length 4 hyperbolic
    auto hd = hyperbolic_data(g);
    REQUIRE(hd.has_value());
    CHECK(hd->length == 4);
    auto ax = axis_vertex(g);
    CHECK(tree_distance(ax, act_vertex(g, ax)) == hd->length);
    for (int i = 0; i < 25; ++i) {
        auto v = act_vertex(random_gl2(t, Level::E, rng), base_vertex(t, Level::E));
        CHECK(tree_distance(v, act_vertex(g, v)) >= hd->length);
    }
}

TEST_CASE("diagonal orbit labels") {
    auto t = tw();
    auto mk = [&](long n) { return End::finite(ExtScalar::integer(t, Level::QP, n)); };
    CHECK(end_orbit_label_diag(End::infinity(t, Level::QP)).variant == OrbitLabel::EndInf);
    CHECK(end_orbit_label_diag(mk(0)).variant == OrbitLabel::EndZero);
    CHECK(end_orbit_label_diag(mk(4)).cls.label() == SquareClass::One);
    CHECK(end_orbit_label_diag(mk(10)).cls.label() == SquareClass::SOmega);

    // Invariance under 1000 random diagonal elements.
    Rng rng(29);
    for (int i = 0; i < 1000; ++i) {
        auto d = rng.ext(t, Level::QP, -3, 3);
        Mat2 g = Mat2::diag(d.inv(), d);
        End e = End::finite(rng.ext(t, Level::QP, -3, 3));
        CHECK(end_orbit_label_diag(act_end(g, e)) == end_orbit_label_diag(e));
    }
}

TEST_CASE("diagonal transitivity witness") {
    auto t = tw();
    auto e1 = End::finite(ExtScalar::integer(t, Level::QP, 1));
    auto e2 = End::finite(ExtScalar::integer(t, Level::QP, 4));
    Mat2 g = transitivity_witness_diag(e1, e2);
    CHECK(act_end(g, e1).same(e2));
    CHECK(act_end(g, e1).x.indistinguishable(e2.x));

    Mat2 gid = transitivity_witness_diag(e1, e1);
    CHECK(act_end(gid, e1).same(e1));

    auto e3 = End::finite(ExtScalar::integer(t, Level::QP, 2));
    CHECK_THROWS(transitivity_witness_diag(e1, e3));
}

TEST_CASE("rational-subgroup orbit labels on the E-boundary") {
    auto t = tw();
    auto prime = t->prime();
    auto mkE = [&](long a, long b) {
        return End::finite(ExtScalar::make_e(t, PadicScalar::integer(prime, a),
                                             PadicScalar::integer(prime, b)));
    };
    CHECK(end_orbit_label_slF(mkE(3, 0)).variant == OrbitLabel::Rational);
    CHECK(end_orbit_label_slF(mkE(0, 1)).cls.label() == SquareClass::One);
    CHECK(end_orbit_label_slF(mkE(3, 4)).cls.label() == SquareClass::One);
    CHECK(end_orbit_label_slF(mkE(3, 2)).cls.label() == SquareClass::S);

    // Invariance under the Borel reduction subgroup of the rational group.
    Rng rng(31);
    auto one = PadicScalar::one(prime);
    for (int i = 0; i < 1000; ++i) {
        auto d = rng.scalar(prime, -2, 2);
        auto c = rng.flip() ? rng.scalar(prime, 0, 2) : PadicScalar::zero(prime);
        Mat2 g(ExtScalar::from_padic(t, Level::E, d.inv()), ExtScalar::zero(t, Level::E),
               ExtScalar::from_padic(t, Level::E, c), ExtScalar::from_padic(t, Level::E, d));
        End e = rng.flip() ? mkE(rng.range(-20, 20), rng.range(1, 20))
                           : End::finite(rng.ext(t, Level::E, -2, 2));
        OrbitLabel before = end_orbit_label_slF(e);
        OrbitLabel after = end_orbit_label_slF(act_end(g, e));
        CHECK(after == before);
    }
    (void)one;
}

TEST_CASE("subtree membership and projection") {
    auto tu = tw(ExtensionKind::Unramified);
    CHECK(subtree_membership_TF(base_vertex(tu, Level::E)));

    // The depth-1 vertex in the alpha direction: not a member; projects to
    // the base vertex at distance 1.
    TreeVertex v;
    v.k = 1;
    v.u = ExtScalar::alpha(tu).reduce_mod_omega(1);
    CHECK_FALSE(subtree_membership_TF(v));
    auto pr = project_to_subtree(v, 12);
    CHECK(subtree_point_TF(pr));
    CHECK(pr.same(base_vertex(tu, Level::E)));
    CHECK(tree_distance(v, pr) == 1);

    TreeVertex v2;
    v2.k = 2;
    v2.u = ExtScalar::alpha(tu);
    CHECK_FALSE(subtree_membership_TF(v2));
    CHECK(tree_distance(v2, project_to_subtree(v2, 12)) == 2);

    // Ramified midpoint vertices: on the closed subtree, not lattice members.
    auto tr = tw(ExtensionKind::RamifiedP);
    auto w = ExtScalar::omega(tr, Level::E);
    auto one = ExtScalar::one(tr, Level::E);
    auto mid = canonical_vertex(Mat2::diag(w, one));
    CHECK(mid.k == 1);
    CHECK_FALSE(subtree_membership_TF(mid));
    CHECK(subtree_point_TF(mid));
    auto gen = canonical_vertex(Mat2::diag(w * w, one));
    CHECK(subtree_membership_TF(gen));

    CHECK_THROWS_AS(project_to_subtree([&] {
        TreeVertex far;
        far.k = 6;
        far.u = ExtScalar::alpha(tu).reduce_mod_omega(6);
        return far;
    }(), 1), ProjectionRadiusExceeded);
}

TEST_CASE("orbit experiment with trivial and diagonal generators") {
    auto t = tw();
    std::vector<End> seeds;
    for (long i = 1; i <= 10; ++i) seeds.push_back(End::finite(ExtScalar::integer(t, Level::QP, i)));

    // Identity generators keep all ten classes.
    auto res0 = orbit_experiment({Mat2::identity(t, Level::QP)}, seeds, 3, 64);
    CHECK(res0.class_count == 10);

    // Diagonal samples collapse classes down to the six labels.
    std::vector<Mat2> gens;
    for (long d : {2, 3, 5, 10, 15}) {
        auto de = ExtScalar::integer(t, Level::QP, d);
        gens.push_back(Mat2::diag(de.inv(), de));
    }
    std::vector<End> seeds6{End::infinity(t, Level::QP),
                            End::finite(ExtScalar::zero(t, Level::QP))};
    for (long m : {1, 4, 16, 2, 8, 32, 5, 20, 80, 10, 40, 160})
        seeds6.push_back(End::finite(ExtScalar::integer(t, Level::QP, m)));
    auto res = orbit_experiment(gens, seeds6, 10, 400);
    CHECK(res.class_count == 6);
    for (size_t i = 1; i < res.class_count_per_round.size(); ++i)
        CHECK(res.class_count_per_round[i] <= res.class_count_per_round[i - 1]);
}

TEST_CASE("dot emission marks the embedded subtree") {
    auto t = tw(ExtensionKind::RamifiedP, 3);
    std::string dot = tree_ball_dot(base_vertex(t, Level::E), 2);
    CHECK(dot.find("graph tree_ball") != std::string::npos);
    CHECK(dot.find("color=red") != std::string::npos);
    CHECK(dot.find("color=blue") != std::string::npos);
}

TEST_CASE("canonicalization is idempotent and distance is a metric") {
    for (auto kind : {ExtensionKind::Unramified, ExtensionKind::RamifiedP}) {
        auto t = tw(kind);
        Rng rng(59);
        std::vector<TreeVertex> pool;
        pool.push_back(base_vertex(t, Level::E));
        for (int i = 0; i < 20; ++i)
            pool.push_back(act_vertex(random_gl2(t, Level::E, rng), base_vertex(t, Level::E)));
        for (const auto& v : pool) {
            CHECK(canonical_vertex(v.basis_matrix()).same(v));
            CHECK(tree_distance(v, v) == 0);
        }
        for (int i = 0; i < 60; ++i) {
            const auto& a = pool[static_cast<size_t>(rng.range(0, 20))];
            const auto& b = pool[static_cast<size_t>(rng.range(0, 20))];
            const auto& c = pool[static_cast<size_t>(rng.range(0, 20))];
            long ab = tree_distance(a, b);
            CHECK(ab == tree_distance(b, a));
            CHECK((ab == 0) == a.same(b));
            CHECK(tree_distance(a, c) <= ab + tree_distance(b, c));
        }
    }
}
