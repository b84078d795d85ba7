#include "sl2limits/tree.hpp"

#include <deque>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace sl2limits {

namespace {
constexpr long kInfVal = std::numeric_limits<long>::max() / 4;

long to_local(const TowerContextPtr& t, Level level, long quarters) {
    long e = t->ram_index(level);
    long num = quarters * e;
    if (num % 4 != 0) throw InternalInvariantViolation("non-integral local valuation");
    return num / 4;
}
}  // namespace

Mat2 TreeVertex::basis_matrix() const {
    auto t = tower();
    Level lvl = level();
    ExtScalar w = ExtScalar::omega(t, lvl);
    return Mat2(w.pow(k), u, ExtScalar::zero(t, lvl), ExtScalar::one(t, lvl));
}

std::string TreeVertex::key() const {
    return std::to_string(k) + ":" + u.key();
}

std::string TreeVertex::str() const {
    return "(" + std::to_string(k) + ", " + u.str() + ")";
}

End End::infinity(const TowerContextPtr& t, Level level) {
    End e;
    e.inf = true;
    e.x = ExtScalar::zero(t, level);
    return e;
}

End End::finite(ExtScalar coord) {
    End e;
    e.inf = false;
    e.x = std::move(coord);
    return e;
}

bool End::same(const End& o) const {
    if (inf != o.inf) return false;
    return inf || x.indistinguishable(o.x);
}

std::string End::canonical_key(int digits) const {
    if (inf) return "inf";
    if (digits < 0) digits = x.prime()->precision() - 12;
    if (x.is_zero_like()) return "zero";
    long q = x.vq().q;
    return x.truncate_abs_q(q + 4 * digits).key();
}

std::string End::str() const { return inf ? "[0:1]" : "[1:" + x.str() + "]"; }

std::string OrbitLabel::name() const {
    switch (variant) {
        case Rational: return "rational";
        case EndZero: return "zero";
        case EndInf: return "inf";
        case Class: return std::string("class-") + cls.name();
    }
    return "?";
}

TreeVertex base_vertex(const TowerContextPtr& t, Level level) {
    TreeVertex v;
    v.k = 0;
    v.u = ExtScalar::zero(t, level);
    return v;
}

TreeVertex canonical_vertex(const Mat2& m) {
    ExtScalar d = m.det();
    if (d.is_zero_like()) throw SingularMatrix("canonical_vertex: singular matrix");
    auto t = m.tower();
    Level lvl = m.level();

    ExtScalar c0t = m.e11(), c0b = m.e21();   // column 0
    ExtScalar c1t = m.e12(), c1b = m.e22();   // column 1

    // Bring the bottom entry of minimal valuation into column 1.
    long v0 = c0b.is_zero_like() ? kInfVal : c0b.vq().q;
    long v1 = c1b.is_zero_like() ? kInfVal : c1b.vq().q;
    if (v0 < v1) {
        std::swap(c0t, c1t);
        std::swap(c0b, c1b);
    }
    if (c1b.is_zero_like()) {
        // Bottom row is zero: the lattice is spanned by (e11,0),(e12,0)?  Not
        // invertible unless the top row makes up for it, which it cannot.
        throw SingularMatrix("canonical_vertex: zero bottom row at precision");
    }

    // Clear the bottom of column 0, then normalize the homothety.
    ExtScalar q = c0b / c1b;
    ExtScalar x = c0t - q * c1t;              // new top of column 0; bottom is 0
    ExtScalar urep = c1t / c1b;
    ExtScalar xs = x / c1b;
    if (xs.is_zero_like()) throw SingularMatrix("canonical_vertex: rank collapse at precision");

    TreeVertex v;
    v.k = to_local(t, lvl, xs.vq().q);
    v.u = urep.reduce_mod_omega(v.k);
    return v;
}

long tree_distance(const TreeVertex& a, const TreeVertex& b) {
    if (a.level() != b.level()) throw LevelMismatch("distance across levels");
    Mat2 x = a.basis_matrix().inverse() * b.basis_matrix();
    long dq = x.det().vq().q;
    long mq = x.min_entry_q();
    long d = to_local(a.tower(), a.level(), dq) - 2 * to_local(a.tower(), a.level(), mq);
    return d < 0 ? -d : d;
}

TreeVertex act_vertex(const Mat2& g, const TreeVertex& v) {
    return canonical_vertex(g * v.basis_matrix());
}

End act_end(const Mat2& g, const End& e) {
    auto t = g.tower();
    Level lvl = g.level();
    ExtScalar top, bot;
    if (e.inf) {
        top = g.e12();
        bot = g.e22();
    } else {
        top = g.e11() + g.e12() * e.x;
        bot = g.e21() + g.e22() * e.x;
    }
    if (top.is_exact_zero()) return End::infinity(t, lvl);
    if (top.is_zero_like())
        throw PrecisionExhausted("act_end: renormalization divides by a near-zero scalar");
    return End::finite(bot / top);
}

std::vector<TreeVertex> neighbors(const TreeVertex& v) {
    auto t = v.tower();
    Level lvl = v.level();
    Mat2 m = v.basis_matrix();
    ExtScalar w = ExtScalar::omega(t, lvl);
    std::vector<TreeVertex> out;

    auto prime = t->prime();
    std::vector<ExtScalar> reps;
    const long p = prime->p();
    if (lvl == Level::QP || t->ext().e == 2) {
        for (long r = 0; r < p; ++r) reps.push_back(ExtScalar::integer(t, lvl, r));
    } else {
        for (long r0 = 0; r0 < p; ++r0)
            for (long r1 = 0; r1 < p; ++r1)
                reps.push_back(ExtScalar::make_e(t, PadicScalar::integer(prime, r0),
                                                 PadicScalar::integer(prime, r1), lvl));
    }
    for (const auto& r : reps) {
        Mat2 step(w, r, ExtScalar::zero(t, lvl), ExtScalar::one(t, lvl));
        out.push_back(canonical_vertex(m * step));
    }
    Mat2 up(ExtScalar::one(t, lvl), ExtScalar::zero(t, lvl), ExtScalar::zero(t, lvl), w);
    out.push_back(canonical_vertex(m * up));
    return out;
}

std::optional<HyperbolicData> hyperbolic_data(const Mat2& g) {
    ExtScalar tr = g.trace();
    if (tr.is_zero_like()) return std::nullopt;
    QuarterVal v = tr.vq();
    if (v.q >= 0) return std::nullopt;

    auto t = g.tower();
    Level lvl = g.level();
    HyperbolicData h;
    h.length = -2 * to_local(t, lvl, v.q);

    ExtScalar four = ExtScalar::integer(t, lvl, 4);
    ExtScalar disc = tr * tr - four;
    ExtScalar root;
    try {
        root = disc.sqrt();
    } catch (const NonSquare&) {
        throw EigenvalueExtensionRequired("trace discriminant is not a square at this level");
    }
    ExtScalar two_inv = ExtScalar::integer(t, lvl, 2).inv();
    ExtScalar lp = (tr + root) * two_inv;
    ExtScalar lm = (tr - root) * two_inv;
    if (lp.vq().q > lm.vq().q) std::swap(lp, lm);   // lp: negative valuation

    auto eigen_end = [&](const ExtScalar& lambda) -> End {
        if (!g.e12().is_zero_like())
            return End::finite((lambda - g.e11()) / g.e12());
        // Upper-left triangular: eigen-ends are INF (for e22) and a finite one.
        if ((lambda - g.e22()).is_zero_like()) return End::infinity(t, lvl);
        return End::finite(g.e21() / (g.e11() - g.e22()));
    };
    h.attracting = eigen_end(lp);
    h.repelling = eigen_end(lm);
    return h;
}

TreeVertex axis_vertex(const Mat2& g) {
    auto h = hyperbolic_data(g);
    if (!h) throw Error("axis_vertex: element is not hyperbolic");
    auto t = g.tower();
    Level lvl = g.level();
    auto column = [&](const End& e) -> std::pair<ExtScalar, ExtScalar> {
        if (e.inf) return {ExtScalar::zero(t, lvl), ExtScalar::one(t, lvl)};
        // Scale (1, x) integral-primitive.
        ExtScalar one = ExtScalar::one(t, lvl);
        long vx = e.x.is_zero_like() ? 0 : std::min(0L, to_local(t, lvl, e.x.vq().q));
        ExtScalar w = ExtScalar::omega(t, lvl).pow(-vx);
        return {one * w, e.x * w};
    };
    auto [a, c] = column(h->attracting);
    auto [b, d] = column(h->repelling);
    return canonical_vertex(Mat2(a, b, c, d));
}

OrbitLabel end_orbit_label_diag(const End& e) {
    OrbitLabel l;
    if (e.inf) {
        l.variant = OrbitLabel::EndInf;
        return l;
    }
    if (e.x.is_zero_like()) {
        l.variant = OrbitLabel::EndZero;
        return l;
    }
    l.variant = OrbitLabel::Class;
    l.cls = e.x.square_class_level();
    return l;
}

Mat2 transitivity_witness_diag(const End& e1, const End& e2) {
    OrbitLabel l1 = end_orbit_label_diag(e1);
    OrbitLabel l2 = end_orbit_label_diag(e2);
    if (l1.variant != OrbitLabel::Class || l1 != l2)
        throw Error("transitivity_witness_diag: ends are not in one diagonal class");
    ExtScalar ratio = e2.x / e1.x;
    ExtScalar d;
    try {
        d = ratio.sqrt();
    } catch (const NonSquare&) {
        throw InternalInvariantViolation(
            "equal diagonal labels with a non-square coordinate ratio");
    }
    return Mat2::diag(d.inv(), d);
}

OrbitLabel end_orbit_label_slF(const End& e) {
    OrbitLabel l;
    if (e.inf || e.x.is_zero_like() || e.x.level() == Level::QP) {
        l.variant = OrbitLabel::Rational;
        return l;
    }
    const PadicScalar& w2 = e.x.comp(1);
    if (w2.is_zero_like()) {
        l.variant = OrbitLabel::Rational;
        return l;
    }
    l.variant = OrbitLabel::Class;
    l.cls = w2.square_class();
    return l;
}

bool subtree_membership_TF(const TreeVertex& v) {
    if (v.level() != Level::E) throw LevelMismatch("membership is about T_F inside T_E");
    long e = v.tower()->ext().e;
    if (((v.k % e) + e) % e != 0) return false;
    return v.u.comp(1).is_zero_like();
}

bool subtree_point_TF(const TreeVertex& v) {
    if (v.level() != Level::E) throw LevelMismatch("membership is about T_F inside T_E");
    return v.u.comp(1).is_zero_like();
}

TreeVertex project_to_subtree(const TreeVertex& v, int radius) {
    if (subtree_point_TF(v)) return v;
    std::set<std::string> seen{v.key()};
    std::deque<std::pair<TreeVertex, int>> queue{{v, 0}};
    while (!queue.empty()) {
        auto [cur, d] = queue.front();
        queue.pop_front();
        if (d >= radius) continue;
        for (const auto& n : neighbors(cur)) {
            if (!seen.insert(n.key()).second) continue;
            if (subtree_point_TF(n)) return n;
            queue.emplace_back(n, d + 1);
        }
    }
    throw ProjectionRadiusExceeded("no subtree point within radius " +
                                   std::to_string(radius));
}

std::string tree_ball_dot(const TreeVertex& center, int radius) {
    std::ostringstream os;
    os << "graph tree_ball {\n  node [shape=point];\n";
    std::map<std::string, int> ids;
    std::set<std::string> edges;
    std::deque<std::pair<TreeVertex, int>> queue{{center, 0}};
    ids[center.key()] = 0;
    bool with_subtree = center.level() == Level::E;
    auto emit_node = [&](const TreeVertex& v, int id) {
        bool red = with_subtree && subtree_point_TF(v);
        os << "  n" << id << " [color=" << (red ? "red" : "blue") << ", label=\"" << v.k
           << "\"];\n";
    };
    emit_node(center, 0);
    while (!queue.empty()) {
        auto [cur, d] = queue.front();
        queue.pop_front();
        if (d >= radius) continue;
        int cid = ids[cur.key()];
        for (const auto& n : neighbors(cur)) {
            auto it = ids.find(n.key());
            int nid;
            if (it == ids.end()) {
                nid = static_cast<int>(ids.size());
                ids[n.key()] = nid;
                emit_node(n, nid);
                queue.emplace_back(n, d + 1);
            } else {
                nid = it->second;
            }
            std::string ek = cid < nid ? std::to_string(cid) + "-" + std::to_string(nid)
                                       : std::to_string(nid) + "-" + std::to_string(cid);
            if (edges.insert(ek).second) {
                bool red = with_subtree && subtree_point_TF(cur) && subtree_point_TF(n);
                os << "  n" << cid << " -- n" << nid << " [color=" << (red ? "red" : "blue")
                   << "];\n";
            }
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace sl2limits
