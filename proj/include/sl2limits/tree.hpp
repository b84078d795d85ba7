#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sl2limits/mat2.hpp"

namespace sl2limits {

/**
 * Vertex of the Bruhat--Tits tree at a tower level, in lattice normal form:
 * the class of the lattice with basis matrix [[w^k, u],[0,1]], u reduced
 * mod w^k.  Equality of classes is equality of (k, u)-representatives.
 */
struct TreeVertex {
    long k = 0;
    ExtScalar u;     // exact representative, reduced mod omega^k

    const TowerContextPtr& tower() const { return u.tower(); }
    Level level() const { return u.level(); }
    long type_parity() const { return ((k % 2) + 2) % 2; }

    Mat2 basis_matrix() const;
    std::string key() const;
    bool same(const TreeVertex& o) const { return k == o.k && key() == o.key(); }
    std::string str() const;
};

/// Boundary point of P^1: [1 : x] for finite x, or [0 : 1] (infinity).
struct End {
    bool inf = false;
    ExtScalar x;

    static End infinity(const TowerContextPtr& t, Level level);
    static End finite(ExtScalar coord);

    const TowerContextPtr& tower() const { return x.tower(); }
    Level level() const { return x.level(); }

    bool same(const End& o) const;
    /// Stable digit-window key for hashing ends across computation paths.
    std::string canonical_key(int digits = -1) const;
    std::string str() const;
};

/// Orbit marker for the boundary experiments.
struct OrbitLabel {
    enum Variant { Rational, Class, EndZero, EndInf } variant = Rational;
    SquareClass cls;

    bool operator==(const OrbitLabel& o) const {
        if (variant != o.variant) return false;
        return variant != Class || cls == o.cls;
    }
    bool operator!=(const OrbitLabel& o) const { return !(*this == o); }
    std::string name() const;
};

TreeVertex base_vertex(const TowerContextPtr& t, Level level);

/// Lattice-class normal form of an invertible matrix (column reduction
/// over the integer ring plus homothety normalization).
TreeVertex canonical_vertex(const Mat2& m);

/// Elementary-divisor distance between two vertices of one tree.
long tree_distance(const TreeVertex& a, const TreeVertex& b);

TreeVertex act_vertex(const Mat2& g, const TreeVertex& v);
End act_end(const Mat2& g, const End& e);

/// The |k_level| + 1 adjacent vertices.
std::vector<TreeVertex> neighbors(const TreeVertex& v);

struct HyperbolicData {
    long length = 0;
    End attracting;
    End repelling;
};

/// Empty when g is elliptic/parabolic (v(tr) >= 0).  For hyperbolic g the
/// attracting end carries the eigenvalue of negative valuation.
std::optional<HyperbolicData> hyperbolic_data(const Mat2& g);

/// A vertex on the translation axis of a hyperbolic element.
TreeVertex axis_vertex(const Mat2& g);

/// Diagonal-subgroup orbit marker of a boundary point (infinity, zero, or
/// the square class of the coordinate).
OrbitLabel end_orbit_label_diag(const End& e);

/// diag(1/d, d) carrying e1 to e2 when their diagonal labels agree.
Mat2 transitivity_witness_diag(const End& e1, const End& e2);

/// Rational-subgroup orbit marker on the boundary of T_E: the rational
/// boundary, or the square class of the alpha component after the Borel
/// reduction [1 : w1 + a w2] -> [1 : a w2'].
OrbitLabel end_orbit_label_slF(const End& e);

/// Vertex of T_E lies in the embedded T_F: F-rational u and k = 0 mod e.
bool subtree_membership_TF(const TreeVertex& v);

/// Closed embedded subtree: for ramified E this includes the midpoint
/// vertices of subdivided edges (odd k, F-rational u).
bool subtree_point_TF(const TreeVertex& v);

/// Nearest point of the closed embedded subtree within radius R (BFS).
TreeVertex project_to_subtree(const TreeVertex& v, int radius);

/// DOT rendering of the ball around a vertex; the embedded subtree is
/// colored red, new branches blue.
std::string tree_ball_dot(const TreeVertex& center, int radius);

}  // namespace sl2limits
