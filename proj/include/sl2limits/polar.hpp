#pragma once

#include "sl2limits/mat2.hpp"
#include "sl2limits/tree.hpp"

namespace sl2limits {

enum class PolarPair {
    RationalInsideExtension,    // G = SL(2,E), H = SL(2,F)
    FixedGroupA1InsideRational  // G = SL(2,F), H the a = 1 fixed group
};

/**
 * g = k * a^n * h with h in the symmetric subgroup, a a translation-length-2
 * hyperbolic element toward a standard boundary representative, and k of
 * bounded displacement at the base vertex.  Verified entrywise on return.
 */
struct PolarDecomposition {
    Mat2 k;
    Mat2 a;              // hyperbolic generator (identity when n = 0)
    long n = 0;
    Mat2 h;
    int orbit_index = -1;    // class of the escape direction; -1 on the subtree
    long displacement = 0;   // d(x0, k x0)
    long recon_defect_q = 0; // entrywise defect of k a^n h against g
};

/// Displacement bound certified by the decomposition (diam of the
/// fundamental region, plus one for parity landings).
long polar_displacement_bound(PolarPair pair);

PolarDecomposition polar_decompose(const Mat2& g, PolarPair pair);

}  // namespace sl2limits
