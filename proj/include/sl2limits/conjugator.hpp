#pragma once

#include <optional>

#include "sl2limits/involution.hpp"

namespace sl2limits {

enum class CaseTag { C1, C2, C4, C5_1, C5_2, C5_3, C5_4a, C5_4b, C5_4c, Diag };

const char* case_name(CaseTag tag);

/**
 * Witness that theta = iota_A . sigma is GL-conjugate to sigma via iota_{B^-1}
 * (target Sigma: A sigma(B) = c B), or that iota_A is conjugate to
 * iota_diag(1,-1) (target Diag: B^-1 A B proportional to diag(1,-1)).
 * Residuals are measured at construction and must clear N - 4 digits.
 */
struct ConjugatorCertificate {
    enum class Target { Sigma, Diag };

    Mat2 B;
    Mat2 A;              // the involution matrix, lifted to B's tower/level
    ExtScalar c;         // the scalar in A sigma(B) = c B (target Sigma)
    CaseTag tag = CaseTag::C1;
    Target target = Target::Sigma;
    Level level = Level::E;          // level of B: E means H_theta ~ SL(2,Q_p)
    long residual_q = 0;

    const TowerContextPtr& tower() const { return B.tower(); }
};

struct ConjugatorOptions {
    std::optional<PadicScalar> c2;       // free parameter of Case 4 (default 0)
    std::optional<CaseTag> force_case;   // build a specific case, if admissible
};

/// Case analysis for gamma = sigma involutions: picks the first applicable
/// case in order C1, C2, C4, C5.1..C5.4 and returns a verified certificate.
ConjugatorCertificate conjugator_to_sigma(const Involution& theta,
                                          const ConjugatorOptions& opts = {});

/// C = [[1, -1/sqrt(a)],[sqrt(a), 1]] with C^-1 A C proportional to
/// diag(1, -1), over F(sqrt(a)) when needed.
ConjugatorCertificate conjugator_to_diagonal(const PrimeContextPtr& prime,
                                             const PadicScalar& a);

/// Membership of g in H_theta = B SL(2, K^sigma) B^-1 (intersected with the
/// base group): true iff B^-1 g B is sigma-fixed entrywise at precision.
bool h_theta_sigma_membership(const ConjugatorCertificate& cert, const Mat2& g);

}  // namespace sl2limits
