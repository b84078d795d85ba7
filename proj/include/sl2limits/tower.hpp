#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sl2limits/padic.hpp"

namespace sl2limits {

enum class ExtensionKind { Unramified, RamifiedP, RamifiedPS };

/// Which quadratic extension E = Q_p(alpha) we work in: alpha^2 = s with
/// s in {S, p, p*S} and ramification index e accordingly.
struct ExtensionDescriptor {
    ExtensionKind kind;
    long e;              // ramification index: 1 (unramified) or 2
    static ExtensionDescriptor make(ExtensionKind k) {
        return {k, k == ExtensionKind::Unramified ? 1L : 2L};
    }
    const char* name() const {
        switch (kind) {
            case ExtensionKind::Unramified: return "unram";
            case ExtensionKind::RamifiedP: return "ram-p";
            default: return "ram-ps";
        }
    }
};

enum class Level { QP, E, K };

/**
 * Shared immutable data of the tower Q_p < E = Q_p(alpha) < K = E(beta),
 * with alpha^2 = s and beta^2 = t both in Q_p (biquadratic tower).
 * beta is sigma-fixed: K^sigma = Q_p(beta).
 */
class TowerContext {
public:
    static std::shared_ptr<const TowerContext> make(PrimeContextPtr prime,
                                                    ExtensionDescriptor ext);
    /// Extend with beta, beta^2 = t (t in a different square class than s).
    std::shared_ptr<const TowerContext> with_beta(const PadicScalar& t) const;

    const PrimeContextPtr& prime() const { return prime_; }
    const ExtensionDescriptor& ext() const { return ext_; }
    bool has_beta() const { return has_beta_; }
    const PadicScalar& alpha_square() const { return s_; }
    const PadicScalar& beta_square() const;

    /// Ramification index of a level inside this tower.
    long ram_index(Level level) const;

private:
    PrimeContextPtr prime_;
    ExtensionDescriptor ext_;
    PadicScalar s_;             // alpha^2
    bool has_beta_ = false;
    PadicScalar t_;             // beta^2 (valid when has_beta_)
};

using TowerContextPtr = std::shared_ptr<const TowerContext>;

/// Valuation normalized so v(p) = 1, stored in quarter units (exact for
/// every tower level: denominators divide 4).
struct QuarterVal {
    long q;
    bool is_bound;    // true: only v >= q/4 is known (zero-like input)
    double as_double() const { return static_cast<double>(q) / 4.0; }
};

/**
 * Element of Q_p, E, or K as coordinates over the basis {1, alpha, beta,
 * alpha*beta}; the level tag says which coordinates are in play.
 * Values are immutable; all operations return fresh scalars.
 */
class ExtScalar {
public:
    ExtScalar() = default;

    static ExtScalar zero(TowerContextPtr t, Level level);
    static ExtScalar one(TowerContextPtr t, Level level);
    static ExtScalar integer(TowerContextPtr t, Level level, long n);
    static ExtScalar from_padic(TowerContextPtr t, Level level, const PadicScalar& a);
    /// a + alpha*b at level E (or K with zero beta part).
    static ExtScalar make_e(TowerContextPtr t, const PadicScalar& a, const PadicScalar& b,
                            Level level = Level::E);
    static ExtScalar make_k(TowerContextPtr t, const PadicScalar& c0, const PadicScalar& c1,
                            const PadicScalar& c2, const PadicScalar& c3);
    static ExtScalar alpha(TowerContextPtr t, Level level = Level::E);
    static ExtScalar beta(TowerContextPtr t);
    /// Uniformizer of the given level (p, or alpha when E/Q_p is ramified).
    static ExtScalar omega(TowerContextPtr t, Level level);

    const TowerContextPtr& tower() const { return tower_; }
    Level level() const { return level_; }
    const PadicScalar& comp(int i) const { return c_[static_cast<size_t>(i)]; }
    const PrimeContextPtr& prime() const { return tower_->prime(); }

    /// Re-tag at a higher level of the same tower (coordinates unchanged).
    ExtScalar lift_to(Level level) const;

    bool is_zero_like() const;
    bool is_exact_zero() const;

    ExtScalar operator-() const;
    ExtScalar operator+(const ExtScalar& o) const;
    ExtScalar operator-(const ExtScalar& o) const;
    ExtScalar operator*(const ExtScalar& o) const;
    ExtScalar inv() const;
    ExtScalar operator/(const ExtScalar& o) const { return *this * o.inv(); }
    /// Integer power; negative exponents invert first.
    ExtScalar pow(long k) const;
    ExtScalar inv_pow(long k) const { return pow(-k); }

    bool indistinguishable(const ExtScalar& o) const;

    /// Field conjugation sigma: alpha -> -alpha (fixes beta). Levels E, K.
    ExtScalar sigma() const;
    /// Conjugation over the level below: negates the top generator.
    ExtScalar conj_down() const;
    /// Relative norm x * conj_down(x), returned one level down.
    ExtScalar norm_down() const;

    /// Valuation normalized so v(p) = 1 (quarter units); bound when zero-like.
    QuarterVal vq() const;
    /// Integer valuation normalized so v(omega_level) = 1.
    long local_val() const;
    bool local_val_known() const { return !vq().is_bound; }

    /// x mod omega_level^k as an exact scalar (canonical digit window).
    ExtScalar reduce_mod_omega(long k) const;

    /// Forget digits above quarter-valuation q (componentwise).
    ExtScalar truncate_abs_q(long q) const;

    /// Square class at levels QP and E (4 classes at each level).
    SquareClass square_class_level() const;

    /// Canonical square root at levels QP and E; throws NonSquare.
    ExtScalar sqrt() const;

    std::string str() const;
    /// Canonical digit string for hashing exact reduced values.
    std::string key() const;

private:
    TowerContextPtr tower_;
    Level level_ = Level::QP;
    std::array<PadicScalar, 4> c_;

    int ncomp() const { return level_ == Level::QP ? 1 : (level_ == Level::E ? 2 : 4); }
    static void require_compatible(const ExtScalar& a, const ExtScalar& b);
    void check_level_at_least(Level min, const char* op) const;
};

/// Newton root-finding over any tower level.  Coefficients lowest-degree
/// first, integral at the level; start must satisfy |f(a)| < |f'(a)|^2.
ExtScalar hensel_root(const std::vector<ExtScalar>& coeffs, const ExtScalar& start);

/// Square class of a nonzero residue-field element of E (exhaustive table).
bool is_residue_in_kE(const TowerContext& t, long r0, long r1);

}  // namespace sl2limits
