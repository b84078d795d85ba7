#include "sl2limits/tower.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace sl2limits {

namespace {
constexpr long kInfVal = std::numeric_limits<long>::max() / 4;
}

std::shared_ptr<const TowerContext> TowerContext::make(PrimeContextPtr prime,
                                                       ExtensionDescriptor ext) {
    auto t = std::make_shared<TowerContext>();
    t->prime_ = std::move(prime);
    t->ext_ = ext;
    const auto& ctx = t->prime_;
    switch (ext.kind) {
        case ExtensionKind::Unramified:
            t->s_ = PadicScalar::integer(ctx, ctx->nonsquare());
            break;
        case ExtensionKind::RamifiedP:
            t->s_ = PadicScalar::uniformizer(ctx);
            break;
        case ExtensionKind::RamifiedPS:
            t->s_ = PadicScalar::integer(ctx, ctx->nonsquare()).shift(1);
            break;
    }
    return t;
}

std::shared_ptr<const TowerContext> TowerContext::with_beta(const PadicScalar& t) const {
    if (t.is_zero_like()) throw Error("beta^2 must be a nonzero scalar");
    if (t.square_class().label() == SquareClass::One)
        throw Error("beta^2 is a square: tower would collapse to E");
    if (t.square_class() == s_.square_class())
        throw Error("beta^2 lies in the square class of alpha^2: tower would collapse");
    auto r = std::make_shared<TowerContext>(*this);
    r->has_beta_ = true;
    r->t_ = t;
    return r;
}

const PadicScalar& TowerContext::beta_square() const {
    if (!has_beta_) throw LevelMismatch("tower has no beta generator");
    return t_;
}

long TowerContext::ram_index(Level level) const {
    switch (level) {
        case Level::QP: return 1;
        case Level::E: return ext_.e;
        case Level::K: return 2;   // biquadratic K/Q_p always has e = f = 2
    }
    return 1;
}

// ---------------------------------------------------------------------------

ExtScalar ExtScalar::zero(TowerContextPtr t, Level level) {
    ExtScalar x;
    x.level_ = level;
    const auto& p = t->prime();
    for (auto& c : x.c_) c = PadicScalar::zero(p);
    x.tower_ = std::move(t);
    if (level == Level::K && !x.tower_->has_beta())
        throw LevelMismatch("level K requested on a tower without beta");
    return x;
}

ExtScalar ExtScalar::one(TowerContextPtr t, Level level) {
    ExtScalar x = zero(std::move(t), level);
    x.c_[0] = PadicScalar::one(x.tower_->prime());
    return x;
}

ExtScalar ExtScalar::integer(TowerContextPtr t, Level level, long n) {
    ExtScalar x = zero(std::move(t), level);
    x.c_[0] = PadicScalar::integer(x.tower_->prime(), n);
    return x;
}

ExtScalar ExtScalar::from_padic(TowerContextPtr t, Level level, const PadicScalar& a) {
    ExtScalar x = zero(std::move(t), level);
    x.c_[0] = a;
    return x;
}

ExtScalar ExtScalar::make_e(TowerContextPtr t, const PadicScalar& a, const PadicScalar& b,
                            Level level) {
    if (level == Level::QP) throw LevelMismatch("make_e needs level E or K");
    ExtScalar x = zero(std::move(t), level);
    x.c_[0] = a;
    x.c_[1] = b;
    return x;
}

ExtScalar ExtScalar::make_k(TowerContextPtr t, const PadicScalar& c0, const PadicScalar& c1,
                            const PadicScalar& c2, const PadicScalar& c3) {
    ExtScalar x = zero(std::move(t), Level::K);
    x.c_ = {c0, c1, c2, c3};
    return x;
}

ExtScalar ExtScalar::alpha(TowerContextPtr t, Level level) {
    ExtScalar x = zero(std::move(t), level);
    if (level == Level::QP) throw LevelMismatch("alpha lives at level E or above");
    x.c_[1] = PadicScalar::one(x.tower_->prime());
    return x;
}

ExtScalar ExtScalar::beta(TowerContextPtr t) {
    ExtScalar x = zero(std::move(t), Level::K);
    x.c_[2] = PadicScalar::one(x.tower_->prime());
    return x;
}

ExtScalar ExtScalar::omega(TowerContextPtr t, Level level) {
    switch (level) {
        case Level::QP:
            return from_padic(std::move(t), level, PadicScalar::uniformizer(t->prime()));
        case Level::E:
            if (t->ext().e == 1)
                return from_padic(std::move(t), level, PadicScalar::uniformizer(t->prime()));
            return alpha(std::move(t), Level::E);
        case Level::K: {
            // K always contains a ramified quadratic subfield; pick a
            // generator of valuation 1/2 among alpha, beta.
            if (t->alpha_square().square_class().vparity == 1) return alpha(t, Level::K);
            if (t->beta_square().square_class().vparity == 1) return beta(t);
            throw LevelMismatch("no ramified generator in tower for omega_K");
        }
    }
    throw LevelMismatch("omega: bad level");
}

ExtScalar ExtScalar::lift_to(Level level) const {
    if (static_cast<int>(level) < static_cast<int>(level_))
        throw LevelMismatch("lift_to cannot lower a level");
    ExtScalar x = *this;
    x.level_ = level;
    if (level == Level::K && !tower_->has_beta())
        throw LevelMismatch("lift to K on a tower without beta");
    return x;
}

bool ExtScalar::is_zero_like() const {
    for (int i = 0; i < ncomp(); ++i)
        if (!c_[static_cast<size_t>(i)].is_zero_like()) return false;
    return true;
}

bool ExtScalar::is_exact_zero() const {
    for (int i = 0; i < ncomp(); ++i)
        if (!c_[static_cast<size_t>(i)].is_exact_zero()) return false;
    return true;
}

void ExtScalar::require_compatible(const ExtScalar& a, const ExtScalar& b) {
    if (a.level_ != b.level_) throw LevelMismatch("operands at different tower levels");
    if (a.tower_->prime()->p() != b.tower_->prime()->p())
        throw LevelMismatch("operands from different towers");
}

void ExtScalar::check_level_at_least(Level min, const char* op) const {
    if (static_cast<int>(level_) < static_cast<int>(min))
        throw LevelMismatch(std::string(op) + ": needs a field extension level");
}

ExtScalar ExtScalar::operator-() const {
    ExtScalar r = *this;
    for (int i = 0; i < ncomp(); ++i) r.c_[static_cast<size_t>(i)] = -r.c_[static_cast<size_t>(i)];
    return r;
}

ExtScalar ExtScalar::operator+(const ExtScalar& o) const {
    require_compatible(*this, o);
    ExtScalar r = *this;
    for (int i = 0; i < ncomp(); ++i)
        r.c_[static_cast<size_t>(i)] =
            c_[static_cast<size_t>(i)] + o.c_[static_cast<size_t>(i)];
    return r;
}

ExtScalar ExtScalar::operator-(const ExtScalar& o) const { return *this + (-o); }

ExtScalar ExtScalar::operator*(const ExtScalar& o) const {
    require_compatible(*this, o);
    ExtScalar r = zero(tower_, level_);
    switch (level_) {
        case Level::QP:
            r.c_[0] = c_[0] * o.c_[0];
            break;
        case Level::E: {
            const PadicScalar& s = tower_->alpha_square();
            r.c_[0] = c_[0] * o.c_[0] + s * (c_[1] * o.c_[1]);
            r.c_[1] = c_[0] * o.c_[1] + c_[1] * o.c_[0];
            break;
        }
        case Level::K: {
            // (u1 + beta w1)(u2 + beta w2) = u1 u2 + t w1 w2 + beta(u1 w2 + w1 u2)
            const PadicScalar& s = tower_->alpha_square();
            const PadicScalar& t = tower_->beta_square();
            auto emul = [&s](const PadicScalar& a0, const PadicScalar& a1,
                             const PadicScalar& b0, const PadicScalar& b1) {
                return std::pair<PadicScalar, PadicScalar>(a0 * b0 + s * (a1 * b1),
                                                           a0 * b1 + a1 * b0);
            };
            auto [uu0, uu1] = emul(c_[0], c_[1], o.c_[0], o.c_[1]);
            auto [ww0, ww1] = emul(c_[2], c_[3], o.c_[2], o.c_[3]);
            auto [uw0, uw1] = emul(c_[0], c_[1], o.c_[2], o.c_[3]);
            auto [wu0, wu1] = emul(c_[2], c_[3], o.c_[0], o.c_[1]);
            r.c_[0] = uu0 + t * ww0;
            r.c_[1] = uu1 + t * ww1;
            r.c_[2] = uw0 + wu0;
            r.c_[3] = uw1 + wu1;
            break;
        }
    }
    return r;
}

ExtScalar ExtScalar::inv() const {
    if (is_zero_like())
        throw DivisionByInexactZero("inverse of a scalar with no known digits");
    switch (level_) {
        case Level::QP: {
            ExtScalar r = *this;
            r.c_[0] = c_[0].inv();
            return r;
        }
        default: {
            ExtScalar n = norm_down();
            ExtScalar ninv = n.inv().lift_to(level_);
            return conj_down() * ninv;
        }
    }
}

ExtScalar ExtScalar::pow(long k) const {
    ExtScalar base = k < 0 ? inv() : *this;
    unsigned long e = static_cast<unsigned long>(k < 0 ? -k : k);
    ExtScalar acc = one(tower_, level_);
    while (e > 0) {
        if (e & 1UL) acc = acc * base;
        base = base * base;
        e >>= 1UL;
    }
    return acc;
}

bool ExtScalar::indistinguishable(const ExtScalar& o) const {
    return (*this - o).is_zero_like();
}

ExtScalar ExtScalar::sigma() const {
    check_level_at_least(Level::E, "sigma");
    ExtScalar r = *this;
    r.c_[1] = -r.c_[1];
    if (level_ == Level::K) r.c_[3] = -r.c_[3];
    return r;
}

ExtScalar ExtScalar::conj_down() const {
    check_level_at_least(Level::E, "conj_down");
    ExtScalar r = *this;
    if (level_ == Level::E) {
        r.c_[1] = -r.c_[1];
    } else {
        r.c_[2] = -r.c_[2];
        r.c_[3] = -r.c_[3];
    }
    return r;
}

ExtScalar ExtScalar::norm_down() const {
    check_level_at_least(Level::E, "norm_down");
    ExtScalar prod = *this * conj_down();
    ExtScalar r = zero(tower_, level_ == Level::K ? Level::E : Level::QP);
    if (level_ == Level::E) {
        if (!prod.c_[1].is_zero_like())
            throw InternalInvariantViolation("norm_down: alpha part did not cancel");
        r.c_[0] = prod.c_[0];
    } else {
        if (!prod.c_[2].is_zero_like() || !prod.c_[3].is_zero_like())
            throw InternalInvariantViolation("norm_down: beta part did not cancel");
        r.c_[0] = prod.c_[0];
        r.c_[1] = prod.c_[1];
    }
    return r;
}

QuarterVal ExtScalar::vq() const {
    // Quarter-valuation contribution of each basis element.
    long shift_a = level_ == Level::QP ? 0 : 2 * tower_->alpha_square().val();
    long shift_b = (level_ == Level::K) ? 2 * tower_->beta_square().val() : 0;
    long shifts[4] = {0, shift_a, shift_b, shift_a + shift_b};

    if (level_ == Level::K && !is_zero_like()) {
        // The basis {1,a,B,aB} need not compute v as a plain min at level K;
        // use the norm form, which is exact.
        ExtScalar n2 = norm_down().norm_down();
        QuarterVal v = n2.vq();
        return {v.q / 4, v.is_bound};
    }

    long exact_min = kInfVal;
    long bound_min = kInfVal;
    for (int i = 0; i < ncomp(); ++i) {
        const PadicScalar& ci = c_[static_cast<size_t>(i)];
        if (ci.is_exact_zero()) continue;
        long vi = 4 * ci.val() + shifts[i];
        if (ci.is_zero_like())
            bound_min = std::min(bound_min, vi);
        else
            exact_min = std::min(exact_min, vi);
    }
    if (exact_min <= bound_min && exact_min < kInfVal) return {exact_min, false};
    return {std::min(exact_min, bound_min), true};
}

long ExtScalar::local_val() const {
    QuarterVal v = vq();
    if (v.is_bound) throw PrecisionExhausted("local_val of a zero-like scalar");
    long e = tower_->ram_index(level_);
    long num = v.q * e;
    if (num % 4 != 0)
        throw InternalInvariantViolation("local valuation is not an integer");
    return num / 4;
}

ExtScalar ExtScalar::reduce_mod_omega(long k) const {
    ExtScalar r = zero(tower_, level_);
    switch (level_) {
        case Level::QP:
            r.c_[0] = c_[0].mod_pk(k);
            return r;
        case Level::E:
            if (tower_->ext().e == 1) {
                r.c_[0] = c_[0].mod_pk(k);
                r.c_[1] = c_[1].mod_pk(k);
            } else {
                // alpha^k O = { a + alpha b : v(a) >= ceil(k/2), v(b) >= floor(k/2) }
                long ka = (k >= 0) ? (k + 1) / 2 : k / 2;
                long kb = k - ka;
                r.c_[0] = c_[0].mod_pk(ka);
                r.c_[1] = c_[1].mod_pk(kb);
            }
            return r;
        case Level::K:
            throw LevelMismatch("reduce_mod_omega unsupported at level K");
    }
    return r;
}

ExtScalar ExtScalar::truncate_abs_q(long q) const {
    long shift_a = level_ == Level::QP ? 0 : 2 * tower_->alpha_square().val();
    long shift_b = (level_ == Level::K) ? 2 * tower_->beta_square().val() : 0;
    long shifts[4] = {0, shift_a, shift_b, shift_a + shift_b};
    ExtScalar r = *this;
    for (int i = 0; i < ncomp(); ++i) {
        long digits = (q - shifts[i]) / 4;        // floor toward zero is fine: q-shift >= 0 use
        if (q - shifts[i] < 0) digits = (q - shifts[i] - 3) / 4;
        r.c_[static_cast<size_t>(i)] = r.c_[static_cast<size_t>(i)].truncate_abs(digits);
    }
    return r;
}

bool is_residue_in_kE(const TowerContext& t, long r0, long r1) {
    if (t.ext().e != 1)
        throw LevelMismatch("residue field of a ramified E is F_p; use the base test");
    const long p = t.prime()->p();
    long sbar = t.alpha_square().unit_residue();
    r0 = ((r0 % p) + p) % p;
    r1 = ((r1 % p) + p) % p;
    if (r0 == 0 && r1 == 0) throw ZeroHasNoClass("residue zero has no class");
    for (long a = 0; a < p; ++a) {
        for (long b = 0; b < p; ++b) {
            if (a == 0 && b == 0) continue;
            long q0 = (a * a + sbar * b * b) % p;
            long q1 = (2 * a * b) % p;
            if (q0 == r0 && q1 == r1) return true;
        }
    }
    return false;
}

SquareClass ExtScalar::square_class_level() const {
    if (is_zero_like()) throw ZeroHasNoClass("square class of zero");
    if (level_ == Level::QP) return c_[0].square_class();
    if (level_ == Level::K) throw LevelMismatch("square_class_level unsupported at level K");

    long lv = local_val();
    ExtScalar u = *this * omega(tower_, level_).inv_pow(lv);
    SquareClass sc;
    sc.vparity = static_cast<int>(((lv % 2) + 2) % 2);
    if (tower_->ext().e == 1) {
        // Unit component residues mod p (a zero-like or positive-val part is 0).
        auto res = [](const PadicScalar& x) -> long {
            if (x.is_zero_like() || x.val() > 0) return 0;
            return x.unit_residue();
        };
        long r0 = res(u.c_[0]);
        long r1 = res(u.c_[1]);
        sc.unitclass = is_residue_in_kE(*tower_, r0, r1) ? UnitClass::QR : UnitClass::NQR;
    } else {
        // Residue field of a ramified E is F_p; the unit's residue is the
        // constant coordinate's residue.
        if (u.c_[0].is_zero_like() || u.c_[0].val() > 0)
            throw InternalInvariantViolation("ramified unit has no constant residue");
        sc.unitclass =
            prime()->is_residue(u.c_[0].unit_residue()) ? UnitClass::QR : UnitClass::NQR;
    }
    return sc;
}

ExtScalar ExtScalar::sqrt() const {
    if (is_exact_zero()) return *this;
    if (is_zero_like()) throw PrecisionExhausted("sqrt of inexact zero");
    if (level_ == Level::QP) {
        ExtScalar r = *this;
        r.c_[0] = c_[0].sqrt();
        return r;
    }
    if (level_ == Level::K) throw LevelMismatch("sqrt unsupported at level K");

    long lv = local_val();
    if (((lv % 2) + 2) % 2 != 0) throw NonSquare("sqrt: odd local valuation", 1, false);
    ExtScalar w = omega(tower_, level_);
    ExtScalar u = *this * w.inv_pow(lv);

    const long p = prime()->p();
    auto res = [](const PadicScalar& x) -> long {
        if (x.is_zero_like() || x.val() > 0) return 0;
        return x.unit_residue();
    };
    long r0 = res(u.c_[0]);
    long r1 = res(u.c_[1]);
    long root0 = -1, root1 = -1;
    if (tower_->ext().e == 1) {
        long sbar = tower_->alpha_square().unit_residue();
        bool found = false;
        for (long a = 0; a < p && !found; ++a) {
            for (long b = 0; b < p && !found; ++b) {
                if (a == 0 && b == 0) continue;
                if ((a * a + sbar * b * b) % p == r0 && (2 * a * b) % p == r1) {
                    root0 = a;
                    root1 = b;
                    found = true;
                }
            }
        }
        if (!found) throw NonSquare("sqrt: non-residue in k_E", 0, true);
    } else {
        if (r0 == 0) throw InternalInvariantViolation("ramified unit with zero residue");
        if (!prime()->is_residue(r0)) throw NonSquare("sqrt: non-residue in k_F", 0, true);
        for (long r = 1; r < p; ++r)
            if ((r * r) % p == r0) { root0 = r; root1 = 0; break; }
    }

    ExtScalar start = make_e(tower_, PadicScalar::integer(prime(), root0),
                             PadicScalar::integer(prime(), root1), level_);
    std::vector<ExtScalar> f = {-u, zero(tower_, level_), one(tower_, level_)};
    ExtScalar x = hensel_root(f, start);

    // Canonical branch: first nonzero residue coordinate in [1, (p-1)/2].
    long a0 = res(x.c_[0]);
    long pick = a0 != 0 ? a0 : res(x.c_[1]);
    if (pick > (p - 1) / 2) x = -x;
    return x * w.pow(lv / 2);
}

std::string ExtScalar::str() const {
    std::ostringstream os;
    static const char* names[4] = {"", "a", "B", "aB"};
    bool first = true;
    for (int i = 0; i < ncomp(); ++i) {
        const auto& ci = c_[static_cast<size_t>(i)];
        if (ci.is_exact_zero()) continue;
        if (!first) os << " + ";
        os << "(" << ci.str() << ")" << names[i];
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

std::string ExtScalar::key() const {
    std::ostringstream os;
    for (int i = 0; i < ncomp(); ++i) {
        const auto& ci = c_[static_cast<size_t>(i)];
        if (ci.is_zero_like()) {
            os << "z|";
        } else {
            os << ci.unit().str() << "e" << ci.val() << "|";
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------

namespace {
ExtScalar poly_eval_ext(const std::vector<ExtScalar>& f, const ExtScalar& x) {
    ExtScalar acc = ExtScalar::zero(x.tower(), x.level());
    for (auto it = f.rbegin(); it != f.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<ExtScalar> poly_derivative_ext(const std::vector<ExtScalar>& f) {
    std::vector<ExtScalar> d;
    for (size_t i = 1; i < f.size(); ++i)
        d.push_back(f[i] * ExtScalar::integer(f[i].tower(), f[i].level(),
                                              static_cast<long>(i)));
    if (d.empty()) d.push_back(ExtScalar::zero(f.front().tower(), f.front().level()));
    return d;
}
}  // namespace

ExtScalar hensel_root(const std::vector<ExtScalar>& coeffs, const ExtScalar& start) {
    if (coeffs.empty()) throw Error("hensel_root: empty polynomial");
    for (const auto& c : coeffs) {
        QuarterVal v = c.vq();
        if (!v.is_bound && v.q < 0)
            throw HenselConditionFailed("hensel_root: non-integral coefficient");
    }
    {
        QuarterVal v = start.vq();
        if (!v.is_bound && v.q < 0)
            throw HenselConditionFailed("hensel_root: start point not integral");
    }

    std::vector<ExtScalar> df = poly_derivative_ext(coeffs);
    ExtScalar fa = poly_eval_ext(coeffs, start);
    ExtScalar dfa = poly_eval_ext(df, start);
    if (dfa.is_zero_like())
        throw HenselConditionFailed("hensel_root: derivative vanishes at start");
    long vf = fa.vq().q;
    long vdf = dfa.vq().q;
    if (vf <= 2 * vdf)
        throw HenselConditionFailed("hensel_root: |f(a)| < |f'(a)|^2 fails at start");

    const long target = 4 * (start.prime()->precision() - 4);
    ExtScalar x = start;
    long last = vf;
    for (int iter = 0; iter < 64; ++iter) {
        ExtScalar fx = poly_eval_ext(coeffs, x);
        if (fx.is_exact_zero()) return x;
        if (fx.vq().q >= target) {
            ExtScalar dfx = poly_eval_ext(df, x);
            return x.truncate_abs_q(fx.vq().q - dfx.vq().q);
        }
        ExtScalar dfx = poly_eval_ext(df, x);
        if (dfx.is_zero_like())
            throw PrecisionExhausted("hensel_root: derivative lost all digits");
        x = x - fx / dfx;
        long now = poly_eval_ext(coeffs, x).vq().q;
        if (now <= last && iter > 4)
            throw PrecisionExhausted("hensel_root: no progress before reaching precision");
        last = now;
    }
    throw PrecisionExhausted("hensel_root: iteration budget exhausted");
}

}  // namespace sl2limits
