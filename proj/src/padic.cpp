#include "sl2limits/padic.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace sl2limits {

namespace {
constexpr long kInfVal = std::numeric_limits<long>::max() / 4;

bigint mod_reduce(const bigint& x, const bigint& mod) {
    bigint r = x % mod;
    if (r < 0) r += mod;
    return r;
}
}  // namespace

PrimeContext::PrimeContext(long p, int precision) : p_(p), n_(precision) {
    if (p < 3 || p % 2 == 0) throw ConfigError("prime must be odd and >= 3");
    if (precision < 8) throw ConfigError("precision must be >= 8 digits");
    // Small primality check; the workbench only ever sees small primes.
    for (long d = 3; d * d <= p; d += 2)
        if (p % d == 0) throw ConfigError("p is not prime");

    residue_.assign(static_cast<size_t>(p), false);
    for (long r = 1; r < p; ++r) residue_[static_cast<size_t>((r * r) % p)] = true;
    s_ = 0;
    for (long r = 2; r < p; ++r) {
        if (!residue_[static_cast<size_t>(r)]) { s_ = r; break; }
    }
    if (s_ == 0) throw ConfigError("no non-residue found (p not an odd prime?)");

    pow_.reserve(static_cast<size_t>(2 * n_ + 3));
    bigint cur = 1;
    for (int k = 0; k <= 2 * n_ + 2; ++k) {
        pow_.push_back(cur);
        cur *= p_;
    }
}

const bigint& PrimeContext::p_pow(int k) const {
    if (k < 0 || static_cast<size_t>(k) >= pow_.size())
        throw PrecisionExhausted("p_pow exponent out of range: " + std::to_string(k));
    return pow_[static_cast<size_t>(k)];
}

std::shared_ptr<const PrimeContext> PrimeContext::make(long p, int precision) {
    return std::make_shared<const PrimeContext>(p, precision);
}

// ---------------------------------------------------------------------------

PadicScalar PadicScalar::zero(PrimeContextPtr ctx) {
    PadicScalar x;
    x.ctx_ = std::move(ctx);
    x.kind_ = Kind::ExactZero;
    return x;
}

PadicScalar PadicScalar::inexact_zero(PrimeContextPtr ctx, long bound) {
    PadicScalar x;
    x.ctx_ = std::move(ctx);
    x.kind_ = Kind::InexactZero;
    x.v_ = bound;
    x.exact_ = false;
    return x;
}

PadicScalar PadicScalar::integer(PrimeContextPtr ctx, const bigint& n) {
    if (n == 0) return zero(std::move(ctx));
    PadicScalar x;
    x.ctx_ = std::move(ctx);
    x.kind_ = Kind::Regular;
    x.v_ = 0;
    x.u_ = n;
    x.m_ = x.ctx_->precision();
    x.exact_ = true;
    x.normalize_unit();
    return x;
}

PadicScalar PadicScalar::uniformizer(PrimeContextPtr ctx) {
    PadicScalar x = one(std::move(ctx));
    x.v_ = 1;
    return x;
}

PadicScalar PadicScalar::rational(PrimeContextPtr ctx, const bigint& num, const bigint& den) {
    if (den == 0) throw Error("rational with zero denominator");
    if (num == 0) return zero(std::move(ctx));
    PadicScalar n = integer(ctx, num);
    PadicScalar d = integer(ctx, den);
    return n / d;
}

PadicScalar PadicScalar::from_unit(PrimeContextPtr ctx, const bigint& u, long v, int m,
                                   bool exact) {
    if (u == 0 || u % ctx->p() == 0) throw Error("from_unit: u is not a unit");
    PadicScalar x;
    x.ctx_ = std::move(ctx);
    x.kind_ = Kind::Regular;
    x.v_ = v;
    x.u_ = u;
    x.m_ = std::min(m, x.ctx_->precision());
    x.exact_ = exact;
    x.normalize_unit();
    return x;
}

void PadicScalar::normalize_unit() {
    const long p = ctx_->p();
    if (exact_) {
        while (u_ != 0 && u_ % p == 0) { u_ /= p; ++v_; }
        if (u_ == 0) { kind_ = Kind::ExactZero; return; }
        m_ = ctx_->precision();
        bigint cap = ctx_->p_pow(m_);
        if (u_ < cap && u_ > -cap) return;
        // An exact value wider than the working window degrades to m digits.
        u_ = mod_reduce(u_, cap);
        exact_ = false;
    }
    if (m_ <= 0) { kind_ = Kind::InexactZero; exact_ = false; return; }
    if (m_ > ctx_->precision()) m_ = ctx_->precision();
    u_ = mod_reduce(u_, ctx_->p_pow(m_));
    if (u_ == 0) { kind_ = Kind::InexactZero; v_ += m_; exact_ = false; return; }
    while (u_ % p == 0) { u_ /= p; ++v_; --m_; }
    if (m_ <= 0) kind_ = Kind::InexactZero;
}

long PadicScalar::val() const {
    if (kind_ == Kind::ExactZero) throw Error("valuation of exact zero");
    return v_;
}

long PadicScalar::val_or_bound() const {
    return kind_ == Kind::ExactZero ? kInfVal : v_;
}

bigint PadicScalar::unit() const {
    if (kind_ != Kind::Regular) throw Error("unit of a zero-like scalar");
    return mod_reduce(u_, ctx_->p_pow(m_));
}

long PadicScalar::unit_residue() const {
    if (kind_ != Kind::Regular) throw Error("unit_residue of a zero-like scalar");
    return static_cast<long>(mod_reduce(u_, bigint(ctx_->p())));
}

const PrimeContext& PadicScalar::require_same(const PadicScalar& a, const PadicScalar& b) {
    if (!a.ctx_ || !b.ctx_ || a.ctx_->p() != b.ctx_->p())
        throw LevelMismatch("scalars belong to different prime contexts");
    return *a.ctx_;
}

PadicScalar PadicScalar::operator-() const {
    PadicScalar r = *this;
    if (r.kind_ != Kind::Regular) return r;
    if (r.exact_) {
        r.u_ = -r.u_;
    } else {
        r.u_ = mod_reduce(-r.u_, ctx_->p_pow(r.m_));
    }
    return r;
}

PadicScalar PadicScalar::operator+(const PadicScalar& o) const {
    const PrimeContext& c = require_same(*this, o);
    if (kind_ == Kind::ExactZero) return o;
    if (o.kind_ == Kind::ExactZero) return *this;

    if (kind_ == Kind::InexactZero || o.kind_ == Kind::InexactZero) {
        // One operand is only a valuation bound b: digits of the other below b
        // survive, everything else is lost.
        const PadicScalar& bz = kind_ == Kind::InexactZero ? *this : o;
        const PadicScalar& rg = kind_ == Kind::InexactZero ? o : *this;
        if (rg.kind_ == Kind::InexactZero)
            return inexact_zero(ctx_, std::min(v_, o.v_));
        long b = bz.v_;
        if (rg.v_ >= b) return inexact_zero(ctx_, std::min(rg.v_, b));
        int m = static_cast<int>(std::min<long>(b - rg.v_, rg.m_));
        PadicScalar r = rg;
        r.exact_ = false;
        r.m_ = m;
        r.normalize_unit();
        return r;
    }

    if (exact_ && o.exact_) {
        long vmin = std::min(v_, o.v_);
        bigint s = u_ * ctx_->p_pow(static_cast<int>(v_ - vmin)) +
                   o.u_ * ctx_->p_pow(static_cast<int>(o.v_ - vmin));
        if (s == 0) return zero(ctx_);
        PadicScalar r;
        r.ctx_ = ctx_;
        r.kind_ = Kind::Regular;
        r.v_ = vmin;
        r.u_ = s;
        r.exact_ = true;
        r.normalize_unit();
        return r;
    }

    // Absolute precision of the sum is the worse of the two windows.
    long abs_prec = std::min(exact_ ? kInfVal : v_ + m_, o.exact_ ? kInfVal : o.v_ + o.m_);
    long vmin = std::min(v_, o.v_);
    int window = static_cast<int>(abs_prec - vmin);
    if (window <= 0) return inexact_zero(ctx_, abs_prec);
    window = std::min(window, 2 * c.precision());
    bigint mod = ctx_->p_pow(window);
    bigint s = mod_reduce(u_, mod) * ctx_->p_pow(static_cast<int>(v_ - vmin)) +
               mod_reduce(o.u_, mod) * ctx_->p_pow(static_cast<int>(o.v_ - vmin));
    s = mod_reduce(s, mod);
    if (s == 0) return inexact_zero(ctx_, abs_prec);
    PadicScalar r;
    r.ctx_ = ctx_;
    r.kind_ = Kind::Regular;
    r.v_ = vmin;
    r.u_ = s;
    r.m_ = window;
    r.exact_ = false;
    r.normalize_unit();
    return r;
}

PadicScalar PadicScalar::operator*(const PadicScalar& o) const {
    require_same(*this, o);
    if (kind_ == Kind::ExactZero || o.kind_ == Kind::ExactZero) return zero(ctx_);
    if (kind_ == Kind::InexactZero || o.kind_ == Kind::InexactZero)
        return inexact_zero(ctx_, val_or_bound() + o.val_or_bound());

    PadicScalar r;
    r.ctx_ = ctx_;
    r.kind_ = Kind::Regular;
    r.v_ = v_ + o.v_;
    r.u_ = u_ * o.u_;
    r.exact_ = exact_ && o.exact_;
    r.m_ = std::min(m_, o.m_);
    r.normalize_unit();
    return r;
}

PadicScalar PadicScalar::inv() const {
    if (kind_ == Kind::ExactZero)
        throw DivisionByInexactZero("inverse of exact zero");
    if (kind_ == Kind::InexactZero)
        throw DivisionByInexactZero("inverse of a scalar with no known digits");
    PadicScalar r;
    r.ctx_ = ctx_;
    r.kind_ = Kind::Regular;
    r.v_ = -v_;
    r.m_ = m_;
    if (exact_ && (u_ == 1 || u_ == -1)) {
        r.u_ = u_;
        r.exact_ = true;
    } else {
        // Newton lifting of the inverse: r <- r (2 - u r), doubling digits.
        const long p = ctx_->p();
        long u0 = static_cast<long>(mod_reduce(u_, bigint(p)));
        long r0 = 0;
        for (long x = 1; x < p; ++x)
            if ((u0 * x) % p == 1) { r0 = x; break; }
        bigint acc(r0);
        int digits = 1;
        bigint base = mod_reduce(u_, ctx_->p_pow(m_));
        while (digits < m_) {
            digits = std::min(2 * digits, m_);
            bigint mod = ctx_->p_pow(digits);
            acc = acc * (2 - base % mod * acc % mod) % mod;
            if (acc < 0) acc += mod;
        }
        r.u_ = acc;
        r.exact_ = false;
    }
    r.normalize_unit();
    return r;
}

PadicScalar PadicScalar::shift(long k) const {
    PadicScalar r = *this;
    if (r.kind_ == Kind::ExactZero) return r;
    r.v_ += k;
    return r;
}

PadicScalar PadicScalar::mod_pk(long k) const {
    if (kind_ == Kind::ExactZero) return zero(ctx_);
    if (kind_ == Kind::InexactZero) {
        if (v_ >= k) return zero(ctx_);
        throw PrecisionExhausted("mod_pk on inexact zero below the cut");
    }
    if (v_ >= k) return zero(ctx_);
    if (!exact_ && v_ + m_ < k)
        throw PrecisionExhausted("mod_pk beyond known digits");
    int digits = static_cast<int>(k - v_);
    bigint rep = mod_reduce(u_, ctx_->p_pow(digits));
    if (rep == 0) return zero(ctx_);
    PadicScalar r;
    r.ctx_ = ctx_;
    r.kind_ = Kind::Regular;
    r.v_ = v_;
    r.u_ = rep;
    r.exact_ = true;
    r.normalize_unit();
    return r;
}

PadicScalar PadicScalar::truncate_abs(long a) const {
    if (kind_ == Kind::ExactZero) return *this;
    if (kind_ == Kind::InexactZero) {
        PadicScalar r = *this;
        r.v_ = std::min(v_, a);
        return r;
    }
    if (v_ >= a) return inexact_zero(ctx_, a);
    PadicScalar r = *this;
    r.exact_ = false;
    r.m_ = static_cast<int>(std::min<long>(m_, a - v_));
    r.normalize_unit();
    return r;
}

SquareClass PadicScalar::square_class() const {
    if (is_zero_like()) throw ZeroHasNoClass("square class of zero");
    SquareClass sc;
    sc.vparity = static_cast<int>(((v_ % 2) + 2) % 2);
    sc.unitclass = ctx_->is_residue(unit_residue()) ? UnitClass::QR : UnitClass::NQR;
    return sc;
}

PadicScalar PadicScalar::sqrt() const {
    if (is_zero_like()) {
        if (is_exact_zero()) return zero(ctx_);
        throw PrecisionExhausted("sqrt of inexact zero");
    }
    if (((v_ % 2) + 2) % 2 != 0)
        throw NonSquare("sqrt: odd valuation", 1, false);
    long r0 = unit_residue();
    if (!ctx_->is_residue(r0))
        throw NonSquare("sqrt: unit part is a non-residue", 0, true);
    const long p = ctx_->p();
    long root = 0;
    for (long r = 1; r < p; ++r)
        if ((r * r) % p == r0) { root = r; break; }
    if (root > (p - 1) / 2) root = p - root;

    PadicScalar u = from_unit(ctx_, unit(), 0, m_, exact_);
    std::vector<PadicScalar> f = {-u, zero(ctx_), one(ctx_)};   // X^2 - u
    PadicScalar x = hensel_root_qp(f, integer(ctx_, root));
    if (x.unit_residue() > (p - 1) / 2) x = -x;
    return x.shift(v_ / 2);
}

std::string PadicScalar::str() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::ExactZero: os << "0"; break;
        case Kind::InexactZero: os << "O(p^" << v_ << ")"; break;
        case Kind::Regular:
            os << unit() << "*p^" << v_;
            if (!exact_) os << " (+O(p^" << v_ + m_ << "))";
            break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------

namespace {
PadicScalar poly_eval(const std::vector<PadicScalar>& f, const PadicScalar& x) {
    PadicScalar acc = PadicScalar::zero(x.ctx());
    for (auto it = f.rbegin(); it != f.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<PadicScalar> poly_derivative(const std::vector<PadicScalar>& f) {
    std::vector<PadicScalar> d;
    for (size_t i = 1; i < f.size(); ++i)
        d.push_back(f[i] * PadicScalar::integer(f[i].ctx(), static_cast<long>(i)));
    if (d.empty()) d.push_back(PadicScalar::zero(f.front().ctx()));
    return d;
}
}  // namespace

PadicScalar hensel_root_qp(const std::vector<PadicScalar>& coeffs, const PadicScalar& start) {
    if (coeffs.empty()) throw Error("hensel_root: empty polynomial");
    const auto& ctx = start.ctx();
    for (const auto& c : coeffs)
        if (!c.is_zero_like() && c.val() < 0)
            throw HenselConditionFailed("hensel_root: non-integral coefficient");
    if (!start.is_zero_like() && start.val() < 0)
        throw HenselConditionFailed("hensel_root: start point not integral");

    std::vector<PadicScalar> df = poly_derivative(coeffs);
    PadicScalar fa = poly_eval(coeffs, start);
    PadicScalar dfa = poly_eval(df, start);
    if (dfa.is_zero_like())
        throw HenselConditionFailed("hensel_root: derivative vanishes at start");
    long vf = fa.val_or_bound();
    long vdf = dfa.val();
    if (vf <= 2 * vdf)
        throw HenselConditionFailed("hensel_root: |f(a)| < |f'(a)|^2 fails at start");

    const long target = ctx->precision() - 4;
    PadicScalar x = start;
    long last = vf;
    for (int iter = 0; iter < 64; ++iter) {
        PadicScalar fx = poly_eval(coeffs, x);
        if (fx.is_exact_zero()) return x;
        if (fx.val_or_bound() >= target) {
            // Claim only the digits Newton actually proved:
            // v(x - root) >= v(f(x)) - v(f'(x)).
            PadicScalar dfx = poly_eval(df, x);
            return x.truncate_abs(fx.val_or_bound() - dfx.val());
        }
        PadicScalar dfx = poly_eval(df, x);
        if (dfx.is_zero_like())
            throw PrecisionExhausted("hensel_root: derivative lost all digits");
        x = x - fx / dfx;
        long now = poly_eval(coeffs, x).val_or_bound();
        if (now <= last && iter > 4)
            throw PrecisionExhausted("hensel_root: no progress before reaching precision");
        last = now;
    }
    throw PrecisionExhausted("hensel_root: iteration budget exhausted");
}

}  // namespace sl2limits
