#include "sl2limits/mat2.hpp"

#include <limits>
#include <sstream>

namespace sl2limits {

namespace {
constexpr long kInfVal = std::numeric_limits<long>::max() / 4;
}

Mat2::Mat2(ExtScalar e11, ExtScalar e12, ExtScalar e21, ExtScalar e22)
    : e_{std::move(e11), std::move(e12), std::move(e21), std::move(e22)} {}

Mat2 Mat2::identity(const TowerContextPtr& t, Level level) {
    return Mat2(ExtScalar::one(t, level), ExtScalar::zero(t, level),
                ExtScalar::zero(t, level), ExtScalar::one(t, level));
}

Mat2 Mat2::zero(const TowerContextPtr& t, Level level) {
    auto z = ExtScalar::zero(t, level);
    return Mat2(z, z, z, z);
}

Mat2 Mat2::diag(const ExtScalar& a, const ExtScalar& d) {
    auto z = ExtScalar::zero(a.tower(), a.level());
    return Mat2(a, z, z, d);
}

Mat2 Mat2::weyl_times(const ExtScalar& a) {
    auto z = ExtScalar::zero(a.tower(), a.level());
    auto one = ExtScalar::one(a.tower(), a.level());
    return Mat2(z, one, a, z);
}

Mat2 Mat2::operator*(const Mat2& o) const {
    return Mat2(e_[0] * o.e_[0] + e_[1] * o.e_[2], e_[0] * o.e_[1] + e_[1] * o.e_[3],
                e_[2] * o.e_[0] + e_[3] * o.e_[2], e_[2] * o.e_[1] + e_[3] * o.e_[3]);
}

Mat2 Mat2::operator+(const Mat2& o) const {
    return Mat2(e_[0] + o.e_[0], e_[1] + o.e_[1], e_[2] + o.e_[2], e_[3] + o.e_[3]);
}

Mat2 Mat2::operator-(const Mat2& o) const { return *this + (-o); }

Mat2 Mat2::operator-() const { return Mat2(-e_[0], -e_[1], -e_[2], -e_[3]); }

Mat2 Mat2::scale(const ExtScalar& s) const {
    return Mat2(e_[0] * s, e_[1] * s, e_[2] * s, e_[3] * s);
}

ExtScalar Mat2::det() const { return e_[0] * e_[3] - e_[1] * e_[2]; }

Mat2 Mat2::inverse() const {
    ExtScalar d = det();
    if (d.is_zero_like()) throw SingularMatrix("inverse of a singular matrix");
    ExtScalar di = d.inv();
    return Mat2(e_[3] * di, -e_[1] * di, -e_[2] * di, e_[0] * di);
}

Mat2 Mat2::sigma() const {
    return Mat2(e_[0].sigma(), e_[1].sigma(), e_[2].sigma(), e_[3].sigma());
}

Mat2 Mat2::retower(const TowerContextPtr& t, Level level) const {
    auto move_one = [&](const ExtScalar& x) -> ExtScalar {
        switch (level) {
            case Level::QP:
                if (!x.comp(1).is_zero_like() || !x.comp(2).is_zero_like() ||
                    !x.comp(3).is_zero_like())
                    throw LevelMismatch("retower: entry does not live at level QP");
                return ExtScalar::from_padic(t, level, x.comp(0));
            case Level::E:
                if (!x.comp(2).is_zero_like() || !x.comp(3).is_zero_like())
                    throw LevelMismatch("retower: entry does not live at level E");
                return ExtScalar::make_e(t, x.comp(0), x.comp(1));
            case Level::K:
                return ExtScalar::make_k(t, x.comp(0), x.comp(1), x.comp(2), x.comp(3));
        }
        throw LevelMismatch("retower: bad level");
    };
    return Mat2(move_one(e_[0]), move_one(e_[1]), move_one(e_[2]), move_one(e_[3]));
}

bool Mat2::indistinguishable(const Mat2& o) const {
    for (int i = 0; i < 4; ++i)
        if (!e_[static_cast<size_t>(i)].indistinguishable(o.e_[static_cast<size_t>(i)]))
            return false;
    return true;
}

long Mat2::defect_q(const Mat2& o) const {
    long best = kInfVal;
    for (int i = 0; i < 4; ++i) {
        ExtScalar d = e_[static_cast<size_t>(i)] - o.e_[static_cast<size_t>(i)];
        if (d.is_exact_zero()) continue;
        best = std::min(best, d.vq().q);
    }
    return best;
}

long Mat2::min_entry_q() const {
    long best = kInfVal;
    for (const auto& x : e_) {
        if (x.is_exact_zero()) continue;
        best = std::min(best, x.vq().q);
    }
    return best;
}

bool Mat2::is_sl() const {
    ExtScalar d = det() - ExtScalar::one(tower(), level());
    if (d.is_exact_zero()) return true;
    return d.vq().q >= 4 * (prime()->precision() - 4);
}

bool Mat2::scalar_multiple_of_identity(ExtScalar& q_out) const {
    if (!e_[1].is_zero_like() || !e_[2].is_zero_like()) return false;
    if (!e_[0].indistinguishable(e_[3])) return false;
    q_out = e_[0];
    return true;
}

bool Mat2::proportional_to(const Mat2& o, ExtScalar& q_out) const {
    // Find the entry of minimal valuation to divide by.
    int pivot = -1;
    long best = kInfVal;
    for (int i = 0; i < 4; ++i) {
        const auto& x = e_[static_cast<size_t>(i)];
        if (x.is_zero_like()) continue;
        if (x.vq().q < best) { best = x.vq().q; pivot = i; }
    }
    if (pivot < 0) return false;
    ExtScalar q = o.e_[static_cast<size_t>(pivot)] / e_[static_cast<size_t>(pivot)];
    if (scale(q).indistinguishable(o)) { q_out = q; return true; }
    return false;
}

std::string Mat2::str() const {
    std::ostringstream os;
    os << "[[" << e_[0].str() << ", " << e_[1].str() << "], [" << e_[2].str() << ", "
       << e_[3].str() << "]]";
    return os.str();
}

Mat2 random_sl2(const TowerContextPtr& t, Level level, Rng& rng, long spread) {
    // a unit-led, d solved from the determinant: det is 1 exactly.
    ExtScalar a = rng.ext(t, level, -spread, spread);
    while (a.is_zero_like()) a = rng.ext(t, level, -spread, spread);
    ExtScalar b = rng.ext(t, level, 0, spread);
    ExtScalar c = rng.ext(t, level, 0, spread);
    ExtScalar d = (ExtScalar::one(t, level) + b * c) / a;
    return Mat2(a, b, c, d);
}

Mat2 random_gl2(const TowerContextPtr& t, Level level, Rng& rng, long spread) {
    for (;;) {
        Mat2 m(rng.ext(t, level, -spread, spread), rng.ext(t, level, -spread, spread),
               rng.ext(t, level, -spread, spread), rng.ext(t, level, -spread, spread));
        if (m.is_invertible()) return m;
    }
}

}  // namespace sl2limits
