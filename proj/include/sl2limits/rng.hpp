#pragma once

#include <cstdint>
#include <random>

#include "sl2limits/tower.hpp"

namespace sl2limits {

/// Deterministic sampling for property tests and experiments.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t u64() { return gen_(); }

    long range(long lo, long hi) {   // inclusive
        std::uniform_int_distribution<long> d(lo, hi);
        return d(gen_);
    }

    bool flip() { return (gen_() & 1UL) != 0; }

    /// Random integer in [0, p^m).
    bigint digits(const PrimeContextPtr& ctx, int m) {
        bigint acc = 0;
        for (int i = 0; i < m; ++i) acc = acc * ctx->p() + range(0, ctx->p() - 1);
        return acc;
    }

    /// Random unit of Z_p known to full precision.
    PadicScalar unit(const PrimeContextPtr& ctx) {
        bigint u = digits(ctx, ctx->precision());
        long low = range(1, ctx->p() - 1);
        u = u - u % ctx->p() + low;
        return PadicScalar::from_unit(ctx, u, 0, ctx->precision(), true);
    }

    /// Random scalar of valuation in [vmin, vmax].
    PadicScalar scalar(const PrimeContextPtr& ctx, long vmin, long vmax) {
        return unit(ctx).shift(range(vmin, vmax));
    }

    /// Random small exact integer scalar (handy for exact-matrix sampling).
    PadicScalar small_int(const PrimeContextPtr& ctx, long lo, long hi) {
        return PadicScalar::integer(ctx, range(lo, hi));
    }

    /// Random nonzero element of the given level with valuation around 0.
    ExtScalar ext(const TowerContextPtr& t, Level level, long vmin = -1, long vmax = 1) {
        ExtScalar x = ExtScalar::zero(t, level);
        int n = level == Level::QP ? 1 : (level == Level::E ? 2 : 4);
        for (;;) {
            bool nonzero = false;
            std::array<PadicScalar, 4> comps;
            for (int i = 0; i < n; ++i) {
                if (range(0, 3) == 0) {
                    comps[static_cast<size_t>(i)] = PadicScalar::zero(t->prime());
                } else {
                    comps[static_cast<size_t>(i)] = scalar(t->prime(), vmin, vmax);
                    nonzero = true;
                }
            }
            if (!nonzero) continue;
            if (n == 1) return ExtScalar::from_padic(t, level, comps[0]);
            if (n == 2) return ExtScalar::make_e(t, comps[0], comps[1], level);
            return ExtScalar::make_k(t, comps[0], comps[1], comps[2], comps[3]);
        }
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

}  // namespace sl2limits
