#pragma once

// Rounding policies for the emulated multiply-accumulate. Every product and
// every accumulation is rounded to the accumulation format.

#include "tenkontract/precision.hpp"

#include <cfloat>
#include <cmath>

namespace tenkontract::detail {

struct Fp64Accumulate {
    using value_type = double;
    [[nodiscard]] double mul(double a, double b) const noexcept { return a * b; }
    [[nodiscard]] double add(double acc, double p) const noexcept { return acc + p; }
};

// Native float arithmetic is correctly rounded (RNE); products of operands
// with at most 24 significant bits are exact in double before the cast.
struct Fp32Accumulate {
    using value_type = float;
    static float flush(float v) noexcept { return std::fabs(v) < FLT_MIN ? std::copysign(0.0F, v) : v; }
    [[nodiscard]] float mul(double a, double b) const noexcept { return flush(static_cast<float>(a * b)); }
    [[nodiscard]] float add(float acc, float p) const noexcept { return flush(acc + p); }
};

struct GenericAccumulate {
    using value_type = double;
    FormatSpec fmt;
    [[nodiscard]] double mul(double a, double b) const { return quantize(a * b, fmt); }
    [[nodiscard]] double add(double acc, double p) const { return quantize(acc + p, fmt); }
};

/// acc += a * b for complex values as four real MACs.
template <class Policy>
inline void complex_mac(const Policy& p, typename Policy::value_type& re, typename Policy::value_type& im,
                        double ar, double ai, double br, double bi) {
    re = p.add(re, p.mul(ar, br));
    re = p.add(re, -p.mul(ai, bi));
    im = p.add(im, p.mul(ar, bi));
    im = p.add(im, p.mul(ai, br));
}

/// Calls `fn(policy)` with the policy matching `accum`.
template <class Fn>
decltype(auto) with_accumulator(const FormatSpec& accum, Fn&& fn) {
    if (accum == formats::fp64()) return fn(Fp64Accumulate{});
    if (accum == formats::fp32()) return fn(Fp32Accumulate{});
    return fn(GenericAccumulate{accum});
}

}  // namespace tenkontract::detail
