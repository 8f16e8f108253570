#include "tenkontract/precision.hpp"

#include "mac_policy.hpp"
#include "tenkontract/error.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <vector>

namespace tenkontract {

double FormatSpec::max_value() const {
    return std::ldexp(2.0 - std::ldexp(1.0, -mantissa_bits), max_exponent());
}

double FormatSpec::min_normal() const { return std::ldexp(1.0, min_exponent()); }

namespace formats {
FormatSpec fp64() { return {"fp64", 11, 52}; }
FormatSpec fp32() { return {"fp32", 8, 23}; }
FormatSpec tf32() { return {"tf32", 8, 10}; }
FormatSpec fp16() { return {"fp16", 5, 10, true}; }
FormatSpec bf16() { return {"bf16", 8, 7}; }
}  // namespace formats

FormatSpec format_by_name(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const auto& f : {formats::fp64(), formats::fp32(), formats::tf32(), formats::fp16(), formats::bf16()}) {
        if (f.name == lower) return f;
    }
    throw ValidationError("unknown floating-point format '" + std::string(name) + "'");
}

std::string_view to_string(SplitMode mode) noexcept { return mode == SplitMode::Triple ? "3x" : "1x"; }

SplitMode split_mode_from_int(int factor) {
    if (factor == 1) return SplitMode::Single;
    if (factor == 3) return SplitMode::Triple;
    throw ValidationError("split factor must be 1 or 3, got " + std::to_string(factor));
}

double quantize(double x, const FormatSpec& fmt) {
    if (!std::isfinite(x) || x == 0.0) return x;
    if (fmt.exponent_bits > 11 || fmt.mantissa_bits > 52 || fmt.exponent_bits < 2 || fmt.mantissa_bits < 1) {
        throw ValidationError("format " + fmt.name + " cannot be emulated in double");
    }
    double y = x;
    if (fmt.mantissa_bits < 52) {
        const int shift = 52 - fmt.mantissa_bits;
        auto bits = std::bit_cast<std::uint64_t>(x);
        const std::uint64_t lsb = (bits >> shift) & 1U;
        bits += ((std::uint64_t{1} << (shift - 1)) - 1) + lsb;
        bits &= ~((std::uint64_t{1} << shift) - 1);
        y = std::bit_cast<double>(bits);
    }
    const double mag = std::fabs(y);
    if (mag > fmt.max_value()) return std::copysign(HUGE_VAL, x);
    if (mag < fmt.min_normal()) {
        if (!fmt.subnormals) return std::copysign(0.0, x);
        // Fixed quantum below the normal range; rounds x itself to avoid double rounding.
        const double quantum = std::ldexp(1.0, fmt.min_exponent() - fmt.mantissa_bits);
        return std::copysign(std::nearbyint(x / quantum) * quantum, x);
    }
    return y;
}

std::complex<double> quantize(std::complex<double> x, const FormatSpec& fmt) {
    return {quantize(x.real(), fmt), quantize(x.imag(), fmt)};
}

SplitValue split(double x, const FormatSpec& fmt) {
    const double big = quantize(x, fmt);
    if (!std::isfinite(big)) return {big, 0.0};
    return {big, quantize(x - big, fmt)};
}

std::string describe(const PrecisionSetting& setting) {
    return setting.mode == SplitMode::Triple ? "3x" + setting.format.name : setting.format.name;
}

namespace {

template <class T>
void require_same_length(std::span<const T> a, std::span<const T> b) {
    if (a.size() != b.size()) throw ValidationError("mac_dot: operand lengths differ");
}

}  // namespace

double mac_dot(std::span<const double> a, std::span<const double> b, const FormatSpec& fmt, SplitMode mode,
               const FormatSpec& accum) {
    require_same_length(a, b);
    const std::size_t n = a.size();
    std::vector<double> ab(n), as(n), bb(n), bs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto sa = split(a[i], fmt);
        const auto sb = split(b[i], fmt);
        ab[i] = sa.big;
        as[i] = sa.small;
        bb[i] = sb.big;
        bs[i] = sb.small;
    }
    return detail::with_accumulator(accum, [&](const auto& p) {
        typename std::decay_t<decltype(p)>::value_type acc{};
        auto pass = [&](const std::vector<double>& x, const std::vector<double>& y) {
            for (std::size_t i = 0; i < n; ++i) acc = p.add(acc, p.mul(x[i], y[i]));
        };
        if (mode == SplitMode::Triple) {
            pass(ab, bs);
            pass(as, bb);
        }
        pass(ab, bb);
        return static_cast<double>(acc);
    });
}

std::complex<double> mac_dot(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b,
                             const FormatSpec& fmt, SplitMode mode, const FormatSpec& accum) {
    require_same_length(a, b);
    const std::size_t n = a.size();
    using C = std::complex<double>;
    std::vector<C> ab(n), as(n), bb(n), bs(n);
    auto split_c = [&](C v, C& big, C& small) {
        const auto r = split(v.real(), fmt);
        const auto i = split(v.imag(), fmt);
        big = {r.big, i.big};
        small = {r.small, i.small};
    };
    for (std::size_t i = 0; i < n; ++i) {
        split_c(a[i], ab[i], as[i]);
        split_c(b[i], bb[i], bs[i]);
    }
    return detail::with_accumulator(accum, [&](const auto& p) {
        typename std::decay_t<decltype(p)>::value_type re{}, im{};
        auto pass = [&](const std::vector<C>& x, const std::vector<C>& y) {
            for (std::size_t i = 0; i < n; ++i) {
                detail::complex_mac(p, re, im, x[i].real(), x[i].imag(), y[i].real(), y[i].imag());
            }
        };
        if (mode == SplitMode::Triple) {
            pass(ab, bs);
            pass(as, bb);
        }
        pass(ab, bb);
        return C{static_cast<double>(re), static_cast<double>(im)};
    });
}

PrecisionSchedule PrecisionSchedule::reference() { return {}; }

PrecisionSchedule PrecisionSchedule::uniform(const FormatSpec& fmt, SplitMode mode) {
    const FormatSpec accum = fmt == formats::fp64() ? formats::fp64() : formats::fp32();
    return PrecisionSchedule(PrecisionSetting{fmt, mode}, accum);
}

const PrecisionSetting& PrecisionSchedule::at(std::size_t step) const {
    auto it = overrides_.find(step);
    return it == overrides_.end() ? default_ : it->second;
}

}  // namespace tenkontract
