#pragma once

// Software emulation of reduced floating-point formats, the 3x big/small split
// scheme, and per-step precision assignment.
//
// All arithmetic is carried in double and rounded at the contract points:
// operand quantization, every product, and every accumulation. Rounding is
// round-to-nearest-even; results below the smallest normal flush to zero
// unless the format keeps subnormals (FP16, whose range reaches ~6e-8).

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace tenkontract {

struct FormatSpec {
    std::string name;
    int exponent_bits = 11;
    int mantissa_bits = 52;  // explicit (stored) mantissa bits
    bool subnormals = false;  // gradual underflow instead of flush-to-zero

    [[nodiscard]] int max_exponent() const noexcept { return (1 << (exponent_bits - 1)) - 1; }
    [[nodiscard]] int min_exponent() const noexcept { return 1 - max_exponent(); }
    [[nodiscard]] double max_value() const;
    [[nodiscard]] double min_normal() const;

    friend bool operator==(const FormatSpec& a, const FormatSpec& b) noexcept {
        return a.exponent_bits == b.exponent_bits && a.mantissa_bits == b.mantissa_bits &&
               a.subnormals == b.subnormals;
    }
};

namespace formats {
FormatSpec fp64();
FormatSpec fp32();
FormatSpec tf32();
FormatSpec fp16();
FormatSpec bf16();
}  // namespace formats

/// Looks up a preset by name (fp64, fp32, tf32, fp16, bf16; case-insensitive).
[[nodiscard]] FormatSpec format_by_name(std::string_view name);

enum class SplitMode { Single, Triple };

[[nodiscard]] std::string_view to_string(SplitMode mode) noexcept;
[[nodiscard]] SplitMode split_mode_from_int(int factor);

[[nodiscard]] double quantize(double x, const FormatSpec& fmt);
[[nodiscard]] std::complex<double> quantize(std::complex<double> x, const FormatSpec& fmt);

struct SplitValue {
    double big = 0.0;
    double small = 0.0;
};

[[nodiscard]] SplitValue split(double x, const FormatSpec& fmt);

/// Operand format + split mode for one contraction step.
struct PrecisionSetting {
    FormatSpec format = formats::fp64();
    SplitMode mode = SplitMode::Single;

    friend bool operator==(const PrecisionSetting& a, const PrecisionSetting& b) noexcept {
        return a.format == b.format && a.mode == b.mode;
    }
};

/// Human-readable tag: "fp64", "tf32", "3xtf32", ...
[[nodiscard]] std::string describe(const PrecisionSetting& setting);

/// Real dot product under the emulated MAC contract.
[[nodiscard]] double mac_dot(std::span<const double> a, std::span<const double> b, const FormatSpec& fmt,
                             SplitMode mode, const FormatSpec& accum);

/// Complex dot product; each element pair costs four real MACs.
[[nodiscard]] std::complex<double> mac_dot(std::span<const std::complex<double>> a,
                                           std::span<const std::complex<double>> b, const FormatSpec& fmt,
                                           SplitMode mode, const FormatSpec& accum);

class PrecisionSchedule {
public:
    PrecisionSchedule() = default;
    PrecisionSchedule(PrecisionSetting default_setting, FormatSpec accum)
        : default_(std::move(default_setting)), accum_(std::move(accum)) {}

    /// FP64 operands with FP64 accumulation; the reference setting.
    static PrecisionSchedule reference();
    /// Uniform schedule with FP32 accumulation (FP64 accumulation for fp64 operands).
    static PrecisionSchedule uniform(const FormatSpec& fmt, SplitMode mode);

    [[nodiscard]] const PrecisionSetting& default_setting() const noexcept { return default_; }
    [[nodiscard]] const FormatSpec& accumulation() const noexcept { return accum_; }
    void set_accumulation(FormatSpec accum) { accum_ = std::move(accum); }
    void set_override(std::size_t step, PrecisionSetting setting) { overrides_[step] = std::move(setting); }
    [[nodiscard]] const std::map<std::size_t, PrecisionSetting>& overrides() const noexcept { return overrides_; }
    [[nodiscard]] const PrecisionSetting& at(std::size_t step) const;

    /// Power-of-two rescaling of step operands toward unit magnitude; off by default.
    bool rescale = false;

private:
    PrecisionSetting default_{};
    FormatSpec accum_ = formats::fp64();
    std::map<std::size_t, PrecisionSetting> overrides_;
};

}  // namespace tenkontract
