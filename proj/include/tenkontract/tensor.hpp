#pragma once

#include "tenkontract/precision.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace tenkontract {

using Complex = std::complex<double>;
using Label = int;

/// Dense row-major complex array whose axes are named by bond labels.
class ComplexTensor {
public:
    ComplexTensor() = default;
    ComplexTensor(std::vector<Label> labels, std::vector<std::size_t> dims, std::vector<Complex> data,
                  FormatSpec format = formats::fp64());

    /// Tensor with all elements zero.
    static ComplexTensor zeros(std::vector<Label> labels, std::vector<std::size_t> dims);
    static ComplexTensor scalar(Complex value);

    [[nodiscard]] const std::vector<Label>& labels() const noexcept { return labels_; }
    [[nodiscard]] const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    [[nodiscard]] std::size_t rank() const noexcept { return labels_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] std::span<const Complex> data() const noexcept { return data_; }
    [[nodiscard]] std::span<Complex> data() noexcept { return data_; }
    [[nodiscard]] const FormatSpec& format() const noexcept { return format_; }
    void set_format(FormatSpec fmt) { format_ = std::move(fmt); }

    /// Position of a label, or -1.
    [[nodiscard]] int axis_of(Label label) const noexcept;
    [[nodiscard]] bool has_label(Label label) const noexcept { return axis_of(label) >= 0; }
    [[nodiscard]] std::size_t dim_of(Label label) const;
    [[nodiscard]] std::vector<std::size_t> strides() const;

    [[nodiscard]] Complex& at(std::span<const std::size_t> index);
    [[nodiscard]] const Complex& at(std::span<const std::size_t> index) const;

    /// Copy with axes reordered to `order` (a permutation of labels()).
    [[nodiscard]] ComplexTensor permuted(const std::vector<Label>& order) const;
    /// Fixes `label` to `value` and drops that axis.
    [[nodiscard]] ComplexTensor fixed(Label label, std::size_t value) const;
    /// Renames one axis.
    void relabel(Label from, Label to);

private:
    std::vector<Label> labels_;
    std::vector<std::size_t> dims_;
    std::vector<Complex> data_;
    FormatSpec format_ = formats::fp64();
};

/// Generic strided permutation used by TTGT; `perm[i]` is the source axis of
/// destination axis i.
void permute_into(std::span<const Complex> src, const std::vector<std::size_t>& src_dims,
                  const std::vector<std::size_t>& perm, std::span<Complex> dst);

}  // namespace tenkontract
