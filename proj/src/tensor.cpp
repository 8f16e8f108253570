#include "tenkontract/tensor.hpp"

#include "tenkontract/error.hpp"

#include <algorithm>
#include <numeric>

namespace tenkontract {

namespace {

std::size_t product(const std::vector<std::size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

ComplexTensor::ComplexTensor(std::vector<Label> labels, std::vector<std::size_t> dims, std::vector<Complex> data,
                             FormatSpec format)
    : labels_(std::move(labels)), dims_(std::move(dims)), data_(std::move(data)), format_(std::move(format)) {
    if (labels_.size() != dims_.size()) throw ValidationError("tensor: label and dimension counts differ");
    if (product(dims_) != data_.size()) {
        throw ValidationError("tensor: data size " + std::to_string(data_.size()) + " does not match shape");
    }
    std::vector<Label> sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ValidationError("tensor: repeated label");
    }
}

ComplexTensor ComplexTensor::zeros(std::vector<Label> labels, std::vector<std::size_t> dims) {
    std::vector<Complex> data(product(dims));
    return ComplexTensor(std::move(labels), std::move(dims), std::move(data));
}

ComplexTensor ComplexTensor::scalar(Complex value) { return ComplexTensor({}, {}, {value}); }

int ComplexTensor::axis_of(Label label) const noexcept {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
}

std::size_t ComplexTensor::dim_of(Label label) const {
    const int axis = axis_of(label);
    if (axis < 0) throw ValidationError("tensor has no label " + std::to_string(label));
    return dims_[static_cast<std::size_t>(axis)];
}

std::vector<std::size_t> ComplexTensor::strides() const {
    std::vector<std::size_t> s(dims_.size(), 1);
    for (std::size_t i = dims_.size(); i-- > 1;) s[i - 1] = s[i] * dims_[i];
    return s;
}

Complex& ComplexTensor::at(std::span<const std::size_t> index) {
    return const_cast<Complex&>(std::as_const(*this).at(index));
}

const Complex& ComplexTensor::at(std::span<const std::size_t> index) const {
    if (index.size() != dims_.size()) throw ValidationError("tensor index has wrong rank");
    std::size_t offset = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (index[i] >= dims_[i]) throw ValidationError("tensor index out of range");
        offset = offset * dims_[i] + index[i];
    }
    return data_[offset];
}

void permute_into(std::span<const Complex> src, const std::vector<std::size_t>& src_dims,
                  const std::vector<std::size_t>& perm, std::span<Complex> dst) {
    const std::size_t rank = src_dims.size();
    if (perm.size() != rank || src.size() != dst.size()) throw ValidationError("permute: shape mismatch");
    std::vector<std::size_t> src_strides(rank, 1);
    for (std::size_t i = rank; i-- > 1;) src_strides[i - 1] = src_strides[i] * src_dims[i];
    if (rank == 0) {
        if (!src.empty()) dst[0] = src[0];
        return;
    }
    std::vector<std::size_t> dims(rank), strides(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        dims[i] = src_dims[perm[i]];
        strides[i] = src_strides[perm[i]];
    }
    // Innermost destination axis is walked in a tight loop.
    const std::size_t inner = dims[rank - 1];
    const std::size_t inner_stride = strides[rank - 1];
    std::vector<std::size_t> idx(rank, 0);
    std::size_t src_off = 0;
    for (std::size_t out = 0; out < dst.size(); out += inner) {
        for (std::size_t j = 0; j < inner; ++j) dst[out + j] = src[src_off + j * inner_stride];
        for (std::size_t ax = rank - 1; ax-- > 0;) {
            if (++idx[ax] < dims[ax]) {
                src_off += strides[ax];
                break;
            }
            src_off -= strides[ax] * (dims[ax] - 1);
            idx[ax] = 0;
        }
    }
}

ComplexTensor ComplexTensor::permuted(const std::vector<Label>& order) const {
    if (order.size() != labels_.size()) throw ValidationError("permute: order has wrong rank");
    if (order == labels_) return *this;
    std::vector<std::size_t> perm(order.size());
    std::vector<std::size_t> new_dims(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const int axis = axis_of(order[i]);
        if (axis < 0) throw ValidationError("permute: unknown label " + std::to_string(order[i]));
        perm[i] = static_cast<std::size_t>(axis);
        new_dims[i] = dims_[perm[i]];
    }
    std::vector<Complex> out(data_.size());
    permute_into(data_, dims_, perm, out);
    return ComplexTensor(order, std::move(new_dims), std::move(out), format_);
}

ComplexTensor ComplexTensor::fixed(Label label, std::size_t value) const {
    const int axis = axis_of(label);
    if (axis < 0) throw ValidationError("fix: tensor has no label " + std::to_string(label));
    const auto ax = static_cast<std::size_t>(axis);
    if (value >= dims_[ax]) throw ValidationError("fix: value out of range for label " + std::to_string(label));
    std::size_t outer = 1;
    for (std::size_t i = 0; i < ax; ++i) outer *= dims_[i];
    std::size_t inner = 1;
    for (std::size_t i = ax + 1; i < dims_.size(); ++i) inner *= dims_[i];
    std::vector<Complex> out(outer * inner);
    for (std::size_t o = 0; o < outer; ++o) {
        const Complex* from = data_.data() + (o * dims_[ax] + value) * inner;
        std::copy(from, from + inner, out.begin() + static_cast<std::ptrdiff_t>(o * inner));
    }
    auto labels = labels_;
    auto dims = dims_;
    labels.erase(labels.begin() + axis);
    dims.erase(dims.begin() + axis);
    return ComplexTensor(std::move(labels), std::move(dims), std::move(out), format_);
}

void ComplexTensor::relabel(Label from, Label to) {
    const int axis = axis_of(from);
    if (axis < 0) throw ValidationError("relabel: tensor has no label " + std::to_string(from));
    if (from != to && has_label(to)) throw ValidationError("relabel: label already present");
    labels_[static_cast<std::size_t>(axis)] = to;
}

}  // namespace tenkontract
