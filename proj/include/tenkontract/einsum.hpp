#pragma once

#include "tenkontract/sparse_state.hpp"
#include "tenkontract/tensor.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tenkontract {

/// Sparse merge of the two operands' open groups into one output label.
struct SparseMerge {
    Label merged_label = -1;
    std::vector<Label> lhs_open;  // in lhs order
    std::vector<Label> rhs_open;  // in rhs order
    std::shared_ptr<const MergePlan> plan;  // null when only costing
};

/// Pairwise contraction C[out] = sum over contracted labels of A[lhs] * B[rhs].
/// Labels in both operands and the output are batch labels; labels in both
/// operands only are contracted. With a sparse merge, the open labels of both
/// operands are replaced in the output by the single merged label.
struct EinsumSpec {
    std::vector<Label> lhs;
    std::vector<Label> rhs;
    std::vector<Label> out;
    std::map<Label, std::size_t> dims;
    std::optional<SparseMerge> merge;

    [[nodiscard]] std::size_t dim(Label label) const;
    [[nodiscard]] std::vector<Label> contracted() const;  // lhs order
    [[nodiscard]] std::vector<Label> batch() const;       // out order
    [[nodiscard]] std::size_t extent(const std::vector<Label>& labels) const;

    /// Checks the label-set rule; throws ValidationError.
    void validate() const;
    /// "a,b,c;c,d->a,b,d" with numeric labels; merged label marked with '*'.
    [[nodiscard]] std::string to_string() const;
};

/// Builds a spec with all dims taken from the operands; out defaults to the
/// lhs free labels followed by the rhs free labels.
[[nodiscard]] EinsumSpec make_spec(const ComplexTensor& a, const ComplexTensor& b,
                                   std::optional<std::vector<Label>> out = std::nullopt);

}  // namespace tenkontract
