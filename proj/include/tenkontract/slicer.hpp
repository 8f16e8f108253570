#pragma once

#include "tenkontract/network.hpp"
#include "tenkontract/pathopt.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace tenkontract {

struct SliceSet {
    std::vector<Label> bonds;        // in slicing order
    std::vector<std::size_t> dims;   // extent of each sliced bond

    [[nodiscard]] std::size_t subtask_count() const;
    [[nodiscard]] bool empty() const noexcept { return bonds.empty(); }
    /// Value of every sliced bond for a subtask; the last sliced bond varies fastest.
    [[nodiscard]] std::vector<std::size_t> assignment(std::size_t task_index) const;
};

/// Peak working set in bytes: max over steps of (|A| + |B| + |C| + max(|A|,|B|))
/// times sizeof_data; the extra operand term is the TTGT transpose scratch.
[[nodiscard]] double peak_memory(const ContractionTree& tree, const CostModel& model = {});

/// Closed, unsliced bond whose removal most reduces T_sc (ties: smaller total
/// T_cc over all subtasks, then smaller id).
[[nodiscard]] Label select_slice_bond(const ContractionTree& tree);

struct SlicedTree {
    TensorNetwork network;
    ContractionTree tree;
};

[[nodiscard]] SlicedTree apply_slice(const TensorNetwork& net, const ContractionTree& tree, Label bond);

struct DynamicSliceOptions {
    double mem_budget = 0.0;  // bytes
    int finetune_sweeps = 30;
    ScoreParams params{};
    std::uint64_t seed = 0;
};

struct DynamicSliceResult {
    TensorNetwork network;
    ContractionTree tree;
    SliceSet slices;
    double peak_bytes = 0.0;
};

/// Slices bonds one at a time, annealing at the minimum temperature after
/// each cut, until peak_memory() fits the budget. Throws ResourceError when
/// no closed bond is left.
[[nodiscard]] DynamicSliceResult dynamic_slice(const TensorNetwork& net, const ContractionTree& tree,
                                               const DynamicSliceOptions& options);

/// Network with every sliced bond fixed to its value for `task_index`.
[[nodiscard]] TensorNetwork subtask_network(const TensorNetwork& net, const SliceSet& slices,
                                            std::size_t task_index);

/// Slice set recorded in a network's bond flags, in the given order.
[[nodiscard]] SliceSet slice_set_of(const TensorNetwork& net, const std::vector<Label>& order);

}  // namespace tenkontract
