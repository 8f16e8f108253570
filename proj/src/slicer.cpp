#include "tenkontract/slicer.hpp"

#include "tenkontract/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace tenkontract {

std::size_t SliceSet::subtask_count() const {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    return n;
}

std::vector<std::size_t> SliceSet::assignment(std::size_t task_index) const {
    if (task_index >= subtask_count()) {
        throw ValidationError("subtask index " + std::to_string(task_index) + " out of range (" +
                              std::to_string(subtask_count()) + " subtasks)");
    }
    std::vector<std::size_t> values(dims.size());
    for (std::size_t i = dims.size(); i-- > 0;) {
        values[i] = task_index % dims[i];
        task_index /= dims[i];
    }
    return values;
}

double peak_memory(const ContractionTree& tree, const CostModel& model) {
    if (tree.step_count() == 0) return tree.largest_size() * model.sizeof_data;
    double peak = 0.0;
    for (std::size_t i = 0; i < tree.step_count(); ++i) {
        const auto& n = tree.node(tree.step_node(i));
        const double a = tree.node(n.left).size;
        const double b = tree.node(n.right).size;
        peak = std::max(peak, a + b + n.size + std::max(a, b));
    }
    return peak * model.sizeof_data;
}

namespace {

std::vector<Label> slice_candidates(const NetworkShape& shape) {
    std::set<Label> present;
    for (std::size_t t = 0; t < shape.leaf_count(); ++t) {
        for (Label l : shape.leaf_labels(static_cast<int>(t))) {
            if (!shape.is_open(l)) present.insert(l);
        }
    }
    return {present.begin(), present.end()};
}

}  // namespace

Label select_slice_bond(const ContractionTree& tree) {
    const auto candidates = slice_candidates(tree.shape());
    if (candidates.empty()) throw ResourceError("no closed bond left to slice");
    const double tsc = tree.largest_size();
    Label best = candidates.front();
    double best_reduction = -1.0;
    double best_tcc = std::numeric_limits<double>::infinity();
    for (Label bond : candidates) {
        const ContractionTree sliced = tree.with_shape(tree.shape().with_slice(bond));
        const double reduction = tsc - sliced.largest_size();
        const double tcc = sliced.total_macs() * static_cast<double>(tree.shape().dim(bond));
        if (reduction > best_reduction || (reduction == best_reduction && tcc < best_tcc)) {
            best = bond;
            best_reduction = reduction;
            best_tcc = tcc;
        }
    }
    return best;
}

SlicedTree apply_slice(const TensorNetwork& net, const ContractionTree& tree, Label bond) {
    auto it = net.bonds.find(bond);
    if (it == net.bonds.end()) throw ValidationError("cannot slice unknown bond " + std::to_string(bond));
    if (it->second.open) throw ValidationError("cannot slice open bond " + std::to_string(bond));
    if (it->second.sliced) throw ValidationError("bond " + std::to_string(bond) + " is already sliced");
    TensorNetwork out = net;
    out.bonds.at(bond).sliced = true;
    return {std::move(out), tree.with_shape(tree.shape().with_slice(bond))};
}

DynamicSliceResult dynamic_slice(const TensorNetwork& net, const ContractionTree& tree,
                                 const DynamicSliceOptions& options) {
    const CostModel& model = options.params.model;
    double largest_leaf = 0.0;
    for (std::size_t t = 0; t < tree.leaf_count(); ++t) {
        largest_leaf = std::max(largest_leaf, tree.node(static_cast<int>(t)).size);
    }
    if (options.mem_budget < largest_leaf * model.sizeof_data) {
        throw ResourceError("memory budget " + std::to_string(options.mem_budget) +
                            " B is below the largest input tensor (" +
                            std::to_string(largest_leaf * model.sizeof_data) + " B)");
    }
    DynamicSliceResult result{net, tree, slice_set_of(net, tree.shape().sliced()), 0.0};
    const AnnealSchedule defaults;
    const AnnealSchedule finetune{defaults.tmin, defaults.tmin, 1.0, options.finetune_sweeps};
    std::uint64_t round = 0;
    while ((result.peak_bytes = peak_memory(result.tree, model)) > options.mem_budget) {
        if (slice_candidates(result.tree.shape()).empty()) {
            throw ResourceError("memory budget unreachable: peak " + std::to_string(result.peak_bytes) +
                                " B with every closed bond sliced");
        }
        const Label bond = select_slice_bond(result.tree);
        auto sliced = apply_slice(result.network, result.tree, bond);
        result.network = std::move(sliced.network);
        result.slices.bonds.push_back(bond);
        result.slices.dims.push_back(result.network.bond(bond).dim);
        result.tree = options.finetune_sweeps > 0
                          ? sa_optimize(sliced.tree, options.params, finetune, options.seed + round)
                          : std::move(sliced.tree);
        ++round;
    }
    return result;
}

TensorNetwork subtask_network(const TensorNetwork& net, const SliceSet& slices, std::size_t task_index) {
    const auto values = slices.assignment(task_index);
    TensorNetwork out = net;
    for (std::size_t i = 0; i < slices.bonds.size(); ++i) {
        Bond& b = out.bonds.at(slices.bonds[i]);
        b.sliced = true;
        for (int t : b.endpoints) {
            auto& tensor = out.tensors.at(static_cast<std::size_t>(t));
            if (tensor.has_label(b.id)) tensor = tensor.fixed(b.id, values[i]);
        }
    }
    return out;
}

SliceSet slice_set_of(const TensorNetwork& net, const std::vector<Label>& order) {
    SliceSet s;
    for (Label l : order) {
        const Bond& b = net.bond(l);
        if (!b.sliced) throw ValidationError("bond " + std::to_string(l) + " is not marked sliced");
        s.bonds.push_back(l);
        s.dims.push_back(b.dim);
    }
    return s;
}

}  // namespace tenkontract
