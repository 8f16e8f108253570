#pragma once

#include "tenkontract/einsum.hpp"
#include "tenkontract/network.hpp"
#include "tenkontract/sparse_state.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tenkontract {

struct CostModel {
    double ops_per_element = 8.0;  // complex multiply-add
    double sizeof_data = 8.0;      // complex64

    static CostModel for_format(const FormatSpec& fmt);
};

struct StepCost {
    double tcc = 0.0;  // flops
    double tmc = 0.0;  // bytes
};

/// T_cc = ops * product of all distinct operand extents (contracted counted
/// once, the merged extent replacing the two open groups); T_mc = sizeof *
/// (|A| + |B| + |C|).
[[nodiscard]] StepCost step_cost(const EinsumSpec& spec, const CostModel& model = {});

struct BalancePenalty {
    bool enabled = false;
    double mn_threshold = 32.0;
    double k_threshold = 64.0;
    double weight = 0.05;
};

struct ScoreParams {
    double alpha = 64.0;
    double beta = 1.0;
    double log_base = 2.0;
    BalancePenalty balance{};
    CostModel model{};
};

/// Structural view of a network used by path search: leaf labels, extents,
/// open-bond qubits, sliced bonds, and extents of merged open groups.
class NetworkShape {
public:
    NetworkShape(const TensorNetwork& net, std::shared_ptr<const ConfigTableCache> configs);
    NetworkShape(const NetworkShape& other);
    NetworkShape& operator=(const NetworkShape&) = delete;

    [[nodiscard]] std::size_t leaf_count() const noexcept { return leaf_labels_.size(); }
    [[nodiscard]] const std::vector<Label>& leaf_labels(int leaf) const { return leaf_labels_.at(leaf); }
    [[nodiscard]] std::size_t dim(Label label) const;
    [[nodiscard]] bool is_open(Label label) const;
    [[nodiscard]] bool is_merged(Label label) const { return label >= merged_base_; }
    [[nodiscard]] QubitMask qubit_mask(Label label) const;
    [[nodiscard]] bool is_sliced(Label label) const;
    [[nodiscard]] bool bond_exists(Label label) const;
    [[nodiscard]] const std::vector<Label>& bond_labels() const noexcept { return bond_labels_; }
    [[nodiscard]] const std::vector<Label>& sliced() const noexcept { return sliced_; }
    [[nodiscard]] const ConfigTableCache& configs() const noexcept { return *configs_; }
    [[nodiscard]] std::shared_ptr<const ConfigTableCache> configs_ptr() const noexcept { return configs_; }

    /// Label id standing for the merged open group covering `mask`.
    [[nodiscard]] Label merged_label(QubitMask mask) const;

    /// Copy with one more closed bond sliced (removed from every leaf).
    [[nodiscard]] std::shared_ptr<const NetworkShape> with_slice(Label bond) const;

private:
    std::vector<std::vector<Label>> leaf_labels_;
    std::vector<Label> bond_labels_;
    std::unordered_map<Label, std::size_t> dims_;
    std::unordered_map<Label, int> qubits_;  // open bonds only
    std::vector<Label> sliced_;
    Label merged_base_ = 0;
    std::shared_ptr<const ConfigTableCache> configs_;

    mutable std::mutex mutex_;
    mutable std::unordered_map<QubitMask, Label> merged_by_mask_;
    mutable std::vector<QubitMask> mask_by_merged_;
};

struct TreeNode {
    int left = -1;
    int right = -1;
    int parent = -1;
    std::vector<Label> labels;  // output order
    bool pinned = false;        // order fixed by reorder_topk
    bool merges = false;        // both operands carry open labels
    QubitMask open_mask = 0;
    double size = 1.0;      // output elements
    double macs = 0.0;      // multiply-adds
    double elements = 0.0;  // |A| + |B| + |C|
    double m = 1.0, n = 1.0, k = 1.0;  // GEMM view (free lhs, free rhs, contracted)

    [[nodiscard]] bool is_leaf() const noexcept { return left < 0; }
};

/// Binary contraction tree. Nodes 0..N-1 are the network tensors; after
/// canonicalize(), node N+i is the output of execution step i (post-order).
class ContractionTree {
public:
    /// `steps[i]` names the two node ids contracted at step i; step i creates
    /// node N+i.
    ContractionTree(std::shared_ptr<const NetworkShape> shape, const std::vector<std::pair<int, int>>& steps);

    [[nodiscard]] std::size_t leaf_count() const noexcept { return shape_->leaf_count(); }
    [[nodiscard]] std::size_t step_count() const noexcept { return nodes_.size() - leaf_count(); }
    [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
    [[nodiscard]] int root() const noexcept { return root_; }
    [[nodiscard]] const TreeNode& node(int id) const { return nodes_.at(id); }
    [[nodiscard]] const NetworkShape& shape() const noexcept { return *shape_; }
    [[nodiscard]] std::shared_ptr<const NetworkShape> shape_ptr() const noexcept { return shape_; }

    /// (left, right) per internal node in canonical step order.
    [[nodiscard]] std::vector<std::pair<int, int>> steps() const;
    /// Internal node id of step i; identity offset after canonicalize().
    [[nodiscard]] int step_node(std::size_t step) const { return static_cast<int>(leaf_count() + step); }

    [[nodiscard]] double total_macs() const noexcept { return total_macs_; }
    [[nodiscard]] double total_elements() const noexcept { return total_elements_; }
    [[nodiscard]] double largest_size() const;  // T_sc in elements
    [[nodiscard]] double total_tcc(const CostModel& model = {}) const { return model.ops_per_element * total_macs_; }
    [[nodiscard]] double total_tmc(const CostModel& model = {}) const { return model.sizeof_data * total_elements_; }
    [[nodiscard]] StepCost node_cost(int id, const CostModel& model = {}) const;

    /// Einsum of an internal node using the current label orders.
    [[nodiscard]] EinsumSpec spec(int id) const;

    /// Leaf ids below a node, ascending.
    [[nodiscard]] std::vector<int> leaves_under(int id) const;

    /// Recomputes annotations bottom-up. Pinned orders survive when their label
    /// set is unchanged.
    void reannotate();
    /// Recomputes one internal node from its children and updates totals.
    void annotate(int id);
    /// Fixes the output order of a node (leaf or internal).
    void pin_order(int id, std::vector<Label> order);
    void clear_pins();

    /// Renumbers internal nodes in post-order (left subtree first).
    void canonicalize();
    /// Same tree structure over a different shape (e.g. with more slices).
    [[nodiscard]] ContractionTree with_shape(std::shared_ptr<const NetworkShape> shape) const;

    /// True when internal node ids follow post-order (children before parents).
    [[nodiscard]] bool is_canonical() const;

    // Structural edits used by local_update and the annealer.
    void set_children(int id, int left, int right);
    void restore_nodes(const std::vector<std::pair<int, TreeNode>>& saved, double total_macs, double total_elements);

private:
    ContractionTree() = default;
    std::vector<Label> leaf_order(int leaf) const;
    void compute(int id, TreeNode& out) const;

    std::shared_ptr<const NetworkShape> shape_;
    std::vector<TreeNode> nodes_;
    int root_ = -1;
    double total_macs_ = 0.0;
    double total_elements_ = 0.0;
};

[[nodiscard]] double tree_score(const ContractionTree& tree, const ScoreParams& params);
/// Score from raw totals (T_cc flops, T_mc bytes, T_sc elements), no penalty.
[[nodiscard]] double score_formula(double tcc, double tmc, double tsc, const ScoreParams& params);

/// Repeatedly contracts the connected pair with the smallest result (ties:
/// smaller T_cc, then smaller ids); disconnected parts are joined last.
[[nodiscard]] ContractionTree greedy_init(std::shared_ptr<const NetworkShape> shape);

enum class Pivot { Auto, Left, Right };

/// Associativity move at `node`. For (a*b)*s: direction 0 gives (a*s)*b,
/// direction 1 gives a*(b*s). For s*(a*b): direction 0 gives a*(s*b),
/// direction 1 gives (s*a)*b. Each direction undoes itself on the rotated
/// node. Returns false (tree untouched) when the pivot child is a leaf.
bool local_update(ContractionTree& tree, int node, int direction, Pivot pivot = Pivot::Auto);

struct AnnealSchedule {
    double t0 = 2.0;
    double tmin = 0.02;
    double decay = 0.98;
    int sweeps = 200;

    [[nodiscard]] double temperature(int sweep) const;
};

struct AnnealStep {
    int sweep = 0;
    double temperature = 0.0;
    double delta = 0.0;
    bool accepted = false;
};

/// Simulated annealing over local updates, visiting nodes root to leaves each
/// sweep. Returns the best tree seen (never worse than `init`).
[[nodiscard]] ContractionTree sa_optimize(const ContractionTree& init, const ScoreParams& params,
                                          const AnnealSchedule& schedule, std::uint64_t seed,
                                          std::vector<AnnealStep>* trace = nullptr);
/// Greedy seed followed by annealing.
[[nodiscard]] ContractionTree sa_optimize(std::shared_ptr<const NetworkShape> shape, const ScoreParams& params,
                                          const AnnealSchedule& schedule, std::uint64_t seed);
/// Independent chains with seeds seed, seed+1, ...; best score wins (lowest
/// chain index on ties).
[[nodiscard]] ContractionTree sa_optimize_restarts(std::shared_ptr<const NetworkShape> shape,
                                                   const ScoreParams& params, const AnnealSchedule& schedule,
                                                   std::uint64_t seed, int restarts, int workers = 1);

}  // namespace tenkontract
