#pragma once

#include "tenkontract/amplitudes.hpp"
#include "tenkontract/circuit.hpp"
#include "tenkontract/einsum.hpp"
#include "tenkontract/network.hpp"
#include "tenkontract/pathopt.hpp"
#include "tenkontract/precision.hpp"
#include "tenkontract/slicer.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace tenkontract {

/// Batched GEMM view of an einsum: C[b][m][n] = sum_k A[b][m][k] * B[b][k][n].
struct GemmShape {
    std::size_t b = 1;
    std::size_t m = 1;
    std::size_t n = 1;
    std::size_t k = 1;
    bool trans_a = false;   // lhs stored as [K][M]
    bool trans_b = false;   // rhs stored as [N][K]
    bool swap_out = false;  // output stored as [N][M] (operands play swapped roles)
    bool sparse = false;
    /// Sparse only: element offset of each batch's slab in A and B.
    std::vector<std::size_t> a_offsets;
    std::vector<std::size_t> b_offsets;

    [[nodiscard]] double macs() const noexcept {
        return static_cast<double>(b) * static_cast<double>(m) * static_cast<double>(n) * static_cast<double>(k);
    }
};

struct NotFormable {
    std::string reason;
};

using GemmClass = std::variant<GemmShape, NotFormable>;

/// Whether the current operand and output orders admit a (batched) GEMM
/// without any transposition.
[[nodiscard]] GemmClass classify_gemm(const EinsumSpec& spec);
[[nodiscard]] inline bool is_formable(const GemmClass& c) noexcept { return std::holds_alternative<GemmShape>(c); }

/// Multiply-add counter shared by every step of a run.
struct EngineCounters {
    std::atomic<std::uint64_t> macs{0};
};

struct StepPrecision {
    PrecisionSetting setting{};
    FormatSpec accum = formats::fp64();
};

/// One contraction under TTGT: operands are transposed into GEMM layout when
/// needed, multiplied, and the product transposed to `spec.out`.
[[nodiscard]] ComplexTensor execute_step(const ComplexTensor& a, const ComplexTensor& b, const EinsumSpec& spec,
                                         const StepPrecision& precision = {}, EngineCounters* counters = nullptr);

/// Sparse einsum as an indexed batched GEMM: batch c multiplies the A slab at
/// shape.a_offsets[c] with the B slab at shape.b_offsets[c]. Operands must
/// already be in the layout described by `shape`.
[[nodiscard]] ComplexTensor sparse_batched_gemm(const ComplexTensor& a, const ComplexTensor& b,
                                                const EinsumSpec& spec, const GemmShape& shape,
                                                const StepPrecision& precision = {},
                                                EngineCounters* counters = nullptr);

struct ReorderResult {
    ContractionTree tree;
    std::vector<int> reordered;  // step nodes converted, in processing order
    std::vector<int> already_formable;
    std::vector<std::pair<int, std::string>> skipped;
};

/// Reorders operand indices of the k costliest steps so they become GEMMs
/// without touching their own output order; producers re-emit in the needed
/// order. Leaves count as freely reorderable sources.
[[nodiscard]] ReorderResult reorder_topk(const ContractionTree& tree, std::size_t k);

/// Internal node ids sorted by T_cc, largest first (ties: smaller id).
[[nodiscard]] std::vector<int> rank_steps_by_cost(const ContractionTree& tree);

struct PlannedStep {
    int node = -1;
    int left = -1;
    int right = -1;
    EinsumSpec spec;
    GemmClass gemm;
};

/// Everything a subtask needs that does not depend on the slice values: step
/// specs with merge plans, leaf layouts, and the final bitstring alignment.
class ExecutionPlan {
public:
    explicit ExecutionPlan(const ContractionTree& tree);

    [[nodiscard]] const std::vector<PlannedStep>& steps() const noexcept { return steps_; }
    [[nodiscard]] const std::vector<Label>& leaf_order(int leaf) const { return leaf_orders_.at(leaf); }
    [[nodiscard]] std::size_t leaf_count() const noexcept { return leaf_orders_.size(); }
    [[nodiscard]] int root() const noexcept { return root_; }
    [[nodiscard]] double annotated_macs() const noexcept { return annotated_macs_; }
    [[nodiscard]] const std::vector<Bits>& bitstrings() const noexcept { return bitstrings_; }
    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    /// Position in the root tensor's data of each bitstring.
    [[nodiscard]] const std::vector<std::size_t>& root_offsets() const noexcept { return root_offsets_; }

private:
    std::vector<PlannedStep> steps_;
    std::vector<std::vector<Label>> leaf_orders_;
    int root_ = -1;
    double annotated_macs_ = 0.0;
    int n_qubits_ = 0;
    std::vector<Bits> bitstrings_;
    std::vector<std::size_t> root_offsets_;
};

struct StepTiming {
    std::size_t step = 0;
    double tcc = 0.0;
    bool formable = false;
    GemmShape shape{};
    double seconds = 0.0;
};

/// Executes all steps for one slice assignment and returns the root tensor.
[[nodiscard]] ComplexTensor contract_subtask(const TensorNetwork& net, const ExecutionPlan& plan,
                                             const PrecisionSchedule& schedule, const SliceSet& slices,
                                             std::size_t task_index, EngineCounters* counters = nullptr,
                                             std::vector<StepTiming>* timings = nullptr);
[[nodiscard]] ComplexTensor contract_subtask(const TensorNetwork& net, const ContractionTree& tree,
                                             const PrecisionSchedule& schedule, std::size_t task_index);

/// Amplitudes of the plan's bitstrings read off a root tensor.
[[nodiscard]] std::vector<Complex> align_root(const ExecutionPlan& plan, const ComplexTensor& root);

struct RunOptions {
    int workers = 1;
    EngineCounters* counters = nullptr;
    std::vector<StepTiming>* timings = nullptr;  // filled from subtask 0
};

/// Sum over all subtasks (fixed pairwise order, FP64) mapped to bitstrings.
[[nodiscard]] AmplitudeSet run_simulation(const TensorNetwork& net, const ContractionTree& tree,
                                          const SliceSet& slices, const PrecisionSchedule& schedule,
                                          const RunOptions& options = {});
/// Convenience: network from circuit + state, no slicing beyond `slices`.
[[nodiscard]] AmplitudeSet run_simulation(const Circuit& circuit, const SparseState& state,
                                          const ContractionTree& tree, const SliceSet& slices,
                                          const PrecisionSchedule& schedule, const RunOptions& options = {});

[[nodiscard]] nlohmann::json flop_report(const std::vector<StepTiming>& timings);

}  // namespace tenkontract
