#pragma once

#include "tenkontract/bitstring.hpp"

#include <cstddef>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tenkontract {

enum class StateMode { Single, Full, Subspace, Sparse };

/// Final-state boundary condition: the set of output bitstrings whose
/// amplitudes are wanted.
class SparseState {
public:
    /// Single and Sparse take explicit bitstrings; Full takes none.
    static SparseState make(int n_qubits, StateMode mode, const std::vector<std::string>& bitstrings = {});
    static SparseState single(int n_qubits, Bits bitstring);
    static SparseState full(int n_qubits);
    static SparseState sparse(int n_qubits, std::vector<Bits> bitstrings);
    /// Qubits in `open_qubits` range over both values; every other qubit takes
    /// its value from `fixed`.
    static SparseState subspace(int n_qubits, std::vector<int> open_qubits, Bits fixed);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] StateMode mode() const noexcept { return mode_; }
    [[nodiscard]] std::size_t count() const noexcept;
    [[nodiscard]] const std::vector<int>& open_qubits() const noexcept { return open_qubits_; }
    [[nodiscard]] Bits fixed_assignment() const noexcept { return fixed_; }

    /// Sorted, deduplicated bitstrings. Full mode refuses above 30 qubits.
    [[nodiscard]] std::vector<Bits> enumerate() const;

    /// Unique projections onto `qubits` (ascending), in first-occurrence order
    /// over the sorted bitstring list.
    [[nodiscard]] std::vector<Bits> project(const std::vector<int>& qubits) const;
    [[nodiscard]] std::size_t projection_count(const std::vector<int>& qubits) const;

private:
    SparseState(int n_qubits, StateMode mode) : n_qubits_(n_qubits), mode_(mode) {}

    int n_qubits_;
    StateMode mode_;
    std::vector<Bits> bitstrings_;   // Single / Sparse
    std::vector<int> open_qubits_;   // Subspace
    Bits fixed_ = 0;                 // Subspace
};

/// Pairing of two open groups into one merged bond, restricted to the
/// configurations present in the sparse state.
struct MergePlan {
    std::vector<int> qubits_a;
    std::vector<int> qubits_b;
    std::vector<int> merged_qubits;
    /// Joint configs over merged_qubits; position = merged bond index.
    std::vector<Bits> configs;
    /// (row in table A, row in table B) per joint config.
    std::vector<std::pair<std::size_t, std::size_t>> operand_index;

    [[nodiscard]] std::size_t dimension() const noexcept { return configs.size(); }
};

/// `table_a[i]` is the config (over qubits_a) stored at row i of group A.
[[nodiscard]] MergePlan merge_open_groups(const SparseState& state, const std::vector<int>& qubits_a,
                                          const std::vector<int>& qubits_b, const std::vector<Bits>& table_a,
                                          const std::vector<Bits>& table_b);

/// Memoized projections keyed by qubit mask; shared by path search and execution.
class ConfigTableCache {
public:
    explicit ConfigTableCache(SparseState state) : state_(std::move(state)) {}

    [[nodiscard]] const SparseState& state() const noexcept { return state_; }
    [[nodiscard]] std::size_t count(QubitMask mask) const;
    [[nodiscard]] std::vector<Bits> table(QubitMask mask) const;

private:
    SparseState state_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<QubitMask, std::size_t> counts_;
};

}  // namespace tenkontract
