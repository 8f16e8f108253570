#pragma once

// Shared fixtures and independent reference implementations for the tests.

#include "tenkontract/circuit.hpp"
#include "tenkontract/network.hpp"
#include "tenkontract/pathopt.hpp"
#include "tenkontract/sparse_state.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace tktest {

using namespace tenkontract;

/// Network from explicit leaf label lists. Labels listed in `open` become open
/// bonds (dim 2) tagged with qubits 0, 1, ... in list order; every other label
/// must appear on exactly two leaves. Data is random normal.
TensorNetwork make_network(const std::vector<std::vector<Label>>& leaves, const std::map<Label, std::size_t>& dims,
                           const std::vector<Label>& open, std::uint64_t seed);

/// Connected random network: spanning tree plus extra edges with probability
/// `extra`, closed bond dims in [2, max_dim], `n_open` open bonds on random leaves.
TensorNetwork random_network(int n_tensors, int n_open, std::size_t max_dim, double extra, std::uint64_t seed);

/// Leaf label lists of a network, by tensor id.
std::vector<std::vector<Label>> leaf_labels(const TensorNetwork& net);

/// Random circuit with random disjoint couplers per pattern.
Circuit random_circuit(int n_qubits, int n_cycles, std::uint64_t seed);

/// Distinct random bitstrings (at most 2^n).
std::vector<Bits> random_bitstrings(int n_qubits, std::size_t count, std::uint64_t seed);

std::shared_ptr<const NetworkShape> shape_of(const TensorNetwork& net, const SparseState& state);

/// Dense einsum by looping over every label assignment (no merges).
ComplexTensor naive_einsum(const ComplexTensor& a, const ComplexTensor& b, const std::vector<Label>& out);

/// Contracts a whole network pairwise in leaf order with naive_einsum; the
/// result carries the open labels sorted by qubit.
ComplexTensor naive_contract_all(const TensorNetwork& net);

struct TreeTotals {
    double macs = 0.0;
    double elements = 0.0;
    double largest = 0.0;
};

/// Totals of every rooted binary contraction tree over the leaves (unordered
/// children), full-state costs: every label keeps its extent.
std::vector<TreeTotals> enumerate_trees(const std::vector<std::vector<Label>>& leaves,
                                        const std::map<Label, std::size_t>& dims, const std::set<Label>& open);

/// log_b(8 macs + alpha 8 elements) + beta log_b(largest), no penalty.
double reference_score(const TreeTotals& t, double alpha, double beta, double log_base = 2.0);

double best_exhaustive_score(const TensorNetwork& net, double alpha, double beta);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace tktest
