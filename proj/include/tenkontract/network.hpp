#pragma once

#include "tenkontract/circuit.hpp"
#include "tenkontract/sparse_state.hpp"
#include "tenkontract/tensor.hpp"

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace tenkontract {

struct Bond {
    Label id = 0;
    std::size_t dim = 2;
    std::vector<int> endpoints;  // tensor ids
    bool open = false;
    int qubit = -1;              // set on open bonds
    bool sliced = false;
};

/// Tensors indexed by id (position) and bonds keyed by label.
struct TensorNetwork {
    int n_qubits = 0;
    std::vector<ComplexTensor> tensors;
    std::map<Label, Bond> bonds;
    std::vector<Label> open_bonds;  // ordered by qubit

    [[nodiscard]] const Bond& bond(Label id) const;
    [[nodiscard]] Label next_label() const;
};

/// One |0> vector per qubit, one tensor per gate, bonds along each worldline;
/// final bonds are left open and tagged with their qubit.
[[nodiscard]] TensorNetwork circuit_to_network(const Circuit& circuit, const SparseState& state);
[[nodiscard]] TensorNetwork circuit_to_network(const Circuit& circuit);

/// Every invariant violation found; empty when the network is well formed.
[[nodiscard]] std::vector<std::string> validate_network(const TensorNetwork& net);

[[nodiscard]] nlohmann::json network_to_json(const TensorNetwork& net);

}  // namespace tenkontract
