#include "tenkontract/network.hpp"

#include "tenkontract/error.hpp"

#include <algorithm>
#include <set>

namespace tenkontract {

const Bond& TensorNetwork::bond(Label id) const {
    auto it = bonds.find(id);
    if (it == bonds.end()) throw ValidationError("no bond " + std::to_string(id));
    return it->second;
}

Label TensorNetwork::next_label() const { return bonds.empty() ? 0 : bonds.rbegin()->first + 1; }

TensorNetwork circuit_to_network(const Circuit& circuit, const SparseState& state) {
    if (state.n_qubits() != circuit.n_qubits()) {
        throw ValidationError("state has " + std::to_string(state.n_qubits()) + " qubits, circuit has " +
                              std::to_string(circuit.n_qubits()));
    }
    return circuit_to_network(circuit);
}

TensorNetwork circuit_to_network(const Circuit& circuit) {
    TensorNetwork net;
    net.n_qubits = circuit.n_qubits();
    Label next = 0;
    std::vector<Label> frontier(static_cast<std::size_t>(net.n_qubits));
    auto new_bond = [&](int tensor) {
        Bond b;
        b.id = next++;
        b.endpoints = {tensor};
        net.bonds.emplace(b.id, b);
        return b.id;
    };
    for (int q = 0; q < net.n_qubits; ++q) {
        const int tid = static_cast<int>(net.tensors.size());
        const Label l = new_bond(tid);
        net.tensors.emplace_back(std::vector<Label>{l}, std::vector<std::size_t>{2}, std::vector<Complex>{1.0, 0.0});
        frontier[static_cast<std::size_t>(q)] = l;
    }
    for (const auto& layer : circuit.layers()) {
        for (const auto& gate : layer) {
            const int tid = static_cast<int>(net.tensors.size());
            std::vector<Label> outs;
            std::vector<Label> ins;
            for (int q : gate.qubits()) {
                const Label in = frontier[static_cast<std::size_t>(q)];
                net.bonds.at(in).endpoints.push_back(tid);
                ins.push_back(in);
                outs.push_back(new_bond(tid));
                frontier[static_cast<std::size_t>(q)] = outs.back();
            }
            std::vector<Label> labels = outs;
            labels.insert(labels.end(), ins.begin(), ins.end());
            net.tensors.push_back(gate_tensor(gate, labels));
        }
    }
    for (int q = 0; q < net.n_qubits; ++q) {
        Bond& b = net.bonds.at(frontier[static_cast<std::size_t>(q)]);
        b.open = true;
        b.qubit = q;
        net.open_bonds.push_back(b.id);
    }
    return net;
}

std::vector<std::string> validate_network(const TensorNetwork& net) {
    std::vector<std::string> issues;
    const auto n_tensors = static_cast<int>(net.tensors.size());
    for (int t = 0; t < n_tensors; ++t) {
        const auto& tensor = net.tensors[static_cast<std::size_t>(t)];
        for (std::size_t axis = 0; axis < tensor.rank(); ++axis) {
            const Label l = tensor.labels()[axis];
            auto it = net.bonds.find(l);
            if (it == net.bonds.end()) {
                issues.push_back("tensor " + std::to_string(t) + " references missing bond " + std::to_string(l));
                continue;
            }
            const Bond& b = it->second;
            if (std::find(b.endpoints.begin(), b.endpoints.end(), t) == b.endpoints.end()) {
                issues.push_back("bond " + std::to_string(l) + " does not list tensor " + std::to_string(t));
            }
            if (b.dim != tensor.dims()[axis]) {
                issues.push_back("bond " + std::to_string(l) + " has dim " + std::to_string(b.dim) + " but tensor " +
                                 std::to_string(t) + " uses " + std::to_string(tensor.dims()[axis]));
            }
        }
    }
    std::set<Label> open_listed(net.open_bonds.begin(), net.open_bonds.end());
    for (const auto& [id, b] : net.bonds) {
        const std::string name = "bond " + std::to_string(id);
        if (b.id != id) issues.push_back(name + " stored under a different id");
        if (b.dim == 0) issues.push_back(name + " has zero dimension");
        const std::size_t expected = b.open ? 1 : 2;
        if (b.endpoints.size() != expected) {
            issues.push_back(name + " has " + std::to_string(b.endpoints.size()) + " endpoints, expected " +
                             std::to_string(expected));
        }
        for (int t : b.endpoints) {
            if (t < 0 || t >= n_tensors) {
                issues.push_back(name + " lists missing tensor " + std::to_string(t));
            } else if (!b.sliced && !net.tensors[static_cast<std::size_t>(t)].has_label(id)) {
                issues.push_back(name + " lists tensor " + std::to_string(t) + " which does not carry it");
            }
        }
        if (b.open && (b.qubit < 0 || b.qubit >= net.n_qubits)) issues.push_back(name + " is open without a qubit tag");
        if (b.open && b.sliced) issues.push_back(name + " is open and sliced");
        if (b.open != (open_listed.count(id) == 1)) issues.push_back(name + " open flag disagrees with open-bond list");
    }
    for (std::size_t i = 1; i < net.open_bonds.size(); ++i) {
        auto a = net.bonds.find(net.open_bonds[i - 1]);
        auto b = net.bonds.find(net.open_bonds[i]);
        if (a != net.bonds.end() && b != net.bonds.end() && a->second.qubit >= b->second.qubit) {
            issues.push_back("open bonds are not ordered by qubit");
        }
    }
    return issues;
}

nlohmann::json network_to_json(const TensorNetwork& net) {
    nlohmann::json tensors = nlohmann::json::array();
    for (std::size_t t = 0; t < net.tensors.size(); ++t) {
        tensors.push_back({{"id", t}, {"labels", net.tensors[t].labels()}, {"dims", net.tensors[t].dims()}});
    }
    nlohmann::json bonds = nlohmann::json::array();
    for (const auto& [id, b] : net.bonds) {
        nlohmann::json jb{{"id", id}, {"dim", b.dim}, {"endpoints", b.endpoints}, {"open", b.open}};
        jb["qubit"] = b.open ? nlohmann::json(b.qubit) : nlohmann::json(nullptr);
        if (b.sliced) jb["sliced"] = true;
        bonds.push_back(jb);
    }
    return {{"n_qubits", net.n_qubits}, {"tensors", tensors}, {"bonds", bonds}};
}

}  // namespace tenkontract
