#pragma once

#include "tenkontract/tensor.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace tenkontract {

enum class GateKind { SqrtX, SqrtY, SqrtW, Fsim, CustomUnitary };

[[nodiscard]] std::string_view gate_keyword(GateKind kind) noexcept;

/// A one- or two-qubit gate. Fsim carries (theta, phi); CustomUnitary carries
/// its matrix (row-major, 2x2 or 4x4).
class Gate {
public:
    static Gate sqrt_x(int qubit) { return Gate(GateKind::SqrtX, {qubit}); }
    static Gate sqrt_y(int qubit) { return Gate(GateKind::SqrtY, {qubit}); }
    static Gate sqrt_w(int qubit) { return Gate(GateKind::SqrtW, {qubit}); }
    static Gate fsim(int q0, int q1, double theta, double phi);
    static Gate custom(std::vector<int> qubits, std::vector<Complex> matrix);

    [[nodiscard]] GateKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::vector<int>& qubits() const noexcept { return qubits_; }
    [[nodiscard]] std::size_t arity() const noexcept { return qubits_.size(); }
    [[nodiscard]] double theta() const noexcept { return theta_; }
    [[nodiscard]] double phi() const noexcept { return phi_; }
    [[nodiscard]] const std::vector<Complex>& custom_matrix() const noexcept { return matrix_; }

    /// Row-major unitary: 2x2 for one qubit, 4x4 for two (first qubit is the
    /// more significant index).
    [[nodiscard]] std::vector<Complex> matrix() const;

    friend bool operator==(const Gate&, const Gate&) = default;

private:
    Gate(GateKind kind, std::vector<int> qubits);

    GateKind kind_;
    std::vector<int> qubits_;
    double theta_ = 0.0;
    double phi_ = 0.0;
    std::vector<Complex> matrix_;
};

using Layer = std::vector<Gate>;

class Circuit {
public:
    explicit Circuit(int n_qubits);
    Circuit(int n_qubits, std::vector<Layer> layers);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] const std::vector<Layer>& layers() const noexcept { return layers_; }
    [[nodiscard]] std::size_t gate_count() const noexcept;

    /// Appends a layer after checking qubit ranges and overlap.
    void add_layer(Layer layer);

    friend bool operator==(const Circuit&, const Circuit&) = default;

private:
    int n_qubits_;
    std::vector<Layer> layers_;
};

[[nodiscard]] Circuit parse_circuit(std::string_view text);
[[nodiscard]] std::string serialize_circuit(const Circuit& circuit);
[[nodiscard]] nlohmann::json circuit_to_json(const Circuit& circuit);
[[nodiscard]] Circuit circuit_from_json(const nlohmann::json& doc);
/// Reads either format: JSON when the first non-blank character is '{'.
[[nodiscard]] Circuit load_circuit(const std::string& path);
void save_circuit(const Circuit& circuit, const std::string& path);

using Coupler = std::pair<int, int>;
using CouplerPattern = std::vector<Coupler>;

struct GeneratorOptions {
    double fsim_theta = 1.5707963267948966;  // pi/2
    double fsim_phi = 0.5235987755982988;    // pi/6
    bool avoid_repeats = true;  // never repeat a qubit's previous single-qubit gate
};

/// n_cycles cycles of (random single-qubit layer, fsim layer on
/// patterns[cycle % patterns.size()]).
[[nodiscard]] Circuit generate_random_circuit(int n_qubits, int n_cycles, const std::vector<CouplerPattern>& patterns,
                                              std::uint64_t seed, const GeneratorOptions& options = {});

/// Four alternating nearest-neighbour patterns on a rows x cols grid:
/// horizontal even/odd bonds, then vertical even/odd bonds.
[[nodiscard]] std::vector<CouplerPattern> grid_patterns(int rows, int cols);

/// Rank-2 (out, in) or rank-4 (out0, out1, in0, in1) tensor with the given
/// labels.
[[nodiscard]] ComplexTensor gate_tensor(const Gate& gate, std::vector<Label> labels);
/// Same with default labels 0..rank-1.
[[nodiscard]] ComplexTensor gate_tensor(const Gate& gate);

}  // namespace tenkontract
