#pragma once

#include "tenkontract/amplitudes.hpp"
#include "tenkontract/circuit.hpp"

#include <cstdint>
#include <vector>

namespace tenkontract {

inline constexpr int kOracleMaxQubits = 24;

/// Full 2^N state after applying every layer to |0...0>, in FP64.
[[nodiscard]] std::vector<Complex> statevector(const Circuit& circuit);

[[nodiscard]] AmplitudeSet amplitudes_for(const Circuit& circuit, const std::vector<Bits>& bitstrings);
[[nodiscard]] AmplitudeSet amplitudes_for(const std::vector<Complex>& state, int n_qubits,
                                          const std::vector<Bits>& bitstrings);

/// m samples; each is drawn from |psi|^2 with probability f and uniformly
/// otherwise.
[[nodiscard]] std::vector<Bits> sample(const Circuit& circuit, std::size_t m, double fidelity, std::uint64_t seed);
[[nodiscard]] std::vector<Bits> sample(const std::vector<Complex>& state, int n_qubits, std::size_t m,
                                       double fidelity, std::uint64_t seed);

}  // namespace tenkontract
