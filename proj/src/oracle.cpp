#include "tenkontract/oracle.hpp"

#include "tenkontract/error.hpp"

#include <algorithm>
#include <random>

namespace tenkontract {

std::vector<Complex> statevector(const Circuit& circuit) {
    const int n = circuit.n_qubits();
    if (n > kOracleMaxQubits) {
        throw ResourceError("state-vector oracle is limited to " + std::to_string(kOracleMaxQubits) + " qubits");
    }
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Complex> psi(dim);
    psi[0] = 1.0;
    for (const auto& layer : circuit.layers()) {
        for (const auto& gate : layer) {
            const auto u = gate.matrix();
            if (gate.arity() == 1) {
                const std::size_t bit = std::size_t{1} << (n - 1 - gate.qubits()[0]);
                for (std::size_t i = 0; i < dim; ++i) {
                    if (i & bit) continue;
                    const Complex a0 = psi[i];
                    const Complex a1 = psi[i | bit];
                    psi[i] = u[0] * a0 + u[1] * a1;
                    psi[i | bit] = u[2] * a0 + u[3] * a1;
                }
            } else {
                const std::size_t b0 = std::size_t{1} << (n - 1 - gate.qubits()[0]);
                const std::size_t b1 = std::size_t{1} << (n - 1 - gate.qubits()[1]);
                for (std::size_t i = 0; i < dim; ++i) {
                    if ((i & b0) || (i & b1)) continue;
                    const std::size_t idx[4] = {i, i | b1, i | b0, i | b0 | b1};
                    Complex in[4];
                    for (int r = 0; r < 4; ++r) in[r] = psi[idx[r]];
                    for (int r = 0; r < 4; ++r) {
                        Complex acc = 0.0;
                        for (int c = 0; c < 4; ++c) acc += u[static_cast<std::size_t>(r * 4 + c)] * in[c];
                        psi[idx[r]] = acc;
                    }
                }
            }
        }
    }
    return psi;
}

AmplitudeSet amplitudes_for(const std::vector<Complex>& state, int n_qubits, const std::vector<Bits>& bitstrings) {
    if (state.size() != (std::size_t{1} << n_qubits)) throw ValidationError("state vector size does not match qubits");
    AmplitudeSet out;
    out.n_qubits = n_qubits;
    for (Bits b : bitstrings) {
        if (b >= state.size()) throw ValidationError("bitstring out of range");
        out.entries.push_back({b, state[b]});
    }
    return out;
}

AmplitudeSet amplitudes_for(const Circuit& circuit, const std::vector<Bits>& bitstrings) {
    return amplitudes_for(statevector(circuit), circuit.n_qubits(), bitstrings);
}

std::vector<Bits> sample(const std::vector<Complex>& state, int n_qubits, std::size_t m, double fidelity,
                         std::uint64_t seed) {
    if (state.size() != (std::size_t{1} << n_qubits)) throw ValidationError("state vector size does not match qubits");
    if (!(fidelity >= 0.0 && fidelity <= 1.0)) throw ValidationError("sampling fidelity must lie in [0, 1]");
    std::vector<double> cdf(state.size());
    double total = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        total += std::norm(state[i]);
        cdf[i] = total;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<Bits> uniform(0, state.size() - 1);
    std::vector<Bits> out;
    out.reserve(m);
    for (std::size_t s = 0; s < m; ++s) {
        if (unit(rng) < fidelity) {
            const double r = unit(rng) * total;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
            if (it == cdf.end()) --it;
            out.push_back(static_cast<Bits>(it - cdf.begin()));
        } else {
            out.push_back(uniform(rng));
        }
    }
    return out;
}

std::vector<Bits> sample(const Circuit& circuit, std::size_t m, double fidelity, std::uint64_t seed) {
    return sample(statevector(circuit), circuit.n_qubits(), m, fidelity, seed);
}

}  // namespace tenkontract
