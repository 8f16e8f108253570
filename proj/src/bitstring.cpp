#include "tenkontract/bitstring.hpp"

#include "tenkontract/error.hpp"

namespace tenkontract {

std::vector<int> mask_qubits(QubitMask mask) {
    std::vector<int> out;
    for (int q = 0; mask != 0; ++q, mask >>= 1) {
        if (mask & 1U) out.push_back(q);
    }
    return out;
}

Bits project_bits(Bits value, int n_qubits, const std::vector<int>& qubits) {
    Bits out = 0;
    for (int q : qubits) out = (out << 1) | static_cast<Bits>(bit_of(value, n_qubits, q));
    return out;
}

Bits restrict_config(Bits config, const std::vector<int>& from, const std::vector<int>& to) {
    const int width = static_cast<int>(from.size());
    Bits out = 0;
    std::size_t j = 0;
    for (int i = 0; i < width && j < to.size(); ++i) {
        if (from[i] == to[j]) {
            out = (out << 1) | ((config >> (width - 1 - i)) & 1U);
            ++j;
        }
    }
    if (j != to.size()) throw ValidationError("restrict_config: target qubits are not a subset");
    return out;
}

Bits parse_bitstring(std::string_view text, int n_qubits) {
    if (static_cast<int>(text.size()) != n_qubits) {
        throw ValidationError("bitstring '" + std::string(text) + "' has length " + std::to_string(text.size()) +
                              ", expected " + std::to_string(n_qubits));
    }
    if (n_qubits > kMaxQubits) throw ValidationError("bitstrings longer than 64 qubits are not supported");
    Bits out = 0;
    for (char c : text) {
        if (c != '0' && c != '1') throw ValidationError("bitstring '" + std::string(text) + "' is not binary");
        out = (out << 1) | static_cast<Bits>(c - '0');
    }
    return out;
}

std::string format_bitstring(Bits value, int n_qubits) {
    std::string out(static_cast<std::size_t>(n_qubits), '0');
    for (int q = 0; q < n_qubits; ++q) {
        if (bit_of(value, n_qubits, q)) out[static_cast<std::size_t>(q)] = '1';
    }
    return out;
}

}  // namespace tenkontract
