#pragma once

// Bit-ordering convention used everywhere: qubit 0 is the most significant bit
// of a bitstring index, i.e. the leftmost character of its text form.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tenkontract {

using Bits = std::uint64_t;
using QubitMask = std::uint64_t;

inline constexpr int kMaxQubits = 64;

[[nodiscard]] inline int bit_of(Bits value, int n_qubits, int qubit) noexcept {
    return static_cast<int>((value >> (n_qubits - 1 - qubit)) & 1U);
}

[[nodiscard]] inline QubitMask qubit_bit(int qubit) noexcept {
    return QubitMask{1} << qubit;
}

/// Ascending list of qubits set in a mask.
[[nodiscard]] std::vector<int> mask_qubits(QubitMask mask);

/// Restricts a full bitstring to `qubits` (ascending); the first listed qubit
/// becomes the most significant bit of the result.
[[nodiscard]] Bits project_bits(Bits value, int n_qubits, const std::vector<int>& qubits);

/// Picks the bits of a config over `from` (ascending qubit list) that belong
/// to `to` (an ascending subset of `from`).
[[nodiscard]] Bits restrict_config(Bits config, const std::vector<int>& from, const std::vector<int>& to);

[[nodiscard]] Bits parse_bitstring(std::string_view text, int n_qubits);
[[nodiscard]] std::string format_bitstring(Bits value, int n_qubits);

}  // namespace tenkontract
