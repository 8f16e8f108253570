#pragma once

#include "tenkontract/bitstring.hpp"
#include "tenkontract/tensor.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace tenkontract {

struct AmplitudeEntry {
    Bits bitstring = 0;
    Complex amplitude{};
};

/// Sampled bitstrings with their amplitudes; repeated samples keep their
/// multiplicity.
struct AmplitudeSet {
    int n_qubits = 0;
    std::vector<AmplitudeEntry> entries;

    [[nodiscard]] std::size_t sample_count() const noexcept { return entries.size(); }
    /// Same bitstrings in the given order (with repeats), amplitudes looked up
    /// from this set. Throws ValidationError for unknown bitstrings.
    [[nodiscard]] AmplitudeSet expand(const std::vector<Bits>& samples) const;
};

/// `<bitstring> <re> <im>` per line, 17 significant digits.
[[nodiscard]] std::string format_amplitudes(const AmplitudeSet& amps);
[[nodiscard]] AmplitudeSet parse_amplitudes(const std::string& text);
void save_amplitudes(const AmplitudeSet& amps, const std::string& path);
[[nodiscard]] AmplitudeSet load_amplitudes(const std::string& path);

/// One 0/1 string per line; blank lines and '#' comments skipped. Order and
/// repeats preserved.
[[nodiscard]] std::vector<Bits> parse_bitstrings(const std::string& text, int& n_qubits);
[[nodiscard]] std::vector<Bits> load_bitstrings(const std::string& path, int& n_qubits);
void save_bitstrings(const std::vector<Bits>& bits, int n_qubits, const std::string& path);

}  // namespace tenkontract
