#include "tenkontract/amplitudes.hpp"

#include "tenkontract/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace tenkontract {

AmplitudeSet AmplitudeSet::expand(const std::vector<Bits>& samples) const {
    std::unordered_map<Bits, Complex> lookup;
    for (const auto& e : entries) lookup.emplace(e.bitstring, e.amplitude);
    AmplitudeSet out;
    out.n_qubits = n_qubits;
    out.entries.reserve(samples.size());
    for (Bits b : samples) {
        auto it = lookup.find(b);
        if (it == lookup.end()) throw ValidationError("no amplitude for bitstring " + format_bitstring(b, n_qubits));
        out.entries.push_back({b, it->second});
    }
    return out;
}

std::string format_amplitudes(const AmplitudeSet& amps) {
    std::string out;
    char buf[96];
    for (const auto& e : amps.entries) {
        std::snprintf(buf, sizeof(buf), " %.17g %.17g\n", e.amplitude.real(), e.amplitude.imag());
        out += format_bitstring(e.bitstring, amps.n_qubits);
        out += buf;
    }
    return out;
}

namespace {

std::string strip_comment(std::string line) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    return line;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

}  // namespace

AmplitudeSet parse_amplitudes(const std::string& text) {
    AmplitudeSet out;
    std::istringstream in(text);
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        std::istringstream fields(strip_comment(line));
        std::string bits;
        if (!(fields >> bits)) continue;
        double re = 0.0;
        double im = 0.0;
        std::string extra;
        if (!(fields >> re >> im) || (fields >> extra)) throw ParseError(line_no, "expected '<bitstring> <re> <im>'");
        if (out.n_qubits == 0) out.n_qubits = static_cast<int>(bits.size());
        try {
            out.entries.push_back({parse_bitstring(bits, out.n_qubits), {re, im}});
        } catch (const ValidationError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return out;
}

void save_amplitudes(const AmplitudeSet& amps, const std::string& path) { write_file(path, format_amplitudes(amps)); }

AmplitudeSet load_amplitudes(const std::string& path) { return parse_amplitudes(read_file(path)); }

std::vector<Bits> parse_bitstrings(const std::string& text, int& n_qubits) {
    std::vector<Bits> out;
    std::istringstream in(text);
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        std::istringstream fields(strip_comment(line));
        std::string bits;
        if (!(fields >> bits)) continue;
        std::string extra;
        if (fields >> extra) throw ParseError(line_no, "expected one bitstring per line");
        if (n_qubits <= 0) n_qubits = static_cast<int>(bits.size());
        try {
            out.push_back(parse_bitstring(bits, n_qubits));
        } catch (const ValidationError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    if (out.empty()) throw ParseError("bitstring file holds no bitstrings");
    return out;
}

std::vector<Bits> load_bitstrings(const std::string& path, int& n_qubits) {
    return parse_bitstrings(read_file(path), n_qubits);
}

void save_bitstrings(const std::vector<Bits>& bits, int n_qubits, const std::string& path) {
    std::string text;
    for (Bits b : bits) text += format_bitstring(b, n_qubits) + "\n";
    write_file(path, text);
}

}  // namespace tenkontract
