#include "tenkontract/circuit.hpp"

#include "tenkontract/bitstring.hpp"
#include "tenkontract/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

namespace tenkontract {

namespace {

constexpr double kUnitaryTolerance = 1e-8;

double unitarity_deviation(const std::vector<Complex>& u, std::size_t dim) {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            Complex acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) acc += u[i * dim + k] * std::conj(u[j * dim + k]);
            worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<Complex> sqrt_pauli(Complex p00, Complex p01, Complex p10, Complex p11) {
    // ((1+i) I + (1-i) P) / 2 squares to P for any involutory P.
    const Complex a(0.5, 0.5);
    const Complex b(0.5, -0.5);
    return {a + b * p00, b * p01, b * p10, a + b * p11};
}

}  // namespace

std::string_view gate_keyword(GateKind kind) noexcept {
    switch (kind) {
        case GateKind::SqrtX: return "sx";
        case GateKind::SqrtY: return "sy";
        case GateKind::SqrtW: return "sw";
        case GateKind::Fsim: return "fsim";
        case GateKind::CustomUnitary: return "u";
    }
    return "?";
}

Gate::Gate(GateKind kind, std::vector<int> qubits) : kind_(kind), qubits_(std::move(qubits)) {
    for (int q : qubits_) {
        if (q < 0) throw ValidationError("negative qubit index " + std::to_string(q));
    }
    if (qubits_.size() == 2 && qubits_[0] == qubits_[1]) {
        throw ValidationError("two-qubit gate acts twice on qubit " + std::to_string(qubits_[0]));
    }
}

Gate Gate::fsim(int q0, int q1, double theta, double phi) {
    Gate g(GateKind::Fsim, {q0, q1});
    if (!std::isfinite(theta) || !std::isfinite(phi)) throw ValidationError("fsim parameters must be finite");
    g.theta_ = theta;
    g.phi_ = phi;
    return g;
}

Gate Gate::custom(std::vector<int> qubits, std::vector<Complex> matrix) {
    const std::size_t dim = std::size_t{1} << qubits.size();
    if (qubits.empty() || qubits.size() > 2) throw ValidationError("custom gate must act on 1 or 2 qubits");
    if (matrix.size() != dim * dim) {
        throw ValidationError("custom gate on " + std::to_string(qubits.size()) + " qubit(s) needs " +
                              std::to_string(dim * dim) + " matrix entries");
    }
    if (unitarity_deviation(matrix, dim) > kUnitaryTolerance) throw ValidationError("custom gate is not unitary");
    Gate g(GateKind::CustomUnitary, std::move(qubits));
    g.matrix_ = std::move(matrix);
    return g;
}

std::vector<Complex> Gate::matrix() const {
    const Complex i(0.0, 1.0);
    const double r = 1.0 / std::sqrt(2.0);
    switch (kind_) {
        case GateKind::SqrtX: return sqrt_pauli(0.0, 1.0, 1.0, 0.0);
        case GateKind::SqrtY: return sqrt_pauli(0.0, -i, i, 0.0);
        case GateKind::SqrtW: return sqrt_pauli(0.0, r * (1.0 - i), r * (1.0 + i), 0.0);
        case GateKind::Fsim: {
            const double c = std::cos(theta_);
            const Complex s = -i * std::sin(theta_);
            return {1.0, 0.0, 0.0, 0.0, 0.0, c, s, 0.0, 0.0, s, c, 0.0, 0.0, 0.0, 0.0, std::exp(-i * phi_)};
        }
        case GateKind::CustomUnitary: return matrix_;
    }
    return {};
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits <= 0) throw ValidationError("circuit needs at least one qubit");
    if (n_qubits > kMaxQubits) throw ValidationError("at most 64 qubits are supported");
}

Circuit::Circuit(int n_qubits, std::vector<Layer> layers) : Circuit(n_qubits) {
    for (auto& layer : layers) add_layer(std::move(layer));
}

std::size_t Circuit::gate_count() const noexcept {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += layer.size();
    return n;
}

void Circuit::add_layer(Layer layer) {
    const std::size_t index = layers_.size();
    std::vector<bool> used(static_cast<std::size_t>(n_qubits_), false);
    for (const auto& gate : layer) {
        for (int q : gate.qubits()) {
            if (q >= n_qubits_) {
                throw ValidationError("qubit " + std::to_string(q) + " out of range in layer " + std::to_string(index));
            }
            if (used[static_cast<std::size_t>(q)]) {
                throw ValidationError("qubit " + std::to_string(q) + " used twice in layer " + std::to_string(index));
            }
            used[static_cast<std::size_t>(q)] = true;
        }
    }
    layers_.push_back(std::move(layer));
}

namespace {

template <class T>
T parse_number(const std::string& token, std::size_t line, const char* what) {
    T value{};
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw ParseError(line, std::string("expected ") + what + ", got '" + token + "'");
    }
    return value;
}

std::vector<std::string> split_tokens(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

Gate parse_gate(const std::vector<std::string>& t, std::size_t line) {
    const std::string& kw = t[1];
    auto qubit = [&](std::size_t pos) { return parse_number<int>(t.at(pos), line, "qubit index"); };
    try {
        if (kw == "sx" || kw == "sy" || kw == "sw") {
            if (t.size() != 3) throw ParseError(line, kw + " takes exactly one qubit");
            const int q = qubit(2);
            if (kw == "sx") return Gate::sqrt_x(q);
            if (kw == "sy") return Gate::sqrt_y(q);
            return Gate::sqrt_w(q);
        }
        if (kw == "fsim") {
            if (t.size() != 4 && t.size() != 6) throw ParseError(line, "fsim takes two qubits and optional theta phi");
            GeneratorOptions defaults;
            const double theta = t.size() == 6 ? parse_number<double>(t[4], line, "theta") : defaults.fsim_theta;
            const double phi = t.size() == 6 ? parse_number<double>(t[5], line, "phi") : defaults.fsim_phi;
            return Gate::fsim(qubit(2), qubit(3), theta, phi);
        }
        if (kw == "u") {
            const std::size_t rest = t.size() - 2;
            std::size_t arity = 0;
            if (rest == 1 + 8) arity = 1;
            else if (rest == 2 + 32) arity = 2;
            else throw ParseError(line, "u expects 1 qubit + 8 reals or 2 qubits + 32 reals");
            std::vector<int> qs;
            for (std::size_t k = 0; k < arity; ++k) qs.push_back(qubit(2 + k));
            std::vector<Complex> m;
            for (std::size_t k = 2 + arity; k < t.size(); k += 2) {
                m.emplace_back(parse_number<double>(t[k], line, "matrix entry"),
                               parse_number<double>(t[k + 1], line, "matrix entry"));
            }
            return Gate::custom(std::move(qs), std::move(m));
        }
    } catch (const ValidationError& e) {
        throw ValidationError("line " + std::to_string(line) + ": " + e.what());
    }
    throw ParseError(line, "unknown gate '" + kw + "'");
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::optional<int> n_qubits;
    std::map<long, Layer> layers;
    std::map<long, std::size_t> first_line;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto tokens = split_tokens(line);
        if (tokens.empty()) continue;
        if (!n_qubits) {
            if (tokens.size() != 1) throw ParseError(line_no, "first line must hold the qubit count");
            n_qubits = parse_number<int>(tokens[0], line_no, "qubit count");
            if (*n_qubits <= 0 || *n_qubits > kMaxQubits) throw ParseError(line_no, "qubit count out of range");
            continue;
        }
        if (tokens.size() < 3) throw ParseError(line_no, "expected '<cycle> <gate> <qubit> ...'");
        const long cycle = parse_number<long>(tokens[0], line_no, "cycle index");
        if (cycle < 0) throw ParseError(line_no, "negative cycle index");
        layers[cycle].push_back(parse_gate(tokens, line_no));
        first_line.emplace(cycle, line_no);
    }
    if (!n_qubits) throw ParseError(line_no, "empty circuit file");
    Circuit circuit(*n_qubits);
    for (auto& [cycle, layer] : layers) {
        try {
            Layer checked;
            std::vector<bool> used(static_cast<std::size_t>(*n_qubits), false);
            for (auto& g : layer) {
                for (int q : g.qubits()) {
                    if (q >= *n_qubits) throw ValidationError("qubit " + std::to_string(q) + " out of range");
                    if (used[static_cast<std::size_t>(q)]) {
                        throw ValidationError("qubit " + std::to_string(q) + " used twice in layer " +
                                              std::to_string(cycle));
                    }
                    used[static_cast<std::size_t>(q)] = true;
                }
                checked.push_back(std::move(g));
            }
            circuit.add_layer(std::move(checked));
        } catch (const ValidationError& e) {
            throw ValidationError(std::string(e.what()) + " (layer starting at line " +
                                  std::to_string(first_line[cycle]) + ")");
        }
    }
    return circuit;
}

std::string serialize_circuit(const Circuit& circuit) {
    std::string out = std::to_string(circuit.n_qubits()) + "\n";
    for (std::size_t li = 0; li < circuit.layers().size(); ++li) {
        for (const auto& g : circuit.layers()[li]) {
            out += std::to_string(li) + " " + std::string(gate_keyword(g.kind()));
            for (int q : g.qubits()) out += " " + std::to_string(q);
            if (g.kind() == GateKind::Fsim) out += " " + format_double(g.theta()) + " " + format_double(g.phi());
            if (g.kind() == GateKind::CustomUnitary) {
                for (const auto& z : g.custom_matrix()) out += " " + format_double(z.real()) + " " + format_double(z.imag());
            }
            out += "\n";
        }
    }
    return out;
}

nlohmann::json circuit_to_json(const Circuit& circuit) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : circuit.layers()) {
        nlohmann::json jl = nlohmann::json::array();
        for (const auto& g : layer) {
            nlohmann::json jg{{"kind", gate_keyword(g.kind())}, {"qubits", g.qubits()}};
            if (g.kind() == GateKind::Fsim) jg["params"] = {g.theta(), g.phi()};
            if (g.kind() == GateKind::CustomUnitary) {
                nlohmann::json m = nlohmann::json::array();
                for (const auto& z : g.custom_matrix()) m.push_back({z.real(), z.imag()});
                jg["matrix"] = m;
            }
            jl.push_back(jg);
        }
        layers.push_back(jl);
    }
    return {{"n_qubits", circuit.n_qubits()}, {"layers", layers}};
}

Circuit circuit_from_json(const nlohmann::json& doc) {
    try {
        Circuit circuit(doc.at("n_qubits").get<int>());
        for (const auto& jl : doc.at("layers")) {
            Layer layer;
            for (const auto& jg : jl) {
                const auto kind = jg.at("kind").get<std::string>();
                const auto qubits = jg.at("qubits").get<std::vector<int>>();
                auto need = [&](std::size_t n) {
                    if (qubits.size() != n) throw ValidationError(kind + " gate needs " + std::to_string(n) + " qubit(s)");
                };
                if (kind == "sx" || kind == "sy" || kind == "sw") {
                    need(1);
                    layer.push_back(kind == "sx" ? Gate::sqrt_x(qubits[0])
                                    : kind == "sy" ? Gate::sqrt_y(qubits[0])
                                                   : Gate::sqrt_w(qubits[0]));
                } else if (kind == "fsim") {
                    need(2);
                    GeneratorOptions d;
                    std::vector<double> p{d.fsim_theta, d.fsim_phi};
                    if (jg.contains("params")) p = jg.at("params").get<std::vector<double>>();
                    if (p.size() != 2) throw ValidationError("fsim params must be [theta, phi]");
                    layer.push_back(Gate::fsim(qubits[0], qubits[1], p[0], p[1]));
                } else if (kind == "u") {
                    std::vector<Complex> m;
                    for (const auto& z : jg.at("matrix")) m.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
                    layer.push_back(Gate::custom(qubits, std::move(m)));
                } else {
                    throw ParseError("unknown gate kind '" + kind + "'");
                }
            }
            circuit.add_layer(std::move(layer));
        }
        return circuit;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("circuit JSON: ") + e.what());
    }
}

Circuit load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open circuit file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("circuit JSON: ") + e.what());
        }
        return circuit_from_json(doc);
    }
    return parse_circuit(text);
}

void save_circuit(const Circuit& circuit, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write circuit file '" + path + "'");
    const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    out << (json ? circuit_to_json(circuit).dump(2) + "\n" : serialize_circuit(circuit));
}

Circuit generate_random_circuit(int n_qubits, int n_cycles, const std::vector<CouplerPattern>& patterns,
                                std::uint64_t seed, const GeneratorOptions& options) {
    if (patterns.empty()) throw ValidationError("coupler pattern list is empty");
    if (n_cycles < 0) throw ValidationError("cycle count must be non-negative");
    Circuit circuit(n_qubits);
    for (const auto& pattern : patterns) {
        std::vector<bool> used(static_cast<std::size_t>(n_qubits), false);
        for (const auto& [a, b] : pattern) {
            if (a < 0 || b < 0 || a >= n_qubits || b >= n_qubits || a == b) {
                throw ValidationError("coupler (" + std::to_string(a) + "," + std::to_string(b) + ") is invalid");
            }
            if (used[static_cast<std::size_t>(a)] || used[static_cast<std::size_t>(b)]) {
                throw ValidationError("coupler pattern reuses a qubit");
            }
            used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(b)] = true;
        }
    }
    std::mt19937_64 rng(seed);
    std::vector<int> previous(static_cast<std::size_t>(n_qubits), -1);
    for (int cycle = 0; cycle < n_cycles; ++cycle) {
        Layer singles;
        for (int q = 0; q < n_qubits; ++q) {
            int& prev = previous[static_cast<std::size_t>(q)];
            int choice = 0;
            if (options.avoid_repeats && prev >= 0) {
                choice = std::uniform_int_distribution<int>(0, 1)(rng);
                if (choice >= prev) ++choice;
            } else {
                choice = std::uniform_int_distribution<int>(0, 2)(rng);
            }
            prev = choice;
            singles.push_back(choice == 0 ? Gate::sqrt_x(q) : choice == 1 ? Gate::sqrt_y(q) : Gate::sqrt_w(q));
        }
        circuit.add_layer(std::move(singles));
        const auto& pattern = patterns[static_cast<std::size_t>(cycle) % patterns.size()];
        if (pattern.empty()) continue;
        Layer twos;
        for (const auto& [a, b] : pattern) twos.push_back(Gate::fsim(a, b, options.fsim_theta, options.fsim_phi));
        circuit.add_layer(std::move(twos));
    }
    return circuit;
}

std::vector<CouplerPattern> grid_patterns(int rows, int cols) {
    if (rows <= 0 || cols <= 0) throw ValidationError("grid dimensions must be positive");
    auto id = [cols](int r, int c) { return r * cols + c; };
    std::vector<CouplerPattern> out(4);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c + 1 < cols; ++c) out[static_cast<std::size_t>(c % 2)].emplace_back(id(r, c), id(r, c + 1));
    }
    for (int r = 0; r + 1 < rows; ++r) {
        for (int c = 0; c < cols; ++c) out[2 + static_cast<std::size_t>(r % 2)].emplace_back(id(r, c), id(r + 1, c));
    }
    std::erase_if(out, [](const CouplerPattern& p) { return p.empty(); });
    if (out.empty()) throw ValidationError("grid has no couplers");
    return out;
}

ComplexTensor gate_tensor(const Gate& gate, std::vector<Label> labels) {
    const std::size_t rank = 2 * gate.arity();
    if (labels.size() != rank) throw ValidationError("gate tensor needs " + std::to_string(rank) + " labels");
    return ComplexTensor(std::move(labels), std::vector<std::size_t>(rank, 2), gate.matrix());
}

ComplexTensor gate_tensor(const Gate& gate) {
    std::vector<Label> labels(2 * gate.arity());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<Label>(i);
    return gate_tensor(gate, std::move(labels));
}

}  // namespace tenkontract
