#include "support.hpp"

#include "tenkontract/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>

namespace tktest {

TensorNetwork make_network(const std::vector<std::vector<Label>>& leaves, const std::map<Label, std::size_t>& dims,
                           const std::vector<Label>& open, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    TensorNetwork net;
    net.n_qubits = static_cast<int>(open.size());
    for (std::size_t t = 0; t < leaves.size(); ++t) {
        std::vector<std::size_t> shape;
        for (Label l : leaves[t]) {
            shape.push_back(dims.at(l));
            auto& bond = net.bonds[l];
            bond.id = l;
            bond.dim = dims.at(l);
            bond.endpoints.push_back(static_cast<int>(t));
        }
        ComplexTensor tensor = ComplexTensor::zeros(leaves[t], shape);
        for (auto& z : tensor.data()) z = {normal(rng), normal(rng)};
        net.tensors.push_back(std::move(tensor));
    }
    for (std::size_t q = 0; q < open.size(); ++q) {
        auto& bond = net.bonds.at(open[q]);
        bond.open = true;
        bond.qubit = static_cast<int>(q);
        net.open_bonds.push_back(open[q]);
    }
    return net;
}

TensorNetwork random_network(int n_tensors, int n_open, std::size_t max_dim, double extra, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> dim_dist(2, max_dim);
    std::bernoulli_distribution coin(extra);
    std::vector<std::vector<Label>> leaves(static_cast<std::size_t>(n_tensors));
    std::map<Label, std::size_t> dims;
    Label next = 0;
    auto connect = [&](int a, int b) {
        leaves[static_cast<std::size_t>(a)].push_back(next);
        leaves[static_cast<std::size_t>(b)].push_back(next);
        dims[next++] = dim_dist(rng);
    };
    for (int t = 1; t < n_tensors; ++t) {
        connect(std::uniform_int_distribution<int>(0, t - 1)(rng), t);
    }
    for (int a = 0; a < n_tensors; ++a) {
        for (int b = a + 1; b < n_tensors; ++b) {
            if (coin(rng)) connect(a, b);
        }
    }
    std::vector<Label> open;
    for (int q = 0; q < n_open; ++q) {
        const int t = std::uniform_int_distribution<int>(0, n_tensors - 1)(rng);
        leaves[static_cast<std::size_t>(t)].push_back(next);
        dims[next] = 2;
        open.push_back(next++);
    }
    for (auto& labels : leaves) std::shuffle(labels.begin(), labels.end(), rng);
    return make_network(leaves, dims, open, rng());
}

std::vector<std::vector<Label>> leaf_labels(const TensorNetwork& net) {
    std::vector<std::vector<Label>> out;
    for (const auto& t : net.tensors) out.push_back(t.labels());
    return out;
}

Circuit random_circuit(int n_qubits, int n_cycles, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CouplerPattern> patterns;
    for (int p = 0; p < 4; ++p) {
        std::vector<int> order(static_cast<std::size_t>(n_qubits));
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        CouplerPattern pattern;
        for (std::size_t i = 0; i + 1 < order.size(); i += 2) {
            if (pattern.empty() || std::bernoulli_distribution(0.7)(rng)) pattern.emplace_back(order[i], order[i + 1]);
        }
        patterns.push_back(pattern);
    }
    return generate_random_circuit(n_qubits, n_cycles, patterns, rng());
}

std::vector<Bits> random_bitstrings(int n_qubits, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Bits space = Bits{1} << n_qubits;
    count = std::min<std::size_t>(count, space);
    std::set<Bits> picked;
    std::uniform_int_distribution<Bits> dist(0, space - 1);
    while (picked.size() < count) picked.insert(dist(rng));
    std::vector<Bits> out(picked.begin(), picked.end());
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

std::shared_ptr<const NetworkShape> shape_of(const TensorNetwork& net, const SparseState& state) {
    return std::make_shared<const NetworkShape>(net, std::make_shared<const ConfigTableCache>(state));
}

ComplexTensor naive_einsum(const ComplexTensor& a, const ComplexTensor& b, const std::vector<Label>& out) {
    std::vector<Label> all = a.labels();
    for (Label l : b.labels()) {
        if (!a.has_label(l)) all.push_back(l);
    }
    std::map<Label, std::size_t> dims;
    for (std::size_t i = 0; i < a.rank(); ++i) dims[a.labels()[i]] = a.dims()[i];
    for (std::size_t i = 0; i < b.rank(); ++i) dims[b.labels()[i]] = b.dims()[i];
    std::vector<std::size_t> out_dims;
    for (Label l : out) out_dims.push_back(dims.at(l));
    ComplexTensor c = ComplexTensor::zeros(out, out_dims);
    std::map<Label, std::size_t> value;
    std::function<void(std::size_t)> loop = [&](std::size_t depth) {
        if (depth == all.size()) {
            std::vector<std::size_t> ia, ib, ic;
            for (Label l : a.labels()) ia.push_back(value[l]);
            for (Label l : b.labels()) ib.push_back(value[l]);
            for (Label l : out) ic.push_back(value[l]);
            c.at(ic) += a.at(ia) * b.at(ib);
            return;
        }
        for (std::size_t v = 0; v < dims.at(all[depth]); ++v) {
            value[all[depth]] = v;
            loop(depth + 1);
        }
    };
    loop(0);
    return c;
}

ComplexTensor naive_contract_all(const TensorNetwork& net) {
    ComplexTensor acc = ComplexTensor::scalar(1.0);
    for (std::size_t t = 0; t < net.tensors.size(); ++t) {
        const auto& next = net.tensors[t];
        std::vector<Label> out;
        auto keep = [&](Label l) {
            if (std::find(out.begin(), out.end(), l) != out.end()) return;
            if (net.bond(l).open) {
                out.push_back(l);
                return;
            }
            for (std::size_t u = t + 1; u < net.tensors.size(); ++u) {
                if (net.tensors[u].has_label(l)) {
                    out.push_back(l);
                    return;
                }
            }
        };
        for (Label l : acc.labels()) keep(l);
        for (Label l : next.labels()) keep(l);
        acc = naive_einsum(acc, next, out);
    }
    return acc.permuted(net.open_bonds);
}

std::vector<TreeTotals> enumerate_trees(const std::vector<std::vector<Label>>& leaves,
                                        const std::map<Label, std::size_t>& dims, const std::set<Label>& open) {
    const std::size_t n = leaves.size();
    if (n == 0 || n > 12) throw std::invalid_argument("enumerate_trees: 1..12 leaves");
    std::map<Label, unsigned> holders;
    for (std::size_t t = 0; t < n; ++t) {
        for (Label l : leaves[t]) holders[l] |= 1U << t;
    }
    auto labels_of = [&](unsigned set) {
        std::set<Label> out;
        for (const auto& [l, who] : holders) {
            if ((who & set) == 0) continue;
            if (open.count(l) || (who & ~set) != 0) out.insert(l);
        }
        return out;
    };
    auto extent = [&](const std::set<Label>& labels) {
        double e = 1.0;
        for (Label l : labels) e *= static_cast<double>(dims.at(l));
        return e;
    };
    std::unordered_map<unsigned, std::vector<TreeTotals>> memo;
    std::function<const std::vector<TreeTotals>&(unsigned)> trees = [&](unsigned set) -> const std::vector<TreeTotals>& {
        if (auto it = memo.find(set); it != memo.end()) return it->second;
        std::vector<TreeTotals> result;
        const double size = extent(labels_of(set));
        if ((set & (set - 1)) == 0) {
            result.push_back({0.0, 0.0, size});
        } else {
            const unsigned low = set & (~set + 1);
            // Unordered splits: the part holding the lowest leaf comes first.
            for (unsigned a = (set - 1) & set; a > 0; a = (a - 1) & set) {
                if ((a & low) == 0) continue;
                const unsigned b = set & ~a;
                const auto la = labels_of(a);
                const auto lb = labels_of(b);
                std::set<Label> both = la;
                both.insert(lb.begin(), lb.end());
                const double macs = extent(both);
                const double sa = extent(la);
                const double sb = extent(lb);
                for (const auto& x : trees(a)) {
                    for (const auto& y : trees(b)) {
                        result.push_back({x.macs + y.macs + macs, x.elements + y.elements + sa + sb + size,
                                          std::max({x.largest, y.largest, size})});
                    }
                }
            }
        }
        return memo[set] = std::move(result);
    };
    return trees((1U << n) - 1U);
}

double reference_score(const TreeTotals& t, double alpha, double beta, double log_base) {
    auto lg = [&](double v) { return v > 0.0 ? std::log(v) / std::log(log_base) : 0.0; };
    return lg(8.0 * t.macs + alpha * 8.0 * t.elements) + beta * lg(t.largest);
}

double best_exhaustive_score(const TensorNetwork& net, double alpha, double beta) {
    std::map<Label, std::size_t> dims;
    std::set<Label> open;
    for (const auto& [id, bond] : net.bonds) {
        dims[id] = bond.dim;
        if (bond.open) open.insert(id);
    }
    double best = INFINITY;
    for (const auto& t : enumerate_trees(leaf_labels(net), dims, open)) {
        best = std::min(best, reference_score(t, alpha, beta));
    }
    return best;
}

TempDir::TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("tenkontract_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

}  // namespace tktest
