#include "tenkontract/sparse_state.hpp"

#include "tenkontract/error.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

namespace tenkontract {

namespace {

constexpr int kMaxEnumeratedQubits = 30;

void check_width(int n_qubits) {
    if (n_qubits <= 0 || n_qubits > kMaxQubits) throw ValidationError("qubit count out of range");
}

void normalize(std::vector<Bits>& bits, int n_qubits) {
    for (Bits b : bits) {
        if (n_qubits < 64 && (b >> n_qubits) != 0) throw ValidationError("bitstring wider than the qubit count");
    }
    std::sort(bits.begin(), bits.end());
    bits.erase(std::unique(bits.begin(), bits.end()), bits.end());
}

// Spreads the low popcount(positions) bits of `value` onto the listed bit
// positions of a width-n word, most significant first.
Bits scatter(Bits value, const std::vector<int>& positions, int n) {
    Bits out = 0;
    const int k = static_cast<int>(positions.size());
    for (int i = 0; i < k; ++i) {
        if ((value >> (k - 1 - i)) & 1U) out |= Bits{1} << (n - 1 - positions[static_cast<std::size_t>(i)]);
    }
    return out;
}

}  // namespace

SparseState SparseState::make(int n_qubits, StateMode mode, const std::vector<std::string>& bitstrings) {
    check_width(n_qubits);
    std::vector<Bits> parsed;
    parsed.reserve(bitstrings.size());
    for (const auto& s : bitstrings) parsed.push_back(parse_bitstring(s, n_qubits));
    switch (mode) {
        case StateMode::Single:
            if (parsed.size() != 1) throw ValidationError("single-amplitude state needs exactly one bitstring");
            return single(n_qubits, parsed[0]);
        case StateMode::Full:
            if (!parsed.empty()) throw ValidationError("full state takes no bitstrings");
            return full(n_qubits);
        case StateMode::Sparse: return sparse(n_qubits, std::move(parsed));
        case StateMode::Subspace: break;
    }
    throw ValidationError("subspace states are built from open qubits and a fixed assignment");
}

SparseState SparseState::single(int n_qubits, Bits bitstring) {
    check_width(n_qubits);
    SparseState s(n_qubits, StateMode::Single);
    s.bitstrings_ = {bitstring};
    normalize(s.bitstrings_, n_qubits);
    return s;
}

SparseState SparseState::full(int n_qubits) {
    check_width(n_qubits);
    if (n_qubits > 63) throw ValidationError("full state limited to 63 qubits");
    return SparseState(n_qubits, StateMode::Full);
}

SparseState SparseState::sparse(int n_qubits, std::vector<Bits> bitstrings) {
    check_width(n_qubits);
    if (bitstrings.empty()) throw ValidationError("sparse state needs at least one bitstring");
    SparseState s(n_qubits, StateMode::Sparse);
    s.bitstrings_ = std::move(bitstrings);
    normalize(s.bitstrings_, n_qubits);
    return s;
}

SparseState SparseState::subspace(int n_qubits, std::vector<int> open_qubits, Bits fixed) {
    check_width(n_qubits);
    std::sort(open_qubits.begin(), open_qubits.end());
    if (std::adjacent_find(open_qubits.begin(), open_qubits.end()) != open_qubits.end()) {
        throw ValidationError("subspace open qubits repeat");
    }
    for (int q : open_qubits) {
        if (q < 0 || q >= n_qubits) throw ValidationError("subspace open qubit out of range");
    }
    if (open_qubits.size() > 63) throw ValidationError("subspace limited to 63 open qubits");
    SparseState s(n_qubits, StateMode::Subspace);
    s.open_qubits_ = std::move(open_qubits);
    for (int q : s.open_qubits_) fixed &= ~(Bits{1} << (n_qubits - 1 - q));
    if (n_qubits < 64) fixed &= (Bits{1} << n_qubits) - 1;
    s.fixed_ = fixed;
    return s;
}

std::size_t SparseState::count() const noexcept {
    switch (mode_) {
        case StateMode::Full: return std::size_t{1} << n_qubits_;
        case StateMode::Subspace: return std::size_t{1} << open_qubits_.size();
        default: return bitstrings_.size();
    }
}

std::vector<Bits> SparseState::enumerate() const {
    if (mode_ == StateMode::Single || mode_ == StateMode::Sparse) return bitstrings_;
    const int width = mode_ == StateMode::Full ? n_qubits_ : static_cast<int>(open_qubits_.size());
    if (width > kMaxEnumeratedQubits) {
        throw ResourceError("refusing to enumerate 2^" + std::to_string(width) + " bitstrings");
    }
    std::vector<Bits> out(std::size_t{1} << width);
    for (std::size_t v = 0; v < out.size(); ++v) {
        out[v] = mode_ == StateMode::Full ? Bits{v} : fixed_ | scatter(v, open_qubits_, n_qubits_);
    }
    return out;
}

std::vector<Bits> SparseState::project(const std::vector<int>& qubits) const {
    for (int q : qubits) {
        if (q < 0 || q >= n_qubits_) throw ValidationError("projection qubit out of range");
    }
    if (mode_ == StateMode::Full || mode_ == StateMode::Subspace) {
        // Sorted order makes first occurrence lexicographic over the free bits.
        std::vector<int> free_pos;
        for (std::size_t i = 0; i < qubits.size(); ++i) {
            if (mode_ == StateMode::Full ||
                std::binary_search(open_qubits_.begin(), open_qubits_.end(), qubits[i])) {
                free_pos.push_back(static_cast<int>(i));
            }
        }
        if (free_pos.size() > kMaxEnumeratedQubits) throw ResourceError("projection too large to enumerate");
        const int width = static_cast<int>(qubits.size());
        const Bits base = mode_ == StateMode::Full ? 0 : project_bits(fixed_, n_qubits_, qubits);
        std::vector<Bits> out(std::size_t{1} << free_pos.size());
        for (std::size_t v = 0; v < out.size(); ++v) out[v] = base | scatter(v, free_pos, width);
        return out;
    }
    std::vector<Bits> out;
    std::unordered_set<Bits> seen;
    for (Bits b : bitstrings_) {
        const Bits p = project_bits(b, n_qubits_, qubits);
        if (seen.insert(p).second) out.push_back(p);
    }
    return out;
}

std::size_t SparseState::projection_count(const std::vector<int>& qubits) const {
    if (mode_ == StateMode::Full) return std::size_t{1} << qubits.size();
    if (mode_ == StateMode::Subspace) {
        std::size_t free = 0;
        for (int q : qubits) free += std::binary_search(open_qubits_.begin(), open_qubits_.end(), q) ? 1 : 0;
        return std::size_t{1} << free;
    }
    return project(qubits).size();
}

MergePlan merge_open_groups(const SparseState& state, const std::vector<int>& qubits_a,
                            const std::vector<int>& qubits_b, const std::vector<Bits>& table_a,
                            const std::vector<Bits>& table_b) {
    MergePlan plan;
    plan.qubits_a = qubits_a;
    plan.qubits_b = qubits_b;
    std::sort(plan.qubits_a.begin(), plan.qubits_a.end());
    std::sort(plan.qubits_b.begin(), plan.qubits_b.end());
    std::set_union(plan.qubits_a.begin(), plan.qubits_a.end(), plan.qubits_b.begin(), plan.qubits_b.end(),
                   std::back_inserter(plan.merged_qubits));
    if (plan.merged_qubits.size() != plan.qubits_a.size() + plan.qubits_b.size()) {
        throw ValidationError("merge groups overlap");
    }
    auto index_of = [](const std::vector<Bits>& table) {
        std::unordered_map<Bits, std::size_t> idx;
        for (std::size_t i = 0; i < table.size(); ++i) idx.emplace(table[i], i);
        return idx;
    };
    const auto ia = index_of(table_a);
    const auto ib = index_of(table_b);
    plan.configs = state.project(plan.merged_qubits);
    plan.operand_index.reserve(plan.configs.size());
    for (Bits c : plan.configs) {
        auto a = ia.find(restrict_config(c, plan.merged_qubits, plan.qubits_a));
        auto b = ib.find(restrict_config(c, plan.merged_qubits, plan.qubits_b));
        if (a == ia.end() || b == ib.end()) throw ValidationError("merge table does not cover the sparse state");
        plan.operand_index.emplace_back(a->second, b->second);
    }
    return plan;
}

std::size_t ConfigTableCache::count(QubitMask mask) const {
    if (state_.mode() != StateMode::Sparse) return state_.projection_count(mask_qubits(mask));
    std::lock_guard lock(mutex_);
    auto it = counts_.find(mask);
    if (it != counts_.end()) return it->second;
    const std::size_t n = state_.projection_count(mask_qubits(mask));
    counts_.emplace(mask, n);
    return n;
}

std::vector<Bits> ConfigTableCache::table(QubitMask mask) const { return state_.project(mask_qubits(mask)); }

}  // namespace tenkontract
