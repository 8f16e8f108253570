#include "tenkontract/einsum.hpp"

#include "tenkontract/error.hpp"

#include <algorithm>
#include <set>

namespace tenkontract {

namespace {

bool contains(const std::vector<Label>& v, Label l) { return std::find(v.begin(), v.end(), l) != v.end(); }

void require_unique(const std::vector<Label>& v, const char* what) {
    std::set<Label> s(v.begin(), v.end());
    if (s.size() != v.size()) throw ValidationError(std::string("einsum: repeated label in ") + what);
}

}  // namespace

std::size_t EinsumSpec::dim(Label label) const {
    auto it = dims.find(label);
    if (it == dims.end()) throw ValidationError("einsum: no dimension for label " + std::to_string(label));
    return it->second;
}

std::vector<Label> EinsumSpec::contracted() const {
    std::vector<Label> out;
    for (Label l : lhs) {
        if (contains(rhs, l) && !contains(this->out, l)) out.push_back(l);
    }
    return out;
}

std::vector<Label> EinsumSpec::batch() const {
    std::vector<Label> b;
    for (Label l : out) {
        if (contains(lhs, l) && contains(rhs, l)) b.push_back(l);
    }
    return b;
}

std::size_t EinsumSpec::extent(const std::vector<Label>& labels) const {
    std::size_t n = 1;
    for (Label l : labels) n *= dim(l);
    return n;
}

void EinsumSpec::validate() const {
    require_unique(lhs, "lhs");
    require_unique(rhs, "rhs");
    require_unique(out, "output");
    std::vector<Label> lhs_rest = lhs;
    std::vector<Label> rhs_rest = rhs;
    if (merge) {
        if (merge->lhs_open.empty() || merge->rhs_open.empty()) throw ValidationError("einsum: empty merge group");
        for (Label l : merge->lhs_open) {
            if (!contains(lhs, l) || contains(rhs, l) || contains(out, l)) {
                throw ValidationError("einsum: open label " + std::to_string(l) + " misplaced");
            }
        }
        for (Label l : merge->rhs_open) {
            if (!contains(rhs, l) || contains(lhs, l) || contains(out, l)) {
                throw ValidationError("einsum: open label " + std::to_string(l) + " misplaced");
            }
        }
        if (!contains(out, merge->merged_label) || contains(lhs, merge->merged_label) ||
            contains(rhs, merge->merged_label)) {
            throw ValidationError("einsum: merged label must appear only in the output");
        }
        if (merge->plan && merge->plan->dimension() != dim(merge->merged_label)) {
            throw ValidationError("einsum: merged dimension disagrees with the merge plan");
        }
        std::erase_if(lhs_rest, [&](Label l) { return contains(merge->lhs_open, l); });
        std::erase_if(rhs_rest, [&](Label l) { return contains(merge->rhs_open, l); });
    }
    for (Label l : out) {
        if (merge && l == merge->merged_label) continue;
        if (!contains(lhs_rest, l) && !contains(rhs_rest, l)) {
            throw ValidationError("einsum: output label " + std::to_string(l) + " not in any operand");
        }
    }
    for (Label l : lhs_rest) {
        if (!contains(rhs_rest, l) && !contains(out, l)) {
            throw ValidationError("einsum: lhs label " + std::to_string(l) + " is neither contracted nor kept");
        }
    }
    for (Label l : rhs_rest) {
        if (!contains(lhs_rest, l) && !contains(out, l)) {
            throw ValidationError("einsum: rhs label " + std::to_string(l) + " is neither contracted nor kept");
        }
    }
    for (const auto* side : {&lhs, &rhs, &out}) {
        for (Label l : *side) (void)dim(l);
    }
}

std::string EinsumSpec::to_string() const {
    auto join = [&](const std::vector<Label>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(v[i]);
            if (merge && v[i] == merge->merged_label) s += "*";
        }
        return s;
    };
    return join(lhs) + ";" + join(rhs) + "->" + join(out);
}

EinsumSpec make_spec(const ComplexTensor& a, const ComplexTensor& b, std::optional<std::vector<Label>> out) {
    EinsumSpec spec;
    spec.lhs = a.labels();
    spec.rhs = b.labels();
    for (std::size_t i = 0; i < a.rank(); ++i) spec.dims[a.labels()[i]] = a.dims()[i];
    for (std::size_t i = 0; i < b.rank(); ++i) {
        auto [it, fresh] = spec.dims.emplace(b.labels()[i], b.dims()[i]);
        if (!fresh && it->second != b.dims()[i]) {
            throw ValidationError("einsum: label " + std::to_string(b.labels()[i]) + " has mismatched extents");
        }
    }
    if (out) {
        spec.out = *out;
    } else {
        for (Label l : spec.lhs) {
            if (!contains(spec.rhs, l)) spec.out.push_back(l);
        }
        for (Label l : spec.rhs) {
            if (!contains(spec.lhs, l)) spec.out.push_back(l);
        }
    }
    spec.validate();
    return spec;
}

}  // namespace tenkontract
