#include "tenkontract/engine.hpp"

#include "mac_policy.hpp"
#include "tenkontract/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace tenkontract {

namespace {

bool contains(const std::vector<Label>& v, Label l) { return std::find(v.begin(), v.end(), l) != v.end(); }

bool same_set(std::vector<Label> a, std::vector<Label> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

std::vector<Label> concat(std::vector<Label> a, const std::vector<Label>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<Label> drop_prefix(const std::vector<Label>& v, std::size_t n) { return {v.begin() + static_cast<std::ptrdiff_t>(n), v.end()}; }

// Leading groups of an einsum: the batch labels, or with a sparse merge the
// two open groups and the merged output label.
struct Partition {
    std::vector<Label> lead_l, lead_r, lead_out;
    std::vector<Label> k_lhs, k_rhs;  // contracted, in each operand's order
    std::vector<Label> m, n;          // free labels, operand order
    std::string error;
};

Partition partition(const EinsumSpec& spec) {
    Partition p;
    if (spec.merge) {
        if (!spec.batch().empty()) {
            p.error = "batch labels alongside a sparse merge";
            return p;
        }
        p.lead_l = spec.merge->lhs_open;
        p.lead_r = spec.merge->rhs_open;
        p.lead_out = {spec.merge->merged_label};
    } else {
        p.lead_l = p.lead_r = p.lead_out = spec.batch();
    }
    for (Label l : spec.lhs) {
        if (contains(p.lead_l, l)) continue;
        if (contains(spec.rhs, l)) p.k_lhs.push_back(l);
        else p.m.push_back(l);
    }
    for (Label l : spec.rhs) {
        if (contains(p.lead_r, l)) continue;
        if (contains(spec.lhs, l)) p.k_rhs.push_back(l);
        else p.n.push_back(l);
    }
    return p;
}

// Splits the non-leading output labels into (M run, N run) in output order.
bool split_output(const std::vector<Label>& orest, const Partition& p, std::vector<Label>& mo, std::vector<Label>& no,
                  bool& swap) {
    auto prefix_is = [&](const std::vector<Label>& first, const std::vector<Label>& second) {
        if (orest.size() != first.size() + second.size()) return false;
        std::vector<Label> head(orest.begin(), orest.begin() + static_cast<std::ptrdiff_t>(first.size()));
        std::vector<Label> tail = drop_prefix(orest, first.size());
        return same_set(head, first) && same_set(tail, second);
    };
    if (prefix_is(p.m, p.n)) {
        swap = false;
        mo.assign(orest.begin(), orest.begin() + static_cast<std::ptrdiff_t>(p.m.size()));
        no = drop_prefix(orest, p.m.size());
        return true;
    }
    if (prefix_is(p.n, p.m)) {
        swap = true;
        no.assign(orest.begin(), orest.begin() + static_cast<std::ptrdiff_t>(p.n.size()));
        mo = drop_prefix(orest, p.n.size());
        return true;
    }
    return false;
}

bool starts_with(const std::vector<Label>& v, const std::vector<Label>& prefix) {
    return v.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), v.begin());
}

// ---------------------------------------------------------------------------
// Kernel

struct PreparedOperand {
    std::vector<Complex> big;
    std::vector<Complex> small;
    std::span<const Complex> view;  // big, or the raw data when no rounding applies
};

PreparedOperand prepare(std::span<const Complex> data, const PrecisionSetting& setting) {
    PreparedOperand p;
    // FP64 operands are used as stored; rounding to FP64 changes nothing for
    // values already held in double.
    if (setting.format == formats::fp64()) {
        p.view = data;
        return p;
    }
    p.big.resize(data.size());
    if (setting.mode == SplitMode::Triple) p.small.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (setting.mode == SplitMode::Triple) {
            const auto r = split(data[i].real(), setting.format);
            const auto im = split(data[i].imag(), setting.format);
            p.big[i] = {r.big, im.big};
            p.small[i] = {r.small, im.small};
        } else {
            p.big[i] = quantize(data[i], setting.format);
        }
    }
    p.view = p.big;
    return p;
}

template <class Policy>
void gemm_loops(const Policy& policy, const PreparedOperand& a, const PreparedOperand& b, const GemmShape& s,
                bool triple, std::span<Complex> out) {
    const std::size_t slab_a = s.m * s.k;
    const std::size_t slab_b = s.k * s.n;
    const std::size_t a_si = s.trans_a ? 1 : s.k;
    const std::size_t a_sk = s.trans_a ? s.m : 1;
    const std::size_t b_sj = s.trans_b ? s.k : 1;
    const std::size_t b_sk = s.trans_b ? 1 : s.n;
    const Complex* a_big = a.view.data();
    const Complex* b_big = b.view.data();
    const Complex* a_small = a.small.data();
    const Complex* b_small = b.small.data();
    for (std::size_t c = 0; c < s.b; ++c) {
        const std::size_t off_a = s.sparse ? s.a_offsets[c] : c * slab_a;
        const std::size_t off_b = s.sparse ? s.b_offsets[c] : c * slab_b;
        if (off_a + slab_a > a.view.size() || off_b + slab_b > b.view.size()) {
            throw std::logic_error("batched GEMM slab offset out of bounds");
        }
        for (std::size_t i = 0; i < s.m; ++i) {
            for (std::size_t j = 0; j < s.n; ++j) {
                typename Policy::value_type re{}, im{};
                auto pass = [&](const Complex* x, const Complex* y) {
                    const Complex* xp = x + off_a + i * a_si;
                    const Complex* yp = y + off_b + j * b_sj;
                    for (std::size_t kk = 0; kk < s.k; ++kk) {
                        const Complex& u = xp[kk * a_sk];
                        const Complex& v = yp[kk * b_sk];
                        detail::complex_mac(policy, re, im, u.real(), u.imag(), v.real(), v.imag());
                    }
                };
                if (triple) {
                    pass(a_big, b_small);
                    pass(a_small, b_big);
                }
                pass(a_big, b_big);
                const std::size_t pos = s.swap_out ? (c * s.n + j) * s.m + i : (c * s.m + i) * s.n + j;
                out[pos] = Complex(static_cast<double>(re), static_cast<double>(im));
            }
        }
    }
}

// Runs a formable step whose operands already sit in the layout `shape` describes.
ComplexTensor run_gemm(const ComplexTensor& a, const ComplexTensor& b, const EinsumSpec& spec, const GemmShape& shape,
                       const StepPrecision& precision, EngineCounters* counters) {
    std::vector<std::size_t> out_dims;
    for (Label l : spec.out) out_dims.push_back(spec.dim(l));
    ComplexTensor c = ComplexTensor::zeros(spec.out, out_dims);
    if (c.size() != shape.b * shape.m * shape.n) throw std::logic_error("GEMM output extent mismatch");
    const bool triple = precision.setting.mode == SplitMode::Triple && !(precision.setting.format == formats::fp64());
    const auto pa = prepare(a.data(), precision.setting);
    const auto pb = prepare(b.data(), precision.setting);
    if (triple && (pa.small.empty() || pb.small.empty())) throw std::logic_error("split operands missing");
    detail::with_accumulator(precision.accum,
                             [&](const auto& policy) { gemm_loops(policy, pa, pb, shape, triple, c.data()); });
    c.set_format(precision.accum);
    if (counters) counters->macs += static_cast<std::uint64_t>(shape.macs());
    return c;
}

void check_operand(const ComplexTensor& t, const std::vector<Label>& labels, const EinsumSpec& spec, const char* side) {
    if (!same_set(t.labels(), labels)) {
        throw ValidationError(std::string("einsum ") + side + " operand labels do not match " + spec.to_string());
    }
    for (std::size_t i = 0; i < t.rank(); ++i) {
        if (t.dims()[i] != spec.dim(t.labels()[i])) {
            throw ValidationError("dimension mismatch on label " + std::to_string(t.labels()[i]));
        }
    }
}

// Canonical GEMM layout for a spec: [lead, M, K] x [lead, K, N] -> [lead, M, N].
EinsumSpec canonical_spec(const EinsumSpec& spec) {
    const auto p = partition(spec);
    if (!p.error.empty()) throw ValidationError("cannot execute " + spec.to_string() + ": " + p.error);
    std::vector<Label> mo, no;
    for (Label l : spec.out) {
        if (contains(p.m, l)) mo.push_back(l);
        if (contains(p.n, l)) no.push_back(l);
    }
    EinsumSpec c = spec;
    c.lhs = concat(concat(p.lead_l, mo), p.k_lhs);
    c.rhs = concat(concat(p.lead_r, p.k_lhs), no);
    c.out = concat(concat(p.lead_out, mo), no);
    return c;
}

ComplexTensor contract_pair(const ComplexTensor& a, const ComplexTensor& b, const EinsumSpec& spec,
                            const GemmClass& cls, const StepPrecision& precision, EngineCounters* counters) {
    if (const auto* shape = std::get_if<GemmShape>(&cls)) {
        const ComplexTensor* pa = &a;
        const ComplexTensor* pb = &b;
        ComplexTensor ta, tb;
        if (a.labels() != spec.lhs) pa = &(ta = a.permuted(spec.lhs));
        if (b.labels() != spec.rhs) pb = &(tb = b.permuted(spec.rhs));
        return run_gemm(*pa, *pb, spec, *shape, precision, counters);
    }
    const EinsumSpec canon = canonical_spec(spec);
    const GemmClass canon_cls = classify_gemm(canon);
    const auto* shape = std::get_if<GemmShape>(&canon_cls);
    if (!shape) throw std::logic_error("canonical layout is not a GEMM: " + std::get<NotFormable>(canon_cls).reason);
    ComplexTensor c = run_gemm(a.permuted(canon.lhs), b.permuted(canon.rhs), canon, *shape, precision, counters);
    return c.permuted(spec.out);
}

}  // namespace

// ---------------------------------------------------------------------------
// Classification

GemmClass classify_gemm(const EinsumSpec& spec) {
    try {
        spec.validate();
    } catch (const ValidationError& e) {
        return NotFormable{std::string("invalid einsum: ") + e.what()};
    }
    const auto p = partition(spec);
    if (!p.error.empty()) return NotFormable{p.error};
    if (!starts_with(spec.lhs, p.lead_l)) return NotFormable{"lhs does not start with the batch labels"};
    if (!starts_with(spec.rhs, p.lead_r)) return NotFormable{"rhs does not start with the batch labels"};
    if (!starts_with(spec.out, p.lead_out)) return NotFormable{"output does not start with the batch labels"};
    std::vector<Label> mo, no;
    bool swap = false;
    if (!split_output(drop_prefix(spec.out, p.lead_out.size()), p, mo, no, swap)) {
        return NotFormable{"output free labels are not two contiguous runs"};
    }
    const auto lrest = drop_prefix(spec.lhs, p.lead_l.size());
    const auto rrest = drop_prefix(spec.rhs, p.lead_r.size());
    GemmShape s;
    if (lrest == concat(mo, p.k_lhs)) s.trans_a = false;
    else if (lrest == concat(p.k_lhs, mo)) s.trans_a = true;
    else return NotFormable{"lhs labels are not [M, K] or [K, M] in output order"};
    if (rrest == concat(p.k_lhs, no)) s.trans_b = false;
    else if (rrest == concat(no, p.k_lhs)) s.trans_b = true;
    else return NotFormable{"rhs labels are not [K, N] or [N, K] with matching K order"};
    if (p.m.empty() || p.k_lhs.empty()) s.trans_a = false;
    if (p.n.empty() || p.k_lhs.empty()) s.trans_b = false;
    s.swap_out = swap && !mo.empty() && !no.empty();
    s.m = spec.extent(mo);
    s.n = spec.extent(no);
    s.k = spec.extent(p.k_lhs);
    s.b = spec.extent(p.lead_out);
    if (spec.merge) {
        s.sparse = true;
        if (const auto& plan = spec.merge->plan) {
            const std::size_t slab_a = s.m * s.k;
            const std::size_t slab_b = s.k * s.n;
            for (const auto& [ia, ib] : plan->operand_index) {
                s.a_offsets.push_back(ia * slab_a);
                s.b_offsets.push_back(ib * slab_b);
            }
        }
    }
    return s;
}

ComplexTensor execute_step(const ComplexTensor& a, const ComplexTensor& b, const EinsumSpec& spec,
                           const StepPrecision& precision, EngineCounters* counters) {
    spec.validate();
    check_operand(a, spec.lhs, spec, "lhs");
    check_operand(b, spec.rhs, spec, "rhs");
    if (spec.merge && !spec.merge->plan) throw ValidationError("sparse einsum needs a merge plan to execute");
    return contract_pair(a, b, spec, classify_gemm(spec), precision, counters);
}

ComplexTensor sparse_batched_gemm(const ComplexTensor& a, const ComplexTensor& b, const EinsumSpec& spec,
                                  const GemmShape& shape, const StepPrecision& precision, EngineCounters* counters) {
    if (a.labels() != spec.lhs || b.labels() != spec.rhs) {
        throw ValidationError("batched GEMM operands are not in the step layout");
    }
    if (shape.sparse && (shape.a_offsets.size() != shape.b || shape.b_offsets.size() != shape.b)) {
        throw ValidationError("batched GEMM needs one offset pair per batch");
    }
    return run_gemm(a, b, spec, shape, precision, counters);
}

// ---------------------------------------------------------------------------
// Index reordering

std::vector<int> rank_steps_by_cost(const ContractionTree& tree) {
    std::vector<int> ids;
    for (std::size_t i = 0; i < tree.step_count(); ++i) ids.push_back(tree.step_node(i));
    std::stable_sort(ids.begin(), ids.end(), [&](int x, int y) {
        const double cx = tree.node(x).macs;
        const double cy = tree.node(y).macs;
        return cx != cy ? cx > cy : x < y;
    });
    return ids;
}

namespace {

// Operand orders turning `spec` into a GEMM with its output order unchanged;
// prefers the candidate that moves the fewest operands.
std::optional<std::pair<std::vector<Label>, std::vector<Label>>> gemm_inputs_for(const EinsumSpec& spec) {
    const auto p = partition(spec);
    if (!p.error.empty() || !starts_with(spec.out, p.lead_out)) return std::nullopt;
    std::vector<Label> mo, no;
    bool swap = false;
    if (!split_output(drop_prefix(spec.out, p.lead_out.size()), p, mo, no, swap)) return std::nullopt;
    std::optional<std::pair<std::vector<Label>, std::vector<Label>>> best;
    int best_cost = 3;
    for (const auto* kord : {&p.k_lhs, &p.k_rhs}) {
        for (bool ta : {false, true}) {
            for (bool tb : {false, true}) {
                auto lhs = concat(p.lead_l, ta ? concat(*kord, mo) : concat(mo, *kord));
                auto rhs = concat(p.lead_r, tb ? concat(no, *kord) : concat(*kord, no));
                const int cost = (lhs != spec.lhs ? 1 : 0) + (rhs != spec.rhs ? 1 : 0);
                if (cost < best_cost) {
                    best_cost = cost;
                    best.emplace(std::move(lhs), std::move(rhs));
                }
            }
        }
    }
    return best;
}

}  // namespace

ReorderResult reorder_topk(const ContractionTree& tree, std::size_t k) {
    ReorderResult r{tree, {}, {}, {}};
    const auto ranked = rank_steps_by_cost(tree);
    std::set<int> modified;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
        const int id = ranked[i];
        if (modified.count(id)) {
            r.skipped.emplace_back(id, "already modified");
            continue;
        }
        const EinsumSpec spec = r.tree.spec(id);
        if (is_formable(classify_gemm(spec))) {
            r.already_formable.push_back(id);
            continue;
        }
        const auto inputs = gemm_inputs_for(spec);
        if (!inputs) {
            r.skipped.emplace_back(id, "output order admits no GEMM");
            continue;
        }
        const TreeNode& nd = r.tree.node(id);
        const int left = nd.left;
        const int right = nd.right;
        auto producer_modified = [&](int c) { return !r.tree.node(c).is_leaf() && modified.count(c) != 0; };
        if (producer_modified(left) || producer_modified(right)) {
            r.skipped.emplace_back(id, "producer already modified");
            continue;
        }
        r.tree.pin_order(id, spec.out);
        r.tree.pin_order(left, inputs->first);
        r.tree.pin_order(right, inputs->second);
        r.tree.reannotate();
        modified.insert(id);
        if (!r.tree.node(left).is_leaf()) modified.insert(left);
        if (!r.tree.node(right).is_leaf()) modified.insert(right);
        r.reordered.push_back(id);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Execution plan

namespace {

struct GroupTable {
    std::vector<int> qubits;
    std::vector<Bits> configs;  // over `qubits`, one per composite row
};

// Row-major composite of the open labels' config tables, first label most significant.
GroupTable compose_groups(const NetworkShape& shape, const std::vector<Label>& labels) {
    std::vector<std::vector<int>> label_qubits;
    std::vector<std::vector<Bits>> tables;
    QubitMask all = 0;
    for (Label l : labels) {
        const QubitMask mask = shape.qubit_mask(l);
        if (mask == 0) throw ValidationError("label " + std::to_string(l) + " is not an open bond");
        all |= mask;
        label_qubits.push_back(mask_qubits(mask));
        if (shape.is_merged(l)) {
            tables.push_back(shape.configs().table(mask));
        } else {
            std::vector<Bits> t(shape.dim(l));
            for (std::size_t v = 0; v < t.size(); ++v) t[v] = v;
            tables.push_back(std::move(t));
        }
    }
    GroupTable g;
    g.qubits = mask_qubits(all);
    const int width = static_cast<int>(g.qubits.size());
    std::vector<std::vector<int>> positions(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (int q : label_qubits[i]) {
            positions[i].push_back(static_cast<int>(std::lower_bound(g.qubits.begin(), g.qubits.end(), q) - g.qubits.begin()));
        }
    }
    std::size_t total = 1;
    for (const auto& t : tables) total *= t.size();
    g.configs.resize(total);
    std::vector<std::size_t> idx(labels.size(), 0);
    for (std::size_t row = 0; row < total; ++row) {
        Bits config = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const Bits part = tables[i][idx[i]];
            const int k = static_cast<int>(positions[i].size());
            for (int b = 0; b < k; ++b) {
                if ((part >> (k - 1 - b)) & 1U) config |= Bits{1} << (width - 1 - positions[i][static_cast<std::size_t>(b)]);
            }
        }
        g.configs[row] = config;
        for (std::size_t i = labels.size(); i-- > 0;) {
            if (++idx[i] < tables[i].size()) break;
            idx[i] = 0;
        }
    }
    return g;
}

}  // namespace

ExecutionPlan::ExecutionPlan(const ContractionTree& tree) {
    if (!tree.is_canonical()) throw ValidationError("execution needs a canonical (post-order) tree");
    const auto& shape = tree.shape();
    for (std::size_t t = 0; t < tree.leaf_count(); ++t) leaf_orders_.push_back(tree.node(static_cast<int>(t)).labels);
    for (std::size_t i = 0; i < tree.step_count(); ++i) {
        const int id = tree.step_node(i);
        PlannedStep step;
        step.node = id;
        step.left = tree.node(id).left;
        step.right = tree.node(id).right;
        step.spec = tree.spec(id);
        if (step.spec.merge) {
            const auto ga = compose_groups(shape, step.spec.merge->lhs_open);
            const auto gb = compose_groups(shape, step.spec.merge->rhs_open);
            step.spec.merge->plan = std::make_shared<const MergePlan>(
                merge_open_groups(shape.configs().state(), ga.qubits, gb.qubits, ga.configs, gb.configs));
        }
        step.gemm = classify_gemm(step.spec);
        steps_.push_back(std::move(step));
    }
    root_ = tree.root();
    annotated_macs_ = tree.total_macs();
    const auto& root_labels = tree.node(root_).labels;
    bool any_open = false;
    for (Label l : root_labels) {
        if (!shape.is_open(l)) throw ValidationError("root keeps closed label " + std::to_string(l));
        any_open = true;
    }
    if (!any_open) {
        root_offsets_.push_back(0);
        return;
    }
    const auto& state = shape.configs().state();
    n_qubits_ = state.n_qubits();
    bitstrings_ = state.enumerate();
    const auto root = compose_groups(shape, root_labels);
    std::unordered_map<Bits, std::size_t> index;
    for (std::size_t i = 0; i < root.configs.size(); ++i) index.emplace(root.configs[i], i);
    for (Bits b : bitstrings_) {
        auto it = index.find(project_bits(b, n_qubits_, root.qubits));
        if (it == index.end()) throw ValidationError("bitstring " + format_bitstring(b, n_qubits_) + " missing from root");
        root_offsets_.push_back(it->second);
    }
}

// ---------------------------------------------------------------------------
// Subtasks and full runs

namespace {

double max_component(const ComplexTensor& t) {
    double m = 0.0;
    for (const auto& z : t.data()) m = std::max({m, std::fabs(z.real()), std::fabs(z.imag())});
    return m;
}

// Scales a tensor by a power of two so its largest component lies in [1, 2).
int normalize_exponent(ComplexTensor& t) {
    const double m = max_component(t);
    if (m == 0.0 || !std::isfinite(m)) return 0;
    const int e = std::ilogb(m);
    for (auto& z : t.data()) z = {std::ldexp(z.real(), -e), std::ldexp(z.imag(), -e)};
    return e;
}

}  // namespace

ComplexTensor contract_subtask(const TensorNetwork& net, const ExecutionPlan& plan, const PrecisionSchedule& schedule,
                               const SliceSet& slices, std::size_t task_index, EngineCounters* counters,
                               std::vector<StepTiming>* timings) {
    const auto values = slices.assignment(task_index);
    if (net.tensors.size() != plan.leaf_count()) throw ValidationError("network does not match the execution plan");
    const std::size_t n_leaves = plan.leaf_count();
    std::vector<ComplexTensor> buffers(n_leaves + plan.steps().size());
    std::vector<int> exponents(buffers.size(), 0);
    const FormatSpec& storage = schedule.accumulation();
    const bool round_storage = !(storage == formats::fp64());
    for (std::size_t t = 0; t < n_leaves; ++t) {
        ComplexTensor leaf = net.tensors[t];
        for (std::size_t i = 0; i < slices.bonds.size(); ++i) {
            if (leaf.has_label(slices.bonds[i])) leaf = leaf.fixed(slices.bonds[i], values[i]);
        }
        const auto& order = plan.leaf_order(static_cast<int>(t));
        if (!same_set(leaf.labels(), order)) {
            throw ValidationError("tensor " + std::to_string(t) + " labels do not match the contraction tree");
        }
        leaf = leaf.permuted(order);
        if (round_storage) {
            for (auto& z : leaf.data()) z = quantize(z, storage);
            leaf.set_format(storage);
        }
        buffers[t] = std::move(leaf);
    }
    for (std::size_t i = 0; i < plan.steps().size(); ++i) {
        const auto& step = plan.steps()[i];
        ComplexTensor a = std::move(buffers[static_cast<std::size_t>(step.left)]);
        ComplexTensor b = std::move(buffers[static_cast<std::size_t>(step.right)]);
        int exponent = exponents[static_cast<std::size_t>(step.left)] + exponents[static_cast<std::size_t>(step.right)];
        if (schedule.rescale) exponent += normalize_exponent(a) + normalize_exponent(b);
        const StepPrecision precision{schedule.at(i), schedule.accumulation()};
        const auto start = std::chrono::steady_clock::now();
        buffers[static_cast<std::size_t>(step.node)] = contract_pair(a, b, step.spec, step.gemm, precision, counters);
        exponents[static_cast<std::size_t>(step.node)] = exponent;
        if (timings) {
            StepTiming t;
            t.step = i;
            t.tcc = CostModel{}.ops_per_element * static_cast<double>(step.spec.extent(step.spec.out)) *
                    static_cast<double>(step.spec.extent(step.spec.contracted()));
            t.formable = is_formable(step.gemm);
            if (t.formable) t.shape = std::get<GemmShape>(step.gemm);
            t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            timings->push_back(std::move(t));
        }
    }
    ComplexTensor root = std::move(buffers[static_cast<std::size_t>(plan.root())]);
    if (const int e = exponents[static_cast<std::size_t>(plan.root())]; e != 0) {
        for (auto& z : root.data()) z = {std::ldexp(z.real(), e), std::ldexp(z.imag(), e)};
    }
    return root;
}

ComplexTensor contract_subtask(const TensorNetwork& net, const ContractionTree& tree,
                               const PrecisionSchedule& schedule, std::size_t task_index) {
    return contract_subtask(net, ExecutionPlan(tree), schedule, slice_set_of(net, tree.shape().sliced()), task_index);
}

std::vector<Complex> align_root(const ExecutionPlan& plan, const ComplexTensor& root) {
    std::vector<Complex> out;
    out.reserve(plan.root_offsets().size());
    for (std::size_t off : plan.root_offsets()) {
        if (off >= root.size()) throw ValidationError("root tensor smaller than the requested bitstrings");
        out.push_back(root.data()[off]);
    }
    return out;
}

namespace {

constexpr std::size_t kReductionChunk = 16;

// Fixed-shape pairwise sum: the grouping depends only on the number of parts.
std::vector<Complex> pairwise_sum(std::vector<std::vector<Complex>>& parts, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return std::move(parts[lo]);
    const std::size_t mid = lo + (hi - lo) / 2;
    auto left = pairwise_sum(parts, lo, mid);
    const auto right = pairwise_sum(parts, mid, hi);
    for (std::size_t i = 0; i < left.size(); ++i) left[i] += right[i];
    return left;
}

}  // namespace

AmplitudeSet run_simulation(const TensorNetwork& net, const ContractionTree& tree, const SliceSet& slices,
                            const PrecisionSchedule& schedule, const RunOptions& options) {
    const ExecutionPlan plan(tree);
    {
        std::vector<Label> expected = tree.shape().sliced();
        if (!same_set(expected, slices.bonds)) throw ValidationError("slice set does not match the contraction tree");
    }
    const std::size_t n_tasks = slices.subtask_count();
    const std::size_t n_chunks = (n_tasks + kReductionChunk - 1) / kReductionChunk;
    std::vector<std::vector<Complex>> chunk_sums(n_chunks);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t failed_task = std::numeric_limits<std::size_t>::max();
    std::string failure;
    auto work = [&] {
        for (std::size_t chunk = next++; chunk < n_chunks; chunk = next++) {
            std::vector<std::vector<Complex>> parts;
            const std::size_t lo = chunk * kReductionChunk;
            const std::size_t hi = std::min(n_tasks, lo + kReductionChunk);
            for (std::size_t t = lo; t < hi; ++t) {
                try {
                    auto* timings = t == 0 ? options.timings : nullptr;
                    parts.push_back(
                        align_root(plan, contract_subtask(net, plan, schedule, slices, t, options.counters, timings)));
                } catch (const std::exception& e) {
                    std::lock_guard lock(error_mutex);
                    if (t < failed_task) {
                        failed_task = t;
                        failure = e.what();
                    }
                    return;
                }
            }
            chunk_sums[chunk] = pairwise_sum(parts, 0, parts.size());
        }
    };
    const int n_threads = std::clamp(options.workers, 1, static_cast<int>(std::max<std::size_t>(n_chunks, 1)));
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failed_task != std::numeric_limits<std::size_t>::max()) {
        throw std::runtime_error("subtask " + std::to_string(failed_task) + " failed: " + failure);
    }
    const auto total = pairwise_sum(chunk_sums, 0, chunk_sums.size());
    AmplitudeSet out;
    out.n_qubits = plan.n_qubits();
    for (std::size_t i = 0; i < plan.bitstrings().size(); ++i) out.entries.push_back({plan.bitstrings()[i], total[i]});
    if (plan.bitstrings().empty() && !total.empty()) out.entries.push_back({0, total[0]});
    return out;
}

AmplitudeSet run_simulation(const Circuit& circuit, const SparseState& state, const ContractionTree& tree,
                            const SliceSet& slices, const PrecisionSchedule& schedule, const RunOptions& options) {
    TensorNetwork net = circuit_to_network(circuit, state);
    for (Label l : slices.bonds) net.bonds.at(l).sliced = true;
    return run_simulation(net, tree, slices, schedule, options);
}

nlohmann::json flop_report(const std::vector<StepTiming>& timings) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : timings) {
        nlohmann::json j{{"step", t.step}, {"Tcc", t.tcc}, {"formable", t.formable}, {"time", t.seconds}};
        j["shape"] = t.formable ? nlohmann::json{{"b", t.shape.b}, {"m", t.shape.m}, {"n", t.shape.n}, {"k", t.shape.k}}
                                : nlohmann::json(nullptr);
        out.push_back(j);
    }
    return out;
}

}  // namespace tenkontract
