#include "tenkontract/pathopt.hpp"

#include "tenkontract/error.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <thread>
#include <tuple>

namespace tenkontract {

CostModel CostModel::for_format(const FormatSpec& fmt) {
    const int bits = 1 + fmt.exponent_bits + fmt.mantissa_bits;
    const auto bytes = std::bit_ceil(static_cast<unsigned>((bits + 7) / 8));
    return {8.0, 2.0 * static_cast<double>(bytes)};
}

StepCost step_cost(const EinsumSpec& spec, const CostModel& model) {
    std::set<Label> distinct(spec.lhs.begin(), spec.lhs.end());
    distinct.insert(spec.rhs.begin(), spec.rhs.end());
    double macs = 1.0;
    if (spec.merge) {
        for (Label l : spec.merge->lhs_open) distinct.erase(l);
        for (Label l : spec.merge->rhs_open) distinct.erase(l);
        macs *= static_cast<double>(spec.dim(spec.merge->merged_label));
    }
    for (Label l : distinct) macs *= static_cast<double>(spec.dim(l));
    auto size = [&](const std::vector<Label>& v) { return static_cast<double>(spec.extent(v)); };
    return {model.ops_per_element * macs, model.sizeof_data * (size(spec.lhs) + size(spec.rhs) + size(spec.out))};
}

// ---------------------------------------------------------------------------
// NetworkShape

NetworkShape::NetworkShape(const TensorNetwork& net, std::shared_ptr<const ConfigTableCache> configs)
    : configs_(std::move(configs)) {
    for (const auto& [id, b] : net.bonds) {
        bond_labels_.push_back(id);
        dims_[id] = b.dim;
        if (b.open) qubits_[id] = b.qubit;
        if (b.sliced) sliced_.push_back(id);
    }
    if (!qubits_.empty() && !configs_) throw ValidationError("network has open bonds but no output state");
    for (const auto& t : net.tensors) {
        std::vector<Label> labels;
        for (Label l : t.labels()) {
            if (!is_sliced(l)) labels.push_back(l);
        }
        leaf_labels_.push_back(std::move(labels));
    }
    merged_base_ = net.next_label();
}

NetworkShape::NetworkShape(const NetworkShape& other)
    : leaf_labels_(other.leaf_labels_),
      bond_labels_(other.bond_labels_),
      dims_(other.dims_),
      qubits_(other.qubits_),
      sliced_(other.sliced_),
      merged_base_(other.merged_base_),
      configs_(other.configs_) {
    std::lock_guard lock(other.mutex_);
    merged_by_mask_ = other.merged_by_mask_;
    mask_by_merged_ = other.mask_by_merged_;
}

std::size_t NetworkShape::dim(Label label) const {
    if (is_merged(label)) return configs_->count(qubit_mask(label));
    auto it = dims_.find(label);
    if (it == dims_.end()) throw ValidationError("unknown label " + std::to_string(label));
    return it->second;
}

bool NetworkShape::is_open(Label label) const { return is_merged(label) || qubits_.count(label) != 0; }

QubitMask NetworkShape::qubit_mask(Label label) const {
    if (is_merged(label)) {
        std::lock_guard lock(mutex_);
        const auto idx = static_cast<std::size_t>(label - merged_base_);
        if (idx >= mask_by_merged_.size()) throw ValidationError("unknown merged label " + std::to_string(label));
        return mask_by_merged_[idx];
    }
    auto it = qubits_.find(label);
    return it == qubits_.end() ? 0 : qubit_bit(it->second);
}

bool NetworkShape::is_sliced(Label label) const {
    return std::find(sliced_.begin(), sliced_.end(), label) != sliced_.end();
}

bool NetworkShape::bond_exists(Label label) const { return dims_.count(label) != 0; }

Label NetworkShape::merged_label(QubitMask mask) const {
    std::lock_guard lock(mutex_);
    auto it = merged_by_mask_.find(mask);
    if (it != merged_by_mask_.end()) return it->second;
    const Label label = merged_base_ + static_cast<Label>(mask_by_merged_.size());
    merged_by_mask_.emplace(mask, label);
    mask_by_merged_.push_back(mask);
    return label;
}

std::shared_ptr<const NetworkShape> NetworkShape::with_slice(Label bond) const {
    if (!bond_exists(bond)) throw ValidationError("cannot slice unknown bond " + std::to_string(bond));
    if (qubits_.count(bond)) throw ValidationError("cannot slice open bond " + std::to_string(bond));
    if (is_sliced(bond)) throw ValidationError("bond " + std::to_string(bond) + " is already sliced");
    auto copy = std::make_shared<NetworkShape>(*this);
    copy->sliced_.push_back(bond);
    for (auto& labels : copy->leaf_labels_) std::erase(labels, bond);
    return copy;
}

// ---------------------------------------------------------------------------
// ContractionTree

namespace {

bool has(const std::vector<Label>& v, Label l) { return std::find(v.begin(), v.end(), l) != v.end(); }

bool same_set(std::vector<Label> a, std::vector<Label> b) {
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

double extent(const NetworkShape& shape, const std::vector<Label>& labels) {
    double n = 1.0;
    for (Label l : labels) n *= static_cast<double>(shape.dim(l));
    return n;
}

struct PairStats {
    std::vector<Label> out;
    bool merges = false;
    QubitMask mask = 0;
    double size = 1.0, macs = 0.0, m = 1.0, n = 1.0, k = 1.0;
};

PairStats pair_stats(const NetworkShape& shape, const std::vector<Label>& left, QubitMask left_mask,
                     const std::vector<Label>& right, QubitMask right_mask) {
    PairStats s;
    bool left_open = false;
    bool right_open = false;
    for (Label l : left) left_open = left_open || shape.is_open(l);
    for (Label l : right) right_open = right_open || shape.is_open(l);
    s.merges = left_open && right_open;
    s.mask = left_mask | right_mask;
    if (s.merges) s.out.push_back(shape.merged_label(s.mask));
    for (Label l : left) {
        if (has(right, l)) {
            s.k *= static_cast<double>(shape.dim(l));
        } else if (!(s.merges && shape.is_open(l))) {
            s.out.push_back(l);
            s.m *= static_cast<double>(shape.dim(l));
        }
    }
    for (Label l : right) {
        if (!has(left, l) && !(s.merges && shape.is_open(l))) {
            s.out.push_back(l);
            s.n *= static_cast<double>(shape.dim(l));
        }
    }
    s.size = extent(shape, s.out);
    s.macs = s.size * s.k;
    return s;
}

}  // namespace

ContractionTree::ContractionTree(std::shared_ptr<const NetworkShape> shape,
                                 const std::vector<std::pair<int, int>>& steps)
    : shape_(std::move(shape)) {
    if (!shape_) throw ValidationError("contraction tree needs a network shape");
    const auto n_leaves = static_cast<int>(shape_->leaf_count());
    if (n_leaves == 0) throw ValidationError("network has no tensors");
    if (steps.size() != static_cast<std::size_t>(n_leaves - 1)) {
        throw ValidationError("a tree over " + std::to_string(n_leaves) + " tensors needs " +
                              std::to_string(n_leaves - 1) + " steps, got " + std::to_string(steps.size()));
    }
    nodes_.resize(static_cast<std::size_t>(n_leaves));
    for (const auto& [a, b] : steps) {
        const int id = static_cast<int>(nodes_.size());
        for (int c : {a, b}) {
            if (c < 0 || c >= id) throw ValidationError("step references unknown node " + std::to_string(c));
            if (nodes_[static_cast<std::size_t>(c)].parent >= 0) {
                throw ValidationError("node " + std::to_string(c) + " is contracted twice");
            }
        }
        if (a == b) throw ValidationError("step contracts node " + std::to_string(a) + " with itself");
        nodes_.emplace_back();
        set_children(id, a, b);
    }
    root_ = static_cast<int>(nodes_.size()) - 1;
    reannotate();
}

std::vector<std::pair<int, int>> ContractionTree::steps() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = leaf_count(); i < nodes_.size(); ++i) out.emplace_back(nodes_[i].left, nodes_[i].right);
    return out;
}

double ContractionTree::largest_size() const {
    double best = 0.0;
    for (const auto& n : nodes_) best = std::max(best, n.size);
    return best;
}

StepCost ContractionTree::node_cost(int id, const CostModel& model) const {
    const auto& n = node(id);
    return {model.ops_per_element * n.macs, model.sizeof_data * n.elements};
}

EinsumSpec ContractionTree::spec(int id) const {
    const auto& nd = node(id);
    if (nd.is_leaf()) throw ValidationError("leaf " + std::to_string(id) + " has no einsum");
    const auto& l = node(nd.left);
    const auto& r = node(nd.right);
    EinsumSpec s;
    s.lhs = l.labels;
    s.rhs = r.labels;
    s.out = nd.labels;
    for (const auto* v : {&s.lhs, &s.rhs, &s.out}) {
        for (Label x : *v) s.dims[x] = shape_->dim(x);
    }
    if (nd.merges) {
        SparseMerge m;
        m.merged_label = shape_->merged_label(nd.open_mask);
        for (Label x : s.lhs) {
            if (shape_->is_open(x)) m.lhs_open.push_back(x);
        }
        for (Label x : s.rhs) {
            if (shape_->is_open(x)) m.rhs_open.push_back(x);
        }
        s.merge = std::move(m);
    }
    return s;
}

std::vector<int> ContractionTree::leaves_under(int id) const {
    std::vector<int> out;
    std::vector<int> stack{id};
    while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        const auto& n = node(x);
        if (n.is_leaf()) {
            out.push_back(x);
        } else {
            stack.push_back(n.left);
            stack.push_back(n.right);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Label> ContractionTree::leaf_order(int leaf) const { return shape_->leaf_labels(leaf); }

void ContractionTree::compute(int id, TreeNode& nd) const {
    std::vector<Label> natural;
    if (nd.is_leaf()) {
        natural = leaf_order(id);
        nd.merges = false;
        nd.open_mask = 0;
        for (Label l : natural) nd.open_mask |= shape_->qubit_mask(l);
        nd.size = extent(*shape_, natural);
        nd.macs = 0.0;
        nd.elements = 0.0;
        nd.m = nd.n = nd.k = 1.0;
    } else {
        const auto& l = nodes_[static_cast<std::size_t>(nd.left)];
        const auto& r = nodes_[static_cast<std::size_t>(nd.right)];
        auto s = pair_stats(*shape_, l.labels, l.open_mask, r.labels, r.open_mask);
        natural = std::move(s.out);
        nd.merges = s.merges;
        nd.open_mask = s.mask;
        nd.size = s.size;
        nd.macs = s.macs;
        nd.elements = l.size + r.size + s.size;
        nd.m = s.m;
        nd.n = s.n;
        nd.k = s.k;
    }
    if (!nd.pinned || !same_set(nd.labels, natural)) {
        nd.labels = std::move(natural);
        nd.pinned = false;
    }
}

void ContractionTree::reannotate() {
    total_macs_ = 0.0;
    total_elements_ = 0.0;
    // Iterative post-order so children are ready before parents.
    std::vector<std::pair<int, bool>> stack{{root_, false}};
    while (!stack.empty()) {
        auto [id, expanded] = stack.back();
        stack.pop_back();
        auto& nd = nodes_[static_cast<std::size_t>(id)];
        if (!nd.is_leaf() && !expanded) {
            stack.emplace_back(id, true);
            stack.emplace_back(nd.right, false);
            stack.emplace_back(nd.left, false);
            continue;
        }
        compute(id, nd);
        total_macs_ += nd.macs;
        total_elements_ += nd.elements;
    }
}

void ContractionTree::annotate(int id) {
    auto& nd = nodes_.at(static_cast<std::size_t>(id));
    total_macs_ -= nd.macs;
    total_elements_ -= nd.elements;
    compute(id, nd);
    total_macs_ += nd.macs;
    total_elements_ += nd.elements;
}

void ContractionTree::pin_order(int id, std::vector<Label> order) {
    auto& nd = nodes_.at(static_cast<std::size_t>(id));
    if (!same_set(nd.labels, order)) {
        throw ValidationError("pinned order for node " + std::to_string(id) + " is not a permutation of its labels");
    }
    nd.labels = std::move(order);
    nd.pinned = true;
}

void ContractionTree::clear_pins() {
    for (auto& n : nodes_) n.pinned = false;
    reannotate();
}

void ContractionTree::canonicalize() {
    const std::size_t n_leaves = leaf_count();
    std::vector<int> remap(nodes_.size(), -1);
    for (std::size_t i = 0; i < n_leaves; ++i) remap[i] = static_cast<int>(i);
    int next = static_cast<int>(n_leaves);
    std::vector<std::pair<int, bool>> stack{{root_, false}};
    while (!stack.empty()) {
        auto [id, expanded] = stack.back();
        stack.pop_back();
        const auto& nd = nodes_[static_cast<std::size_t>(id)];
        if (nd.is_leaf()) continue;
        if (!expanded) {
            stack.emplace_back(id, true);
            stack.emplace_back(nd.right, false);
            stack.emplace_back(nd.left, false);
        } else {
            remap[static_cast<std::size_t>(id)] = next++;
        }
    }
    std::vector<TreeNode> fresh(nodes_.size());
    for (std::size_t old = 0; old < nodes_.size(); ++old) {
        TreeNode n = nodes_[old];
        auto map = [&](int x) { return x < 0 ? -1 : remap[static_cast<std::size_t>(x)]; };
        n.left = map(n.left);
        n.right = map(n.right);
        n.parent = map(n.parent);
        fresh[static_cast<std::size_t>(remap[old])] = std::move(n);
    }
    nodes_ = std::move(fresh);
    root_ = remap[static_cast<std::size_t>(root_)];
}

ContractionTree ContractionTree::with_shape(std::shared_ptr<const NetworkShape> shape) const {
    if (!shape || shape->leaf_count() != leaf_count()) throw ValidationError("shape does not match tree leaves");
    ContractionTree copy = *this;
    copy.shape_ = std::move(shape);
    copy.reannotate();
    return copy;
}

void ContractionTree::set_children(int id, int left, int right) {
    auto& nd = nodes_.at(static_cast<std::size_t>(id));
    nd.left = left;
    nd.right = right;
    nodes_.at(static_cast<std::size_t>(left)).parent = id;
    nodes_.at(static_cast<std::size_t>(right)).parent = id;
}

bool ContractionTree::is_canonical() const {
    const auto n_leaves = static_cast<int>(leaf_count());
    int expected = n_leaves;
    std::vector<std::pair<int, bool>> stack{{root_, false}};
    while (!stack.empty()) {
        auto [id, expanded] = stack.back();
        stack.pop_back();
        const auto& nd = nodes_[static_cast<std::size_t>(id)];
        if (nd.is_leaf()) continue;
        if (!expanded) {
            stack.emplace_back(id, true);
            stack.emplace_back(nd.right, false);
            stack.emplace_back(nd.left, false);
        } else if (id != expected++) {
            return false;
        }
    }
    return true;
}

void ContractionTree::restore_nodes(const std::vector<std::pair<int, TreeNode>>& saved, double total_macs,
                                    double total_elements) {
    for (const auto& [id, n] : saved) nodes_.at(static_cast<std::size_t>(id)) = n;
    total_macs_ = total_macs;
    total_elements_ = total_elements;
}

// ---------------------------------------------------------------------------
// Scoring and greedy seeding

double score_formula(double tcc, double tmc, double tsc, const ScoreParams& params) {
    const double scale = std::log(params.log_base);
    auto lg = [&](double x) { return x > 0.0 ? std::log(x) / scale : 0.0; };
    return lg(tcc + params.alpha * tmc) + params.beta * lg(tsc);
}

double tree_score(const ContractionTree& tree, const ScoreParams& params) {
    double s = score_formula(tree.total_tcc(params.model), tree.total_tmc(params.model), tree.largest_size(), params);
    if (params.balance.enabled) {
        const auto& b = params.balance;
        double penalty = 0.0;
        for (std::size_t i = 0; i < tree.step_count(); ++i) {
            const auto& n = tree.node(tree.step_node(i));
            penalty += std::max(0.0, std::log2(b.mn_threshold / n.m)) + std::max(0.0, std::log2(b.mn_threshold / n.n)) +
                       std::max(0.0, std::log2(b.k_threshold / n.k));
        }
        s += b.weight * penalty;
    }
    return s;
}

ContractionTree greedy_init(std::shared_ptr<const NetworkShape> shape) {
    struct Active {
        std::vector<Label> labels;
        QubitMask mask = 0;
    };
    const int n_leaves = static_cast<int>(shape->leaf_count());
    std::map<int, Active> active;
    for (int i = 0; i < n_leaves; ++i) {
        Active a;
        a.labels = shape->leaf_labels(i);
        for (Label l : a.labels) a.mask |= shape->qubit_mask(l);
        active.emplace(i, std::move(a));
    }
    std::vector<std::pair<int, int>> steps;
    int next = n_leaves;
    using Key = std::tuple<double, double, int, int>;
    while (active.size() > 1) {
        std::map<Label, std::vector<int>> holders;
        for (const auto& [id, a] : active) {
            for (Label l : a.labels) {
                if (!shape->is_open(l)) holders[l].push_back(id);
            }
        }
        std::set<std::pair<int, int>> candidates;
        for (const auto& [l, ids] : holders) {
            for (std::size_t i = 0; i < ids.size(); ++i) {
                for (std::size_t j = i + 1; j < ids.size(); ++j) candidates.emplace(ids[i], ids[j]);
            }
        }
        if (candidates.empty()) {
            for (auto i = active.begin(); i != active.end(); ++i) {
                for (auto j = std::next(i); j != active.end(); ++j) candidates.emplace(i->first, j->first);
            }
        }
        std::optional<Key> best;
        for (const auto& [x, y] : candidates) {
            const auto& ax = active.at(x);
            const auto& ay = active.at(y);
            const auto s = pair_stats(*shape, ax.labels, ax.mask, ay.labels, ay.mask);
            Key key{s.size, s.macs, x, y};
            if (!best || key < *best) best = key;
        }
        const int x = std::get<2>(*best);
        const int y = std::get<3>(*best);
        auto s = pair_stats(*shape, active.at(x).labels, active.at(x).mask, active.at(y).labels, active.at(y).mask);
        active.erase(x);
        active.erase(y);
        active.emplace(next++, Active{std::move(s.out), s.mask});
        steps.emplace_back(x, y);
    }
    ContractionTree tree(std::move(shape), steps);
    tree.canonicalize();
    return tree;
}

// ---------------------------------------------------------------------------
// Local updates and annealing

bool local_update(ContractionTree& tree, int node, int direction, Pivot pivot) {
    const TreeNode& nd = tree.node(node);
    if (nd.is_leaf()) return false;
    if (direction != 0 && direction != 1) throw ValidationError("local_update direction must be 0 or 1");
    const bool left_internal = !tree.node(nd.left).is_leaf();
    const bool right_internal = !tree.node(nd.right).is_leaf();
    if (pivot == Pivot::Auto) {
        if (left_internal) pivot = Pivot::Left;
        else if (right_internal) pivot = Pivot::Right;
        else return false;
    }
    if ((pivot == Pivot::Left && !left_internal) || (pivot == Pivot::Right && !right_internal)) return false;
    const int c = pivot == Pivot::Left ? nd.left : nd.right;
    const int s = pivot == Pivot::Left ? nd.right : nd.left;
    const int a = tree.node(c).left;
    const int b = tree.node(c).right;
    if (pivot == Pivot::Left) {
        if (direction == 0) {
            tree.set_children(c, a, s);
            tree.set_children(node, c, b);
        } else {
            tree.set_children(c, b, s);
            tree.set_children(node, a, c);
        }
    } else {
        if (direction == 0) {
            tree.set_children(c, s, b);
            tree.set_children(node, a, c);
        } else {
            tree.set_children(c, s, a);
            tree.set_children(node, c, b);
        }
    }
    tree.annotate(c);
    tree.annotate(node);
    return true;
}

double AnnealSchedule::temperature(int sweep) const {
    return std::max(tmin, t0 * std::pow(decay, static_cast<double>(sweep)));
}

ContractionTree sa_optimize(const ContractionTree& init, const ScoreParams& params, const AnnealSchedule& schedule,
                            std::uint64_t seed, std::vector<AnnealStep>* trace) {
    ContractionTree current = init;
    ContractionTree best = init;
    double current_score = tree_score(current, params);
    double best_score = current_score;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    for (int sweep = 0; sweep < schedule.sweeps; ++sweep) {
        const double temp = schedule.temperature(sweep);
        std::vector<int> stack{current.root()};
        while (!stack.empty()) {
            const int id = stack.back();
            stack.pop_back();
            const TreeNode& nd = current.node(id);
            if (nd.is_leaf()) continue;
            const bool li = !current.node(nd.left).is_leaf();
            const bool ri = !current.node(nd.right).is_leaf();
            if (li || ri) {
                Pivot pivot = li ? Pivot::Left : Pivot::Right;
                if (li && ri) pivot = (rng() & 1U) ? Pivot::Right : Pivot::Left;
                const int direction = static_cast<int>(rng() & 1U);
                const int c = pivot == Pivot::Left ? nd.left : nd.right;
                const int s = pivot == Pivot::Left ? nd.right : nd.left;
                // Snapshot everything a rotation can touch.
                const ContractionTree* src = &current;
                std::vector<std::pair<int, TreeNode>> saved;
                for (int x : {id, c, s, src->node(c).left, src->node(c).right}) saved.emplace_back(x, src->node(x));
                const double saved_macs = current.total_macs();
                const double saved_elements = current.total_elements();

                local_update(current, id, direction, pivot);
                const double score = tree_score(current, params);
                const double delta = score - current_score;
                const bool accept = delta <= 0.0 || uniform(rng) < std::exp(-delta / temp);
                if (trace) trace->push_back({sweep, temp, delta, accept});
                if (accept) {
                    current_score = score;
                    if (score < best_score) {
                        best_score = score;
                        best = current;
                    }
                } else {
                    current.restore_nodes(saved, saved_macs, saved_elements);
                }
            }
            const TreeNode& after = current.node(id);
            if (!current.node(after.right).is_leaf()) stack.push_back(after.right);
            if (!current.node(after.left).is_leaf()) stack.push_back(after.left);
        }
    }
    best.canonicalize();
    return best;
}

ContractionTree sa_optimize(std::shared_ptr<const NetworkShape> shape, const ScoreParams& params,
                            const AnnealSchedule& schedule, std::uint64_t seed) {
    return sa_optimize(greedy_init(std::move(shape)), params, schedule, seed);
}

ContractionTree sa_optimize_restarts(std::shared_ptr<const NetworkShape> shape, const ScoreParams& params,
                                     const AnnealSchedule& schedule, std::uint64_t seed, int restarts, int workers) {
    if (restarts < 1) throw ValidationError("restarts must be at least 1");
    const ContractionTree init = greedy_init(shape);
    std::vector<std::optional<ContractionTree>> results(static_cast<std::size_t>(restarts));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next++; i < restarts; i = next++) {
            results[static_cast<std::size_t>(i)] = sa_optimize(init, params, schedule, seed + static_cast<std::uint64_t>(i));
        }
    };
    const int n_threads = std::clamp(workers, 1, restarts);
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const double s = tree_score(*results[i], params);
        if (s < best_score) {
            best_score = s;
            best = i;
        }
    }
    return *results[best];
}

}  // namespace tenkontract
