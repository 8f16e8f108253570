#include "support.hpp"

#include "tenkontract/engine.hpp"
#include "tenkontract/error.hpp"
#include "tenkontract/slicer.hpp"

#include <gtest/gtest.h>

using namespace tenkontract;

namespace {

std::shared_ptr<const NetworkShape> full_shape(const TensorNetwork& net) {
    return tktest::shape_of(net, SparseState::full(net.n_qubits));
}

std::vector<Complex> execute(const TensorNetwork& net, const ContractionTree& tree, const SliceSet& slices,
                             int workers = 1) {
    RunOptions opt;
    opt.workers = workers;
    const auto amps = run_simulation(net, tree, slices, PrecisionSchedule::reference(), opt);
    std::vector<Complex> out;
    for (const auto& e : amps.entries) out.push_back(e.amplitude);
    return out;
}

double max_abs_diff(const std::vector<Complex>& a, std::span<const Complex> b) {
    EXPECT_EQ(a.size(), b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// A(i,j,k) and D(i,l,m) are the two largest tensors; only i is on both.
TensorNetwork two_hubs() {
    return tktest::make_network({{0, 1, 2}, {1, 6}, {2}, {0, 3, 4}, {3}, {4}},
                                {{0, 4}, {1, 4}, {2, 4}, {3, 4}, {4, 4}, {6, 2}}, {6}, 3);
}

}  // namespace

TEST(SliceSet, MixedRadixLastFastest) {
    const SliceSet s{{5, 9}, {2, 2}};
    EXPECT_EQ(s.subtask_count(), 4U);
    EXPECT_EQ(s.assignment(0), (std::vector<std::size_t>{0, 0}));
    EXPECT_EQ(s.assignment(1), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(s.assignment(3), (std::vector<std::size_t>{1, 1}));
    EXPECT_THROW((void)s.assignment(4), ValidationError);
    const SliceSet mixed{{1, 2}, {3, 2}};
    EXPECT_EQ(mixed.assignment(5), (std::vector<std::size_t>{2, 1}));
    EXPECT_EQ(SliceSet{}.subtask_count(), 1U);
}

TEST(PeakMemory, CountsOperandsOutputAndScratch) {
    const auto net = tktest::make_network({{0, 1}, {1, 2}}, {{0, 2}, {1, 3}, {2, 2}}, {0, 2}, 1);
    const ContractionTree tree(full_shape(net), {{0, 1}});
    EXPECT_EQ(peak_memory(tree), 8.0 * (6 + 6 + 4 + 6));
}

TEST(SelectSliceBond, SharedBondOfLargestNodes) {
    const auto net = two_hubs();
    const auto tree = greedy_init(full_shape(net));
    EXPECT_EQ(tree.largest_size(), 64.0);
    EXPECT_EQ(select_slice_bond(tree), 0);
}

TEST(SelectSliceBond, SymmetricTieTakesLowestId) {
    const auto net = tktest::make_network({{0, 1, 2}, {0, 1}}, {{0, 2}, {1, 2}, {2, 2}}, {2}, 4);
    EXPECT_EQ(select_slice_bond(greedy_init(full_shape(net))), 0);
}

TEST(SelectSliceBond, NothingLeftToSlice) {
    const auto net = tktest::make_network({{0}, {1}}, {{0, 2}, {1, 2}}, {0, 1}, 4);
    EXPECT_THROW((void)select_slice_bond(greedy_init(full_shape(net))), ResourceError);
}

TEST(ApplySlice, DotProductSplitsIntoScalarProducts) {
    const auto net = tktest::make_network({{0, 1}, {0}}, {{0, 2}, {1, 2}}, {1}, 5);
    const auto tree = greedy_init(full_shape(net));
    const auto sliced = apply_slice(net, tree, 0);
    EXPECT_TRUE(sliced.network.bond(0).sliced);
    const SliceSet slices{{0}, {2}};
    EXPECT_EQ(slices.subtask_count(), 2U);
    for (std::size_t t = 0; t < 2; ++t) {
        const auto sub = subtask_network(sliced.network, slices, t);
        EXPECT_EQ(sub.tensors[1].rank(), 0U);
        EXPECT_EQ(sub.tensors[1].data()[0], net.tensors[1].data()[t]);
    }
    EXPECT_EQ(sliced.tree.total_macs(), tree.total_macs() / 2);
    EXPECT_LT(max_abs_diff(execute(sliced.network, sliced.tree, slices), tktest::naive_contract_all(net).data()),
              1e-12);
}

TEST(ApplySlice, HalvesStepsThatCarryTheBond) {
    const auto net = two_hubs();
    const auto tree = greedy_init(full_shape(net));
    const auto sliced = apply_slice(net, tree, 1);
    for (std::size_t i = 0; i < tree.step_count(); ++i) {
        const int id = tree.step_node(i);
        const auto before = tree.node_cost(id).tcc;
        const auto spec = tree.spec(id);
        const bool carries = std::count(spec.lhs.begin(), spec.lhs.end(), 1) + std::count(spec.rhs.begin(), spec.rhs.end(), 1) > 0;
        EXPECT_EQ(sliced.tree.node_cost(id).tcc, carries ? before / 4 : before);
    }
}

TEST(ApplySlice, BondOffTheLargestNodeKeepsTsc) {
    const auto net = two_hubs();
    const auto tree = greedy_init(full_shape(net));
    EXPECT_EQ(apply_slice(net, tree, 1).tree.largest_size(), tree.largest_size());
    EXPECT_LT(apply_slice(net, tree, 0).tree.largest_size(), tree.largest_size());
}

TEST(ApplySlice, RejectsOpenOrRepeatedBonds) {
    const auto net = two_hubs();
    const auto tree = greedy_init(full_shape(net));
    EXPECT_THROW((void)apply_slice(net, tree, 6), ValidationError);
    const auto once = apply_slice(net, tree, 0);
    EXPECT_THROW((void)apply_slice(once.network, once.tree, 0), ValidationError);
    EXPECT_THROW((void)apply_slice(net, tree, 77), ValidationError);
}

TEST(SubtaskNetwork, FixesSlicedValues) {
    const auto net = two_hubs();
    const SliceSet one{{0}, {4}};
    const auto sub = subtask_network(net, one, 0);
    EXPECT_FALSE(sub.tensors[0].has_label(0));
    const auto expect = net.tensors[0].fixed(0, 0);
    ASSERT_EQ(sub.tensors[0].size(), expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_EQ(sub.tensors[0].data()[i], expect.data()[i]);
    const SliceSet two{{1, 2}, {4, 4}};
    const auto last = subtask_network(net, two, 15);
    for (std::size_t i = 0; i < last.tensors[0].size(); ++i) {
        EXPECT_EQ(last.tensors[0].data()[i], net.tensors[0].fixed(1, 3).fixed(2, 3).data()[i]);
    }
}

TEST(SubtaskNetwork, SubtaskSumEqualsWholeByNaiveContraction) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto net = tktest::random_network(6, 2, 3, 0.5, 40 + seed);
        std::vector<Label> closed;
        for (const auto& [id, b] : net.bonds) {
            if (!b.open) closed.push_back(id);
        }
        SliceSet slices;
        for (std::size_t i = 0; i < 2 && i < closed.size(); ++i) {
            slices.bonds.push_back(closed[i * 2 % closed.size()]);
            slices.dims.push_back(net.bond(slices.bonds.back()).dim);
        }
        if (slices.bonds.size() == 2 && slices.bonds[0] == slices.bonds[1]) slices = {{slices.bonds[0]}, {slices.dims[0]}};
        const auto whole = tktest::naive_contract_all(net);
        std::vector<Complex> sum(whole.size());
        for (std::size_t t = 0; t < slices.subtask_count(); ++t) {
            const auto part = tktest::naive_contract_all(subtask_network(net, slices, t));
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += part.data()[i];
        }
        EXPECT_LT(max_abs_diff(sum, whole.data()), 1e-10);
    }
}

TEST(DynamicSlice, BudgetAlreadyMet) {
    const auto net = tktest::random_network(8, 2, 3, 0.4, 60);
    const auto tree = greedy_init(full_shape(net));
    DynamicSliceOptions opt;
    opt.mem_budget = peak_memory(tree);
    const auto res = dynamic_slice(net, tree, opt);
    EXPECT_TRUE(res.slices.empty());
    EXPECT_EQ(res.tree.steps(), tree.steps());
}

TEST(DynamicSlice, HalvedBudgetIsMetAndSumsAgree) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto net = tktest::random_network(8, 2, 3, 0.5, 70 + seed);
        const auto tree = greedy_init(full_shape(net));
        DynamicSliceOptions opt;
        opt.mem_budget = peak_memory(tree) / 2;
        opt.seed = seed;
        const auto res = dynamic_slice(net, tree, opt);
        EXPECT_GE(res.slices.bonds.size(), 1U);
        EXPECT_LE(res.peak_bytes, opt.mem_budget);
        EXPECT_EQ(res.peak_bytes, peak_memory(res.tree));
        for (Label b : res.slices.bonds) EXPECT_TRUE(res.network.bond(b).sliced);
        const auto whole = execute(net, tree, {});
        // Random normal data gives results far from unit scale; compare relative to the largest entry.
        double scale = 0.0;
        for (const auto& z : whole) scale = std::max(scale, std::abs(z));
        EXPECT_LT(max_abs_diff(execute(res.network, res.tree, res.slices), whole), 1e-12 * scale);
    }
}

TEST(DynamicSlice, Deterministic) {
    const auto net = tktest::random_network(9, 2, 3, 0.5, 80);
    const auto tree = greedy_init(full_shape(net));
    DynamicSliceOptions opt;
    opt.mem_budget = peak_memory(tree) / 4;
    const auto a = dynamic_slice(net, tree, opt);
    const auto b = dynamic_slice(net, tree, opt);
    EXPECT_EQ(a.slices.bonds, b.slices.bonds);
    EXPECT_EQ(a.tree.steps(), b.tree.steps());
}

TEST(DynamicSlice, BudgetBelowLargestLeaf) {
    const auto net = two_hubs();
    const auto tree = greedy_init(full_shape(net));
    DynamicSliceOptions opt;
    opt.mem_budget = 64.0 * 8 - 1;
    EXPECT_THROW((void)dynamic_slice(net, tree, opt), ResourceError);
}

TEST(DynamicSlice, UnreachableBudget) {
    // Open bonds alone make the last step larger than the largest input.
    const auto net = tktest::make_network({{0, 1, 2, 3}, {3, 4}}, {{0, 2}, {1, 2}, {2, 2}, {3, 2}, {4, 2}}, {0, 1, 2, 4}, 6);
    const auto tree = greedy_init(full_shape(net));
    DynamicSliceOptions opt;
    opt.mem_budget = 16.0 * 8;
    EXPECT_THROW((void)dynamic_slice(net, tree, opt), ResourceError);
}
