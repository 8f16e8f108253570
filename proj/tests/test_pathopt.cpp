#include "support.hpp"

#include "tenkontract/engine.hpp"
#include "tenkontract/error.hpp"
#include "tenkontract/pathopt.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tenkontract;

namespace {

// (2x4)(4x8)(8x2) with the outer indices open.
TensorNetwork matrix_chain() {
    return tktest::make_network({{0, 1}, {1, 2}, {2, 3}}, {{0, 2}, {1, 4}, {2, 8}, {3, 2}}, {0, 3}, 1);
}

std::shared_ptr<const NetworkShape> full_shape(const TensorNetwork& net) {
    return tktest::shape_of(net, SparseState::full(net.n_qubits));
}

std::vector<int> sorted_leaves(const ContractionTree& t, int node) { return t.leaves_under(node); }

std::vector<Complex> execute(const TensorNetwork& net, const ContractionTree& tree) {
    const auto amps = run_simulation(net, tree, {}, PrecisionSchedule::reference());
    std::vector<Complex> out;
    for (const auto& e : amps.entries) out.push_back(e.amplitude);
    return out;
}

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    EXPECT_EQ(a.size(), b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST(StepCost, SquareMatrixProduct) {
    EinsumSpec s;
    s.lhs = {0, 2};
    s.rhs = {2, 1};
    s.out = {0, 1};
    s.dims = {{0, 4}, {1, 4}, {2, 4}};
    const auto c = step_cost(s);
    EXPECT_EQ(c.tcc, 512.0);
    EXPECT_EQ(c.tmc, 384.0);
}

TEST(StepCost, OuterProduct) {
    EinsumSpec s;
    s.lhs = {0};
    s.rhs = {1};
    s.out = {0, 1};
    s.dims = {{0, 2}, {1, 2}};
    EXPECT_EQ(step_cost(s).tcc, 32.0);
}

TEST(StepCost, FullTrace) {
    EinsumSpec s;
    s.lhs = {0, 1};
    s.rhs = {0, 1};
    s.out = {};
    s.dims = {{0, 2}, {1, 2}};
    const auto c = step_cost(s);
    EXPECT_EQ(c.tcc, 32.0);
    EXPECT_EQ(c.tmc, 8.0 * (4 + 4 + 1));
}

TEST(StepCost, FormatSizes) {
    EXPECT_EQ(CostModel::for_format(formats::fp32()).sizeof_data, 8.0);
    EXPECT_EQ(CostModel::for_format(formats::fp64()).sizeof_data, 16.0);
    EXPECT_EQ(CostModel::for_format(formats::tf32()).sizeof_data, 8.0);
    EXPECT_EQ(CostModel::for_format(formats::fp16()).sizeof_data, 4.0);
}

TEST(Score, DirectEvaluation) {
    ScoreParams p;
    p.alpha = 1.0;
    p.beta = 1.0;
    const double s = score_formula(std::ldexp(1.0, 20), std::ldexp(1.0, 10), std::ldexp(1.0, 10), p);
    EXPECT_NEAR(s, 30.00141, 1e-5);
    EXPECT_DOUBLE_EQ(s, std::log2(std::ldexp(1.0, 20) + std::ldexp(1.0, 10)) + 10.0);
}

TEST(Score, BetaZeroIgnoresLargestTensor) {
    ScoreParams p;
    p.beta = 0.0;
    EXPECT_EQ(score_formula(1e6, 1e3, 16, p), score_formula(1e6, 1e3, 1 << 20, p));
}

TEST(Score, AlphaBetaZeroIsLogTcc) {
    ScoreParams p;
    p.alpha = 0.0;
    p.beta = 0.0;
    EXPECT_DOUBLE_EQ(score_formula(12345.0, 1e9, 1e9, p), std::log2(12345.0));
}

TEST(Score, BalancePenaltyOnlyAdds) {
    const auto net = tktest::random_network(6, 2, 3, 0.5, 4);
    const auto tree = greedy_init(full_shape(net));
    ScoreParams plain;
    ScoreParams balanced;
    balanced.balance.enabled = true;
    EXPECT_GT(tree_score(tree, balanced), tree_score(tree, plain));
}

TEST(Tree, RejectsMalformedSteps) {
    const auto shape = full_shape(matrix_chain());
    EXPECT_THROW(ContractionTree(shape, {{0, 0}, {3, 2}}), ValidationError);
    EXPECT_THROW(ContractionTree(shape, {{0, 1}}), ValidationError);
    EXPECT_THROW(ContractionTree(shape, {{0, 1}, {0, 2}}), ValidationError);
    EXPECT_THROW(ContractionTree(shape, {{0, 1}, {4, 2}}), ValidationError);
}

TEST(Tree, AnnotatedTotalsMatchStepCosts) {
    const auto net = tktest::random_network(7, 3, 3, 0.4, 12);
    const auto tree = greedy_init(full_shape(net));
    double tcc = 0.0, tmc = 0.0;
    for (std::size_t i = 0; i < tree.step_count(); ++i) {
        const auto c = step_cost(tree.spec(tree.step_node(i)));
        tcc += c.tcc;
        tmc += c.tmc;
        EXPECT_EQ(c.tcc, tree.node_cost(tree.step_node(i)).tcc);
    }
    EXPECT_EQ(tcc, tree.total_tcc());
    EXPECT_EQ(tmc, tree.total_tmc());
}

TEST(Greedy, TwoTensors) {
    const auto net = tktest::make_network({{0, 1}, {1, 2}}, {{0, 2}, {1, 3}, {2, 2}}, {0, 2}, 2);
    const auto tree = greedy_init(full_shape(net));
    EXPECT_EQ(tree.steps(), (std::vector<std::pair<int, int>>{{0, 1}}));
}

TEST(Greedy, MatrixChainPicksSmallerAssociation) {
    const auto shape = full_shape(matrix_chain());
    const auto tree = greedy_init(shape);
    EXPECT_EQ(tree.total_macs(), 80.0);
    EXPECT_EQ(sorted_leaves(tree, tree.node(tree.root()).right), (std::vector<int>{1, 2}));
    // Exhaustive oracle: the other association costs 96.
    EXPECT_EQ(ContractionTree(shape, {{0, 1}, {3, 2}}).total_macs(), 96.0);
    EXPECT_EQ(ContractionTree(shape, {{0, 2}, {3, 1}}).total_macs(), 2.0 * 4 * 8 * 2 + 4.0 * 4 * 8);
}

TEST(Greedy, DisconnectedComponentsJoinLast) {
    const auto net = tktest::make_network({{0, 2}, {0}, {1, 3}, {1}}, {{0, 3}, {1, 3}, {2, 2}, {3, 2}}, {2, 3}, 5);
    const auto tree = greedy_init(full_shape(net));
    const auto& root = tree.node(tree.root());
    std::set<std::vector<int>> parts{tree.leaves_under(root.left), tree.leaves_under(root.right)};
    EXPECT_EQ(parts, (std::set<std::vector<int>>{{0, 1}, {2, 3}}));
}

TEST(Greedy, TiesBreakOnLowestIds) {
    // Four identical tensors on a ring: every neighbouring pair ties.
    const auto net = tktest::make_network({{0, 3, 4}, {0, 1}, {1, 2}, {2, 3}}, {{0, 2}, {1, 2}, {2, 2}, {3, 2}, {4, 2}},
                                          {4}, 6);
    const auto tree = greedy_init(full_shape(net));
    EXPECT_EQ(tree.steps().front(), (std::pair<int, int>{1, 2}));
}

TEST(LocalUpdate, ContractLastTwoFirst) {
    const auto shape = full_shape(tktest::random_network(3, 1, 3, 1.0, 7));
    ContractionTree tree(shape, {{0, 1}, {3, 2}});
    ASSERT_TRUE(local_update(tree, 4, 1));
    tree.canonicalize();
    const auto& root = tree.node(tree.root());
    EXPECT_EQ(root.left, 0);
    EXPECT_EQ(tree.leaves_under(root.right), (std::vector<int>{1, 2}));
}

TEST(LocalUpdate, LeafChildrenOnly) {
    const auto shape = full_shape(tktest::random_network(2, 1, 3, 1.0, 7));
    ContractionTree tree(shape, {{0, 1}});
    EXPECT_FALSE(local_update(tree, 2, 0));
    EXPECT_FALSE(local_update(tree, 0, 0));
}

TEST(LocalUpdate, DirectionsInvertAndVisitAllAssociations) {
    const auto net = tktest::random_network(3, 2, 4, 1.0, 3);
    const auto shape = full_shape(net);
    std::set<double> reference;
    for (const auto& steps : std::vector<std::vector<std::pair<int, int>>>{
             {{0, 1}, {3, 2}}, {{0, 2}, {3, 1}}, {{1, 2}, {0, 3}}}) {
        reference.insert(tree_score(ContractionTree(shape, steps), {}));
    }
    ContractionTree tree(shape, {{0, 1}, {3, 2}});
    const double start = tree_score(tree, {});
    std::set<double> seen{start};
    ASSERT_TRUE(local_update(tree, 4, 0, Pivot::Left));
    seen.insert(tree_score(tree, {}));
    ASSERT_TRUE(local_update(tree, 4, 0, Pivot::Left));
    EXPECT_EQ(tree_score(tree, {}), start);
    ASSERT_TRUE(local_update(tree, 4, 1, Pivot::Left));
    seen.insert(tree_score(tree, {}));
    ASSERT_TRUE(local_update(tree, 4, 1, Pivot::Right));
    EXPECT_EQ(tree_score(tree, {}), start);
    EXPECT_EQ(seen, reference);
}

TEST(LocalUpdate, PreservesContractedValue) {
    const auto net = tktest::random_network(5, 2, 3, 0.5, 21);
    const auto shape = full_shape(net);
    ContractionTree tree = greedy_init(shape);
    const auto expect = execute(net, tree);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 30; ++i) {
        const int node = static_cast<int>(tree.leaf_count()) +
                         std::uniform_int_distribution<int>(0, static_cast<int>(tree.step_count()) - 1)(rng);
        if (!local_update(tree, node, static_cast<int>(rng() & 1U))) continue;
        ContractionTree copy = tree;
        copy.canonicalize();
        EXPECT_LT(max_abs_diff(execute(net, copy), expect), 1e-10);
    }
}

TEST(LocalUpdate, TotalsStayConsistent) {
    const auto shape = full_shape(tktest::random_network(7, 2, 3, 0.4, 5));
    ContractionTree tree = greedy_init(shape);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        const int node = static_cast<int>(tree.leaf_count() + rng() % tree.step_count());
        (void)local_update(tree, node, static_cast<int>(rng() & 1U));
    }
    ContractionTree fresh = tree;
    fresh.reannotate();
    EXPECT_NEAR(fresh.total_macs(), tree.total_macs(), 1e-9 * tree.total_macs());
    EXPECT_NEAR(fresh.total_elements(), tree.total_elements(), 1e-9 * tree.total_elements());
}

TEST(Canonicalize, PostOrderNumbering) {
    const auto shape = full_shape(tktest::random_network(6, 2, 3, 0.5, 8));
    ContractionTree tree = greedy_init(shape);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) (void)local_update(tree, static_cast<int>(6 + rng() % 5), static_cast<int>(rng() & 1U));
    const double macs = tree.total_macs();
    tree.canonicalize();
    EXPECT_TRUE(tree.is_canonical());
    EXPECT_EQ(tree.root(), static_cast<int>(tree.node_count()) - 1);
    for (std::size_t i = 0; i < tree.step_count(); ++i) {
        const auto& n = tree.node(tree.step_node(i));
        EXPECT_LT(n.left, tree.step_node(i));
        EXPECT_LT(n.right, tree.step_node(i));
    }
    EXPECT_NEAR(tree.total_macs(), macs, 1e-9 * macs);
}

TEST(Pins, SurviveReannotate) {
    const auto shape = full_shape(tktest::random_network(4, 2, 3, 0.5, 9));
    ContractionTree tree = greedy_init(shape);
    const int node = tree.step_node(0);
    auto order = tree.node(node).labels;
    std::reverse(order.begin(), order.end());
    tree.pin_order(node, order);
    tree.reannotate();
    EXPECT_EQ(tree.node(node).labels, order);
    EXPECT_TRUE(tree.node(node).pinned);
    tree.clear_pins();
    EXPECT_FALSE(tree.node(node).pinned);
    EXPECT_THROW(tree.pin_order(node, {999}), ValidationError);
}

TEST(Anneal, TemperatureSchedule) {
    const AnnealSchedule s{2.0, 0.5, 0.5, 10};
    EXPECT_EQ(s.temperature(0), 2.0);
    EXPECT_EQ(s.temperature(1), 1.0);
    EXPECT_EQ(s.temperature(5), 0.5);
}

TEST(Anneal, MatrixChainReachesOptimum) {
    const auto shape = full_shape(matrix_chain());
    const ContractionTree bad(shape, {{0, 1}, {3, 2}});
    ScoreParams p;
    p.alpha = 0.0;
    p.beta = 0.0;
    const auto best = sa_optimize(bad, p, AnnealSchedule{1.0, 0.01, 0.9, 50}, 1);
    EXPECT_EQ(best.total_macs(), 80.0);
}

TEST(Anneal, ZeroSweepsReturnsGreedy) {
    const auto shape = full_shape(tktest::random_network(7, 2, 3, 0.4, 10));
    const auto greedy = greedy_init(shape);
    const auto sa = sa_optimize(shape, ScoreParams{}, AnnealSchedule{2.0, 0.02, 0.98, 0}, 3);
    EXPECT_EQ(sa.steps(), greedy.steps());
}

TEST(Anneal, DeterministicAndNeverWorseThanGreedy) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto shape = full_shape(tktest::random_network(10, 3, 3, 0.3, 100 + seed));
        const AnnealSchedule sched{2.0, 0.02, 0.95, 40};
        const auto a = sa_optimize(shape, ScoreParams{}, sched, seed);
        const auto b = sa_optimize(shape, ScoreParams{}, sched, seed);
        EXPECT_EQ(a.steps(), b.steps());
        EXPECT_TRUE(a.is_canonical());
        EXPECT_LE(tree_score(a, {}), tree_score(greedy_init(shape), {}) + 1e-12);
    }
}

TEST(Anneal, TraceRecordsMetropolisDecisions) {
    const auto shape = full_shape(tktest::random_network(8, 2, 3, 0.4, 13));
    std::vector<AnnealStep> trace;
    (void)sa_optimize(greedy_init(shape), ScoreParams{}, AnnealSchedule{2.0, 0.02, 0.9, 5}, 4, &trace);
    ASSERT_FALSE(trace.empty());
    for (const auto& s : trace) {
        if (s.delta <= 0.0) EXPECT_TRUE(s.accepted);
        EXPECT_GE(s.temperature, 0.02);
    }
}

TEST(Anneal, SmallNetworksMatchExhaustiveOptimum) {
    int matched = 0;
    const int total = 20;
    for (int i = 0; i < total; ++i) {
        const int n = 3 + i % 5;
        const auto net = tktest::random_network(n, 1 + i % 3, 3, 0.4, 500 + static_cast<std::uint64_t>(i));
        const auto tree = sa_optimize(full_shape(net), ScoreParams{}, AnnealSchedule{}, static_cast<std::uint64_t>(i));
        const double best = tktest::best_exhaustive_score(net, ScoreParams{}.alpha, ScoreParams{}.beta);
        const double got = tree_score(tree, {});
        EXPECT_GE(got, best - 1e-9);
        matched += got <= best + 1e-9;
    }
    EXPECT_GE(matched, 19);
}

TEST(Anneal, GridNetworkNotWorseThanGreedy) {
    // 4x4 grid, dims 2, one open bond per corner.
    std::vector<std::vector<Label>> leaves(16);
    std::map<Label, std::size_t> dims;
    Label next = 0;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const int t = r * 4 + c;
            if (c + 1 < 4) {
                leaves[static_cast<std::size_t>(t)].push_back(next);
                leaves[static_cast<std::size_t>(t + 1)].push_back(next);
                dims[next++] = 2;
            }
            if (r + 1 < 4) {
                leaves[static_cast<std::size_t>(t)].push_back(next);
                leaves[static_cast<std::size_t>(t + 4)].push_back(next);
                dims[next++] = 2;
            }
        }
    }
    std::vector<Label> open;
    for (int t : {0, 3, 12, 15}) {
        leaves[static_cast<std::size_t>(t)].push_back(next);
        dims[next] = 2;
        open.push_back(next++);
    }
    const auto shape = full_shape(tktest::make_network(leaves, dims, open, 1));
    const auto sa = sa_optimize(shape, ScoreParams{}, AnnealSchedule{}, 1);
    EXPECT_LE(tree_score(sa, {}), tree_score(greedy_init(shape), {}));
}

TEST(Anneal, RestartsIndependentOfWorkerCount) {
    const auto shape = full_shape(tktest::random_network(9, 2, 3, 0.4, 31));
    const AnnealSchedule sched{2.0, 0.02, 0.9, 20};
    const auto one = sa_optimize_restarts(shape, ScoreParams{}, sched, 5, 4, 1);
    const auto many = sa_optimize_restarts(shape, ScoreParams{}, sched, 5, 4, 3);
    EXPECT_EQ(one.steps(), many.steps());
    double best = INFINITY;
    for (int i = 0; i < 4; ++i) best = std::min(best, tree_score(sa_optimize(shape, {}, sched, 5 + i), {}));
    EXPECT_EQ(tree_score(one, {}), best);
}

TEST(PathIndependence, AnyTwoTreesAgree) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto net = tktest::random_network(4 + static_cast<int>(seed % 5), 3, 3, 0.4, 900 + seed);
        const auto shape = full_shape(net);
        const auto greedy = greedy_init(shape);
        const auto sa = sa_optimize(shape, ScoreParams{0.0, 0.0}, AnnealSchedule{5.0, 1.0, 0.9, 10}, seed);
        EXPECT_LT(max_abs_diff(execute(net, greedy), execute(net, sa)), 1e-10);
        const auto dense = tktest::naive_contract_all(net);
        const auto got = execute(net, greedy);
        std::vector<Complex> want(dense.data().begin(), dense.data().end());
        EXPECT_LT(max_abs_diff(got, want), 1e-10);
    }
}
