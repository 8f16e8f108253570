#include "support.hpp"

#include "tenkontract/amplitudes.hpp"
#include "tenkontract/engine.hpp"
#include "tenkontract/error.hpp"
#include "tenkontract/order_file.hpp"
#include "tenkontract/schedule.hpp"

#include <gtest/gtest.h>

using namespace tenkontract;

TEST(AmplitudeFile, RoundTripIsExact) {
    AmplitudeSet s;
    s.n_qubits = 5;
    s.entries = {{0b10110, Complex(0.1, -1.0 / 3.0)}, {0b10110, Complex(0.1, -1.0 / 3.0)}, {3, Complex(-2e-300, 7.5)}};
    const auto back = parse_amplitudes(format_amplitudes(s));
    EXPECT_EQ(back.n_qubits, 5);
    ASSERT_EQ(back.entries.size(), 3U);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back.entries[i].bitstring, s.entries[i].bitstring);
        EXPECT_EQ(back.entries[i].amplitude, s.entries[i].amplitude);
    }
    EXPECT_EQ(format_amplitudes(s).substr(0, 6), "10110 ");
}

TEST(AmplitudeFile, FileRoundTrip) {
    tktest::TempDir dir;
    AmplitudeSet s;
    s.n_qubits = 2;
    s.entries = {{1, Complex(0.25, 0.5)}};
    save_amplitudes(s, dir.file("a.txt"));
    EXPECT_EQ(load_amplitudes(dir.file("a.txt")).entries[0].amplitude, Complex(0.25, 0.5));
    EXPECT_THROW((void)load_amplitudes(dir.file("missing.txt")), ParseError);
}

TEST(AmplitudeFile, MalformedLinesReportLineNumber) {
    try {
        (void)parse_amplitudes("01 1 0\n# note\n10 0.5\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3U);
    }
    EXPECT_THROW((void)parse_amplitudes("01 1 0\n011 1 0\n"), ParseError);
    EXPECT_THROW((void)parse_amplitudes("0x 1 0\n"), ParseError);
}

TEST(AmplitudeSet, ExpandFollowsSampleOrder) {
    AmplitudeSet s;
    s.n_qubits = 2;
    s.entries = {{0, Complex(1.0)}, {2, Complex(2.0)}};
    const auto e = s.expand({2, 0, 2});
    ASSERT_EQ(e.entries.size(), 3U);
    EXPECT_EQ(e.entries[0].amplitude, Complex(2.0));
    EXPECT_EQ(e.entries[1].amplitude, Complex(1.0));
    EXPECT_EQ(e.entries[2].bitstring, 2U);
    EXPECT_THROW((void)s.expand({3}), ValidationError);
}

TEST(BitstringFile, OrderAndRepeatsPreserved) {
    int n = 0;
    const auto b = parse_bitstrings("# samples\n101\n\n001\n101\n", n);
    EXPECT_EQ(n, 3);
    EXPECT_EQ(b, (std::vector<Bits>{5, 1, 5}));
    tktest::TempDir dir;
    save_bitstrings(b, 3, dir.file("b.txt"));
    int m = 0;
    EXPECT_EQ(load_bitstrings(dir.file("b.txt"), m), b);
    EXPECT_EQ(m, 3);
}

TEST(BitstringFile, EmptyOrMalformedIsParseError) {
    int n = 0;
    EXPECT_THROW((void)parse_bitstrings("# nothing\n\n", n), ParseError);
    n = 0;
    EXPECT_THROW((void)parse_bitstrings("01\n012\n", n), ParseError);
    n = 0;
    EXPECT_THROW((void)parse_bitstrings("01 10\n", n), ParseError);
    n = 4;
    EXPECT_THROW((void)parse_bitstrings("010\n", n), ParseError);
}

TEST(OrderFile, RoundTripKeepsTreeSlicesAndPins) {
    const Circuit c = tktest::random_circuit(7, 7, 21);
    const auto samples = tktest::random_bitstrings(7, 12, 21);
    const auto state = SparseState::sparse(7, samples);
    const auto net = circuit_to_network(c, state);
    const auto shape = tktest::shape_of(net, state);
    const auto tree = sa_optimize(shape, ScoreParams{}, AnnealSchedule{2.0, 0.02, 0.9, 10}, 21);
    DynamicSliceOptions opt;
    opt.mem_budget = peak_memory(tree) / 4;
    const auto sliced = dynamic_slice(net, tree, opt);
    const auto reordered = reorder_topk(sliced.tree, 10).tree;
    const auto doc = order_to_json(reordered, sliced.slices, ScoreParams{});
    // Rebuild from a fresh network and config cache, as a separate process would.
    const auto text = doc.dump();
    const auto loaded = order_from_json(nlohmann::json::parse(text), circuit_to_network(c, state),
                                        std::make_shared<const ConfigTableCache>(state));
    EXPECT_EQ(loaded.slices.bonds, sliced.slices.bonds);
    EXPECT_EQ(loaded.slices.dims, sliced.slices.dims);
    ASSERT_EQ(loaded.tree.node_count(), reordered.node_count());
    EXPECT_EQ(loaded.tree.steps(), reordered.steps());
    // Merged label ids are local to a shape; compare them through their qubit masks.
    auto keyed = [](const ContractionTree& t, int id) {
        std::vector<std::pair<bool, std::uint64_t>> out;
        for (Label l : t.node(id).labels) {
            const bool merged = t.shape().is_merged(l);
            out.emplace_back(merged, merged ? t.shape().qubit_mask(l) : static_cast<std::uint64_t>(l));
        }
        return out;
    };
    for (std::size_t i = 0; i < reordered.node_count(); ++i) {
        EXPECT_EQ(keyed(loaded.tree, static_cast<int>(i)), keyed(reordered, static_cast<int>(i)));
    }
    EXPECT_EQ(loaded.tree.total_macs(), reordered.total_macs());
    EXPECT_EQ(order_to_json(loaded.tree, loaded.slices, ScoreParams{}), doc);
    const auto a = run_simulation(sliced.network, reordered, sliced.slices, PrecisionSchedule::reference());
    const auto b = run_simulation(c, state, loaded.tree, loaded.slices, PrecisionSchedule::reference());
    ASSERT_EQ(a.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) EXPECT_EQ(a.entries[i].amplitude, b.entries[i].amplitude);
}

TEST(OrderFile, StepsCarrySpecAndCost) {
    const Circuit c = tktest::random_circuit(4, 3, 22);
    const auto state = SparseState::full(4);
    const auto tree = greedy_init(tktest::shape_of(circuit_to_network(c, state), state));
    const auto doc = order_to_json(tree, {}, ScoreParams{});
    ASSERT_EQ(doc.at("steps").size(), tree.step_count());
    const auto& s0 = doc.at("steps")[0];
    EXPECT_EQ(s0.at("spec").get<std::string>(), tree.spec(tree.step_node(0)).to_string());
    for (const auto& step : doc.at("steps")) EXPECT_EQ(step.at("spec").get<std::string>().find('*'), std::string::npos);
    EXPECT_EQ(s0.at("Tcc").get<double>(), tree.node_cost(tree.step_node(0)).tcc);
    EXPECT_EQ(doc.at("score").get<double>(), tree_score(tree, ScoreParams{}));
    EXPECT_EQ(doc.at("params").at("alpha").get<double>(), 64.0);
}

TEST(OrderFile, MismatchedNetworkRejected) {
    const Circuit c = tktest::random_circuit(4, 3, 23);
    const auto state = SparseState::full(4);
    const auto tree = greedy_init(tktest::shape_of(circuit_to_network(c, state), state));
    const auto doc = order_to_json(tree, {}, ScoreParams{});
    const Circuit other = tktest::random_circuit(4, 5, 23);
    const auto configs = std::make_shared<const ConfigTableCache>(state);
    EXPECT_THROW((void)order_from_json(doc, circuit_to_network(other, state), configs), ValidationError);
    auto bad = doc;
    bad["slices"] = std::vector<Label>{999999};
    EXPECT_THROW((void)order_from_json(bad, circuit_to_network(c, state), configs), ValidationError);
    auto broken = doc;
    broken.erase("steps");
    EXPECT_THROW((void)order_from_json(broken, circuit_to_network(c, state), configs), ParseError);
}

TEST(ScheduleFile, RoundTrip) {
    PrecisionSchedule s({formats::tf32(), SplitMode::Triple}, formats::fp32());
    s.set_override(3, {formats::fp16(), SplitMode::Single});
    s.set_override(7, {formats::fp64(), SplitMode::Single});
    s.rescale = true;
    const auto back = schedule_from_json(nlohmann::json::parse(schedule_to_json(s).dump()));
    EXPECT_EQ(back.default_setting(), s.default_setting());
    EXPECT_EQ(back.accumulation(), s.accumulation());
    EXPECT_EQ(back.overrides(), s.overrides());
    EXPECT_TRUE(back.rescale);
    EXPECT_EQ(back.at(3), (PrecisionSetting{formats::fp16(), SplitMode::Single}));
    EXPECT_EQ(back.at(4), s.default_setting());
    EXPECT_THROW((void)schedule_from_json(nlohmann::json::object()), ParseError);
}

TEST(ScheduleFile, TopkScheduleCoversCostliestSteps) {
    const Circuit c = tktest::random_circuit(6, 6, 24);
    const auto state = SparseState::full(6);
    const auto tree = greedy_init(tktest::shape_of(circuit_to_network(c, state), state));
    const PrecisionSetting low{formats::tf32(), SplitMode::Single};
    const PrecisionSetting high{formats::tf32(), SplitMode::Triple};
    const auto ranked = rank_steps_by_cost(tree);
    const auto m = schedule_from_topk(tree, 3, low, high);
    double moved = 0.0;
    for (int i = 0; i < 3; ++i) {
        const auto step = static_cast<std::size_t>(ranked[static_cast<std::size_t>(i)]) - tree.leaf_count();
        EXPECT_EQ(m.schedule.at(step), low);
        moved += tree.node_cost(ranked[static_cast<std::size_t>(i)]).tcc;
    }
    EXPECT_EQ(m.schedule.at(static_cast<std::size_t>(ranked[3]) - tree.leaf_count()), high);
    EXPECT_NEAR(m.replaced_tcc_ratio, moved / tree.total_tcc(), 1e-15);
    EXPECT_EQ(m.schedule.accumulation(), formats::fp32());
    EXPECT_EQ(schedule_from_topk(tree, 0, low, high).replaced_tcc_ratio, 0.0);
    EXPECT_NEAR(schedule_from_topk(tree, tree.step_count(), low, high).replaced_tcc_ratio, 1.0, 1e-12);
}
