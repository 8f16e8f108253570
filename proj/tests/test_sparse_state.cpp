#include "support.hpp"

#include "tenkontract/bitstring.hpp"
#include "tenkontract/error.hpp"
#include "tenkontract/sparse_state.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace tenkontract;

TEST(Bitstring, QubitZeroIsMostSignificant) {
    EXPECT_EQ(parse_bitstring("100", 3), 4U);
    EXPECT_EQ(format_bitstring(1, 3), "001");
    EXPECT_EQ(bit_of(4, 3, 0), 1);
    EXPECT_EQ(bit_of(4, 3, 2), 0);
    EXPECT_THROW((void)parse_bitstring("10", 3), ValidationError);
    EXPECT_THROW((void)parse_bitstring("1x0", 3), ValidationError);
}

TEST(Bitstring, ProjectionAndRestriction) {
    EXPECT_EQ(project_bits(0b101, 3, {0, 2}), 0b11U);
    EXPECT_EQ(project_bits(0b101, 3, {1}), 0U);
    EXPECT_EQ(restrict_config(0b110, {0, 3, 5}, {0, 5}), 0b10U);
    EXPECT_THROW((void)restrict_config(0, {0, 1}, {2}), ValidationError);
    EXPECT_EQ(mask_qubits(0b1010), (std::vector<int>{1, 3}));
}

TEST(SparseStateMake, ThreeSamples) {
    const auto s = SparseState::make(3, StateMode::Sparse, {"100", "101", "001"});
    EXPECT_EQ(s.count(), 3U);
    EXPECT_EQ(s.enumerate(), (std::vector<Bits>{1, 4, 5}));
}

TEST(SparseStateMake, SingleAndFull) {
    EXPECT_EQ(SparseState::make(2, StateMode::Single, {"01"}).count(), 1U);
    const auto full = SparseState::make(2, StateMode::Full);
    EXPECT_EQ(full.count(), 4U);
    EXPECT_EQ(full.enumerate(), (std::vector<Bits>{0, 1, 2, 3}));
    EXPECT_THROW((void)SparseState::make(2, StateMode::Single, {"01", "10"}), ValidationError);
    EXPECT_THROW((void)SparseState::make(2, StateMode::Full, {"01"}), ValidationError);
    EXPECT_THROW((void)SparseState::make(2, StateMode::Sparse, {"011"}), ValidationError);
    EXPECT_THROW((void)SparseState::full(0), ValidationError);
}

TEST(SparseStateMake, DuplicatesCollapse) {
    const auto s = SparseState::sparse(2, {3, 1, 3, 1});
    EXPECT_EQ(s.count(), 2U);
}

TEST(SparseStateMake, Subspace) {
    const auto s = SparseState::subspace(4, {1, 3}, 0b1000);
    EXPECT_EQ(s.count(), 4U);
    EXPECT_EQ(s.enumerate(), (std::vector<Bits>{0b1000, 0b1001, 0b1100, 0b1101}));
}

TEST(SparseStateMake, FullEnumerationLimit) {
    EXPECT_THROW((void)SparseState::full(31).enumerate(), ResourceError);
    EXPECT_EQ(SparseState::full(40).count(), std::size_t{1} << 40);
}

TEST(Projection, FirstOccurrenceOrder) {
    const auto s = SparseState::make(3, StateMode::Sparse, {"100", "101", "001"});
    // Sorted samples: 001, 100, 101.
    EXPECT_EQ(s.project({2}), (std::vector<Bits>{1, 0}));
    EXPECT_EQ(s.project({0}), (std::vector<Bits>{0, 1}));
    EXPECT_EQ(s.project({1, 2}), (std::vector<Bits>{0b01, 0b00}));
    EXPECT_EQ(s.projection_count({0, 2}), 3U);
}

TEST(Projection, FullIsLexicographic) {
    const auto s = SparseState::full(3);
    EXPECT_EQ(s.project({0, 2}), (std::vector<Bits>{0, 1, 2, 3}));
}

TEST(MergeOpenGroups, WorkedSparseCase) {
    // Samples 100, 101, 001; merging the open bonds of qubits 1 and 2 keeps
    // only the joint configurations 00 and 01.
    const auto s = SparseState::make(3, StateMode::Sparse, {"100", "101", "001"});
    const auto plan = merge_open_groups(s, {1}, {2}, s.project({1}), s.project({2}));
    EXPECT_EQ(plan.dimension(), 2U);
    EXPECT_EQ(std::set<Bits>(plan.configs.begin(), plan.configs.end()), (std::set<Bits>{0b00, 0b01}));
    const auto ta = s.project({1});
    const auto tb = s.project({2});
    for (std::size_t i = 0; i < plan.dimension(); ++i) {
        EXPECT_EQ(ta[plan.operand_index[i].first], plan.configs[i] >> 1);
        EXPECT_EQ(tb[plan.operand_index[i].second], plan.configs[i] & 1U);
    }
}

TEST(MergeOpenGroups, FullStateIsTensorProduct) {
    const auto s = SparseState::full(2);
    const auto plan = merge_open_groups(s, {0}, {1}, {0, 1}, {0, 1});
    EXPECT_EQ(plan.dimension(), 4U);
    EXPECT_EQ(plan.configs, (std::vector<Bits>{0, 1, 2, 3}));
    EXPECT_EQ(plan.operand_index[2], (std::pair<std::size_t, std::size_t>{1, 0}));
}

TEST(MergeOpenGroups, SingleState) {
    const auto s = SparseState::make(2, StateMode::Single, {"10"});
    const auto plan = merge_open_groups(s, {0}, {1}, {1}, {0});
    EXPECT_EQ(plan.dimension(), 1U);
    EXPECT_EQ(plan.operand_index[0], (std::pair<std::size_t, std::size_t>{0, 0}));
}

TEST(MergeOpenGroups, RejectsBadInputs) {
    const auto s = SparseState::full(3);
    EXPECT_THROW((void)merge_open_groups(s, {0, 1}, {1}, {0, 1, 2, 3}, {0, 1}), ValidationError);
    EXPECT_THROW((void)merge_open_groups(s, {0}, {1}, {0}, {0, 1}), ValidationError);
}

TEST(MergeOpenGroups, CountMatchesBruteForceProjection) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = std::uniform_int_distribution<int>(2, 10)(rng);
        const auto samples = tktest::random_bitstrings(n, std::uniform_int_distribution<std::size_t>(1, 40)(rng), rng());
        const auto s = SparseState::sparse(n, samples);
        std::vector<int> qa, qb;
        for (int q = 0; q < n; ++q) {
            const int side = std::uniform_int_distribution<int>(0, 2)(rng);
            if (side == 0) qa.push_back(q);
            if (side == 1) qb.push_back(q);
        }
        if (qa.empty() || qb.empty()) continue;
        std::vector<int> uni = qa;
        uni.insert(uni.end(), qb.begin(), qb.end());
        std::sort(uni.begin(), uni.end());
        std::set<std::vector<int>> brute;
        for (Bits b : samples) {
            std::vector<int> bits;
            for (int q : uni) bits.push_back(bit_of(b, n, q));
            brute.insert(bits);
        }
        const auto plan = merge_open_groups(s, qa, qb, s.project(qa), s.project(qb));
        ASSERT_EQ(plan.dimension(), brute.size());
    }
}

TEST(ConfigTableCache, CountsAndTables) {
    const auto s = SparseState::make(3, StateMode::Sparse, {"100", "101", "001"});
    ConfigTableCache cache(s);
    EXPECT_EQ(cache.count(qubit_bit(0) | qubit_bit(2)), 3U);
    EXPECT_EQ(cache.count(qubit_bit(1)), 1U);
    EXPECT_EQ(cache.table(qubit_bit(1) | qubit_bit(2)), s.project({1, 2}));
}
