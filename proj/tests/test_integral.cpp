#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "rijndael/gf256.hpp"
#include "rijndael/integral.hpp"
#include "rijndael/structure_sum.hpp"

namespace rijndael {
namespace {

State random_state(std::mt19937_64& rng, int cols) {
    State s(cols);
    for (auto& b : s.bytes()) b = static_cast<std::uint8_t>(rng());
    return s;
}

RoundKeys random_keys(std::mt19937_64& rng, CipherParams const& p) {
    std::vector<std::uint8_t> key(static_cast<std::size_t>(p.key_bits() / 8));
    for (auto& b : key) b = static_cast<std::uint8_t>(rng());
    return key_schedule(key, p);
}

// Checks that the active bytes jointly take every value once and every other
// byte stays at the base value.
void check_exactly_once(StructuredSet const& set) {
    int const d = set.order();
    std::vector<bool> seen(std::size_t{1} << (8 * d), false);
    std::uint64_t count = 0;
    for (auto const& s : set) {
        std::uint64_t v = 0;
        for (int a = d - 1; a >= 0; --a) v = v << 8 | s.at(set.active()[static_cast<std::size_t>(a)]);
        ASSERT_FALSE(seen[v]);
        seen[v] = true;
        for (int k = 0; k < s.size(); ++k) {
            Position const p{k % 4, k / 4};
            if (std::find(set.active().begin(), set.active().end(), p) == set.active().end())
                ASSERT_EQ(s[k], set.base()[k]);
        }
        ++count;
    }
    EXPECT_EQ(count, std::uint64_t{1} << (8 * d));
}

TEST(GenerateStructure, FirstOrderHas256Texts) {
    std::mt19937_64 rng(1);
    auto const set = generate_structure(random_state(rng, 4), {{2, 1}});
    EXPECT_EQ(set.size(), 256u);
    check_exactly_once(set);
}

TEST(GenerateStructure, ExactlyOnceUpToOrderThree) {
    std::mt19937_64 rng(2);
    check_exactly_once(generate_structure(random_state(rng, 8), {{0, 0}, {3, 7}}));
    check_exactly_once(generate_structure(random_state(rng, 5), {{1, 4}, {0, 0}, {2, 2}}));
}

TEST(GenerateStructure, FourthOrderIsCopiesOfFirstOrder) {
    std::mt19937_64 rng(3);
    auto const set = generate_structure(random_state(rng, 4), {{0, 0}, {1, 1}, {2, 2}, {3, 3}});
    EXPECT_EQ(set.size(), std::uint64_t{1} << 32);
    for (std::uint64_t outer : {std::uint64_t{0}, std::uint64_t{12345}, (std::uint64_t{1} << 24) - 1}) {
        auto const slice = set.first_order_slice(outer);
        EXPECT_EQ(slice.size(), 256u);
        auto it = set.iterator_at(outer << 8);
        for (auto const& s : slice) {
            EXPECT_EQ(s, *it);
            ++it;
        }
    }
    EXPECT_THROW(set.first_order_slice(std::uint64_t{1} << 24), InvalidStructure);
}

TEST(GenerateStructure, RejectsBadPositions) {
    State const base(6);
    EXPECT_THROW(generate_structure(base, {}), InvalidStructure);
    EXPECT_THROW(generate_structure(base, {{0, 1}, {0, 1}}), InvalidStructure);
    EXPECT_THROW(generate_structure(base, {{4, 0}}), InvalidStructure);
    EXPECT_THROW(generate_structure(base, {{0, 6}}), InvalidStructure);
    EXPECT_THROW(generate_structure(base, {{-1, 0}}), InvalidStructure);
}

TEST(GenerateStructure, MultiplicityRepeatsEnumeration) {
    std::mt19937_64 rng(4);
    StructuredSet const set(random_state(rng, 4), {{1, 2}}, 3);
    EXPECT_EQ(set.size(), 768u);
    EXPECT_EQ(set.at(5), set.at(5 + 256));
    EXPECT_EQ(set.at(5), set.at(5 + 512));
    EXPECT_TRUE(xor_accumulate(set).at(1, 2) == 0);
}

TEST(XorAccumulate, BasicCases) {
    std::mt19937_64 rng(5);
    auto const s = random_state(rng, 7);
    std::vector<State> one{s};
    EXPECT_EQ(xor_accumulate(one), s);
    std::vector<State> two{s, s};
    EXPECT_TRUE(xor_accumulate(two).is_zero());
    std::vector<State> none;
    EXPECT_THROW(xor_accumulate(none), EmptyStream);
}

TEST(XorAccumulate, RawStructureSumsToZero) {
    std::mt19937_64 rng(6);
    for (int t = 4; t <= 8; ++t) {
        EXPECT_TRUE(xor_accumulate(generate_structure(random_state(rng, t), {{3, t - 1}})).is_zero());
        EXPECT_TRUE(xor_accumulate(generate_structure(random_state(rng, t), {{0, 0}, {2, 1}})).is_zero());
    }
}

TEST(XorAccumulate, CommutesWithMixColumns) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        // Non-balanced input: every text is randomized, so the plain sum is
        // not trivially zero.
        std::vector<State> texts;
        std::vector<State> mixed;
        for (int i = 0; i < 37; ++i) {
            texts.push_back(random_state(rng, 6));
            mixed.push_back(mix_columns(texts.back()));
        }
        EXPECT_EQ(xor_accumulate(mixed), mix_columns(xor_accumulate(texts)));
    }
}

TEST(CheckExpectation, TrivialVerdicts) {
    IntegralProperty prop;
    prop.params = CipherParams::from_bits(128, 128);
    prop.active = {{0, 0}};
    prop.rounds = 3;
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) prop.zero_sum.push_back({r, c});
    prop.eq_pairs.push_back({{{0, 0}, 1}, {{1, 0}, 1}});
    State sum(4);
    EXPECT_TRUE(check_expectation(sum, prop).all_pass());

    IntegralProperty eq_only = prop;
    eq_only.zero_sum.clear();
    sum.at(0, 0) = 0x5a;
    sum.at(1, 0) = 0x5a;
    auto const v = check_expectation(sum, eq_only);
    ASSERT_EQ(v.eq_pairs.size(), 1u);
    EXPECT_TRUE(v.eq_pairs[0].second);
    sum.at(1, 0) = 0x5b;
    EXPECT_FALSE(check_expectation(sum, eq_only).all_pass());

    // 02 * 5a = b4 = 01 * b4
    eq_only.eq_pairs = {{{{0, 0}, 2}, {{1, 0}, 1}}};
    sum.at(1, 0) = gf_mul(std::uint8_t{2}, std::uint8_t{0x5a});
    EXPECT_TRUE(check_expectation(sum, eq_only).all_pass());
}

TEST(CheckExpectation, AesThreeRoundFirstOrder) {
    std::mt19937_64 rng(8);
    auto const p = CipherParams::from_bits(128, 128);
    IntegralProperty prop;
    prop.params = p;
    prop.rounds = 3;
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) prop.zero_sum.push_back({r, c});
    for (int pos = 0; pos < 16; pos += 5) {
        prop.active = {{pos % 4, pos / 4}};
        auto const rk = random_keys(rng, p);
        auto const set = generate_structure(random_state(rng, 4), prop.active);
        auto const v = check_expectation(reference_sum(set, rk, 3, false), prop);
        EXPECT_EQ(v.zero_sum.size(), 16u);
        EXPECT_TRUE(v.all_pass());
    }
}

TEST(StructureSummer, MatchesReferenceSum) {
    std::mt19937_64 rng(9);
    for (int t = 4; t <= 8; ++t) {
        auto const p = CipherParams::from_bits(32 * t, 128);
        auto const rk = random_keys(rng, p);
        TableCipher const tc(p, rk);
        for (int rounds = 1; rounds <= 5; ++rounds) {
            StructureSummer const summer(tc, rounds);
            auto const base = random_state(rng, t);
            int const a = static_cast<int>(rng() % static_cast<std::uint64_t>(4 * t));
            auto const set = generate_structure(base, {{a % 4, a / 4}});
            EXPECT_EQ(summer.special_sum(set), reference_sum(set, rk, rounds, true)) << t << " " << rounds;
            EXPECT_EQ(summer.full_sum(set), reference_sum(set, rk, rounds, false)) << t << " " << rounds;
        }
        // Second order, with the two active bytes in different columns.
        StructureSummer const summer(tc, 4);
        auto const set = generate_structure(random_state(rng, t), {{1, 1}, {3, t - 1}});
        EXPECT_EQ(summer.special_sum(set, 3), reference_sum(set, rk, 4, true));
    }
}

TEST(StructureSummer, ThreadCountDoesNotChangeResult) {
    std::mt19937_64 rng(10);
    auto const p = CipherParams::from_bits(224, 128);
    TableCipher const tc(p, random_keys(rng, p));
    StructureSummer const summer(tc, 4);
    auto const set = generate_structure(random_state(rng, 7), {{0, 0}, {1, 3}, {2, 5}});
    auto const one = summer.special_sum(set, 0, StructureSummer::outer_count(set));
    EXPECT_EQ(summer.special_sum(set, 4), one);
    EXPECT_EQ(summer.special_sum(set, 0, 100) ^ summer.special_sum(set, 100, 65536), one);
}

TEST(Descriptor, JsonRoundTrip) {
    IntegralProperty prop;
    prop.params = CipherParams::from_bits(192, 256);
    prop.active = {{0, 3}, {2, 5}};
    prop.rounds = 4;
    prop.zero_sum = {{1, 1}};
    prop.eq_pairs = {{{{0, 1}, 1}, {{1, 1}, 2}}};
    prop.final_special = true;
    auto const j = to_json(prop);
    EXPECT_EQ(j.at("order"), 2);
    auto const back = property_from_json(j);
    EXPECT_EQ(back.params, CipherParams::from_bits(192, 256));
    EXPECT_EQ(back.active, prop.active);
    EXPECT_EQ(back.zero_sum, prop.zero_sum);
    EXPECT_EQ(back.eq_pairs, prop.eq_pairs);
    EXPECT_EQ(back.rounds, 4);
    EXPECT_TRUE(back.final_special);
}

TEST(Descriptor, MalformedRejected) {
    using nlohmann::json;
    EXPECT_THROW(property_from_json(json::parse(R"({"block_bits":128})")), InvalidStructure);
    EXPECT_THROW(property_from_json(json::parse(R"({"block_bits":128,"key_bits":128,"rounds":3,"active":[[0,0],[0,0]],"zero_sum":[[0,0]]})")),
                 InvalidStructure);
    EXPECT_THROW(property_from_json(json::parse(R"({"block_bits":128,"key_bits":128,"rounds":3,"active":[[0,0]]})")),
                 InvalidStructure);
    EXPECT_THROW(property_from_json(json::parse(R"({"block_bits":128,"key_bits":128,"order":2,"rounds":3,"active":[[0,0]],"zero_sum":[[0,0]]})")),
                 InvalidStructure);
    EXPECT_THROW(property_from_json(json::parse(R"({"block_bits":136,"key_bits":128,"rounds":3,"active":[[0,0]],"zero_sum":[[0,0]]})")),
                 InvalidParams);
}

TEST(Patterns, SymbolsAndEqWeights) {
    IntegralProperty prop;
    prop.params = CipherParams::from_bits(192, 128);
    prop.active = {{0, 3}, {2, 5}};
    prop.rounds = 4;
    prop.zero_sum = {{0, 0}};
    prop.eq_pairs = {{{{0, 1}, 1}, {{1, 1}, 2}}, {{{1, 1}, 1}, {{2, 1}, 1}}};
    auto const in = prop.input_pattern();
    EXPECT_EQ(in[0][3].to_string(), "A^2_0");
    EXPECT_EQ(in[1][3].to_string(), "C");
    auto const out = prop.output_pattern();
    EXPECT_EQ(out[0][0].to_string(), "S");
    EXPECT_EQ(out[3][3].to_string(), "?");
    // s01 = 02 * s11 and s11 = s21: weights 01, 02, 02 make weight * sum equal.
    EXPECT_EQ(out[0][1].kind, CellSymbol::Kind::Eq);
    EXPECT_EQ(out[0][1].weight, 1);
    EXPECT_EQ(out[1][1].weight, 2);
    EXPECT_EQ(out[2][1].weight, out[1][1].weight);
    EXPECT_EQ(out[2][1].group, out[0][1].group);
    EXPECT_EQ(CellSymbol::all(2, 1, 3).to_string(), "(A^2_1)^3");
}

}  // namespace
}  // namespace rijndael
