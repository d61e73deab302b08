#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rijndael/integral.hpp"

namespace rijndael {

// One byte of K'_r = InvMixColumns(K_r).
struct EquivalentKeyByte {
    std::uint8_t value = 0;
    int round = 0;
    Position pos;
};

// InvMixColumns(K_r). Putting AddRoundKey(K') before MixColumns gives the
// same round. Round 0 and the final special round have no MixColumns.
State equivalent_key_rewrite(RoundKeys const& rk, int round);

// Four tables S_j[x] = m_j * S^{-1}[x], with (m_0..m_3) one row of
// InvMixColumns.
struct FusedTable {
    int row = 0;
    std::array<std::uint8_t, 4> coef{};
    std::array<std::array<std::uint8_t, 256>, 4> table{};

    static FusedTable for_row(int row);
};

// Where one byte of the state entering the second-to-last round comes from,
// for a cipher whose last two rounds are a full round and the special round.
struct TargetMap {
    Position target;                   // byte of the state before the two rounds
    int mixed_col = 0;                 // its column after ShiftRows
    std::array<Position, 4> cipher{};  // ciphertext bytes c_0..c_3
    FusedTable fused;
    Position equivalent_key_pos;       // byte of K'_{R-1} (k_4)
};

TargetMap target_byte_backmap(CipherParams const& params, Position target);

using CipherTuple = std::array<std::uint8_t, 4>;

// The 5-byte key group: k_0..k_3 of the last round key at map.cipher, k_4 of
// the equivalent key of the round before.
struct KeyGroup {
    std::array<std::uint8_t, 4> last{};
    std::uint8_t equivalent = 0;

    friend bool operator==(KeyGroup const&, KeyGroup const&) = default;
    friend auto operator<=>(KeyGroup const&, KeyGroup const&) = default;
};

std::vector<CipherTuple> cipher_tuples(std::span<const State> ciphertexts, TargetMap const& map);

// Tuples that occur an odd number of times, sorted.
std::vector<CipherTuple> odd_tuples(std::vector<CipherTuple> tuples);

// XOR over the set of S^{-1}[x_3 ^ k_4] with x_3 = sum_j S_j[c_j ^ k_j],
// folding one key byte at a time over a parity multiset.
std::uint8_t partial_sums_filter(TargetMap const& map, std::span<const CipherTuple> tuples, KeyGroup const& guess);

// Holds the key; attacks see it only through encrypt() until verification.
class EncryptionOracle {
public:
    EncryptionOracle(CipherParams const& params, std::uint64_t seed);

    CipherParams const& params() const { return params_; }
    std::vector<State> encrypt(StructuredSet const& set);
    std::uint64_t encryptions() const { return encryptions_; }

    RoundKeys const& reveal() const { return rk_; }

private:
    CipherParams params_;
    RoundKeys rk_;
    std::uint64_t encryptions_ = 0;
};

KeyGroup true_key_group(RoundKeys const& rk, TargetMap const& map);

struct AttackCounters {
    std::uint64_t lookups = 0;      // S-box or fused-table evaluations, one per byte
    std::uint64_t encryptions = 0;
    std::uint64_t candidates = 0;   // 5-byte groups examined
};

struct StructureTrace {
    std::uint64_t survivors_before = 0;
    std::uint64_t survivors_after = 0;
    bool true_key_passed = false;
};

struct AttackResult {
    CipherParams params = CipherParams::from_bits(128, 128);
    int rounds = 0;
    IntegralProperty property;
    Position target;
    int structures = 0;
    std::vector<KeyGroup> survivors;
    KeyGroup true_key;
    bool true_key_found = false;
    AttackCounters counters;
    std::vector<StructureTrace> trace;
    double wall_seconds = 0;
};

class NoProperty : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(std::string const& what, double estimate_log2)
        : std::runtime_error(what), estimate_log2_(estimate_log2) {}
    double estimate_log2() const { return estimate_log2_; }

private:
    double estimate_log2_;
};

struct AttackOptions {
    int structures = 6;
    int threads = 1;
    std::optional<IntegralProperty> property;  // default: built-in second-order property
    std::optional<Position> target;            // default: first balanced byte
    std::function<void(std::size_t done, std::size_t total)> progress;
    // Restrict the scan to k_0 | k_1 << 8 in [begin, end).
    std::optional<std::pair<std::uint32_t, std::uint32_t>> k01_range;
};

// Second-order distinguisher over four rounds plus a full and a special
// round, partial sums over all 2^40 key groups.
AttackResult run_attack_6round(CipherParams const& params, std::uint64_t seed, AttackOptions const& opt = {});

// Built-in four-round second-order property (Rijndael-224 and Rijndael-256).
std::optional<IntegralProperty> builtin_second_order_property(CipherParams const& params);

// Three-round first-order property, every byte balanced; any block size.
IntegralProperty builtin_first_order_property(CipherParams const& params);

struct ByteWiseResult {
    CipherParams params = CipherParams::from_bits(128, 128);
    std::vector<std::vector<std::uint8_t>> candidates;  // per byte of K_4, message order
    State recovered;
    State true_key;
    bool recovered_all = false;
    int structures = 0;
    AttackCounters counters;
    std::vector<std::uint64_t> survivors_after;  // total candidates after each structure
    double wall_seconds = 0;
};

// First-order three-round distinguisher plus a special last round; every
// byte of the last round key is guessed on its own.
ByteWiseResult run_attack_4round_bytewise(CipherParams const& params, std::uint64_t seed, int max_structures = 3);

// Attack configurations with projected cost. Costs follow the partial-sums
// model: per structure, texts times 2^16 (twice when two 5-byte groups are
// guessed in parallel), plus an exhaustive 16-byte last-round guess for the
// extended eight-round variants.
struct AttackPlan {
    CipherParams params = CipherParams::from_bits(128, 128);
    int rounds = 6;
    int order = 2;
    int structures = 6;
    bool parallel_groups = false;
    bool last_round_exhaustive = false;
    double data_log2 = 0;
    double time_log2 = 0;
    double memory_log2 = 0;
    bool executable = false;
    std::string description;
};

// Cheapest plan for (params, rounds); throws NoProperty when none exists.
AttackPlan plan_attack(CipherParams const& params, int rounds, int structures);

// Plan for a partial-sums attack appending two rounds to `prop`.
AttackPlan plan_for_property(IntegralProperty const& prop, int structures);

// Work the desk-scale engine performs for a plan, log2 of lookups.
double engine_lookups_log2(AttackPlan const& plan);

nlohmann::json to_json(AttackPlan const& plan);
nlohmann::json to_json(AttackResult const& result);
nlohmann::json to_json(ByteWiseResult const& result);

}  // namespace rijndael
