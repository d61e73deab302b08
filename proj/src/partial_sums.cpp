#include "rijndael/partial_sums.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <random>

#include "rijndael/gf256.hpp"
#include "rijndael/key_scan.hpp"
#include "rijndael/table_cipher.hpp"

namespace rijndael {

namespace {

std::mt19937_64 tagged_rng(std::uint64_t seed, std::uint64_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
    return std::mt19937_64(seq);
}

constexpr std::uint64_t kKeyTag = 0x6b6579;
constexpr std::uint64_t kDataTag = 0x64617461;

State random_state(int cols, std::mt19937_64& rng) {
    State s(cols);
    for (auto& b : s.bytes()) b = static_cast<std::uint8_t>(rng());
    return s;
}

// Sorted list with every value of even multiplicity removed.
template <class T>
void cancel_pairs(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    std::size_t out = 0;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        if ((j - i) % 2 == 1) v[out++] = v[i];
        i = j;
    }
    v.resize(out);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

nlohmann::json position_json(Position p) { return nlohmann::json::array({p.row, p.col}); }

nlohmann::json key_group_json(KeyGroup const& k) {
    return {{"last_round", to_hex(std::span<const std::uint8_t>(k.last))},
            {"equivalent", to_hex(std::span<const std::uint8_t>(&k.equivalent, 1))}};
}

}  // namespace

State equivalent_key_rewrite(RoundKeys const& rk, int round) {
    if (round < 1 || round >= rk.rounds())
        throw RoundOutOfRange("equivalent key needs a round with MixColumns, 1.." + std::to_string(rk.rounds() - 1));
    return inv_mix_columns(rk[round]);
}

FusedTable FusedTable::for_row(int row) {
    if (row < 0 || row > 3) throw std::out_of_range("row must be 0..3");
    static constexpr std::array<std::uint8_t, 4> base{0x0e, 0x0b, 0x0d, 0x09};
    FusedTable f;
    f.row = row;
    auto const& si = inv_sbox();
    for (int j = 0; j < 4; ++j) {
        auto const c = base[static_cast<std::size_t>((j - row + 4) % 4)];
        f.coef[static_cast<std::size_t>(j)] = c;
        for (int x = 0; x < 256; ++x)
            f.table[static_cast<std::size_t>(j)][static_cast<std::size_t>(x)] = gf_mul(c, si[static_cast<std::size_t>(x)]);
    }
    return f;
}

TargetMap target_byte_backmap(CipherParams const& params, Position target) {
    int const t = params.block_cols();
    if (target.row < 0 || target.row > 3 || target.col < 0 || target.col >= t)
        throw std::out_of_range("target position outside the state");
    if (params.rounds() < 2) throw RoundOutOfRange("back-mapping needs at least two rounds");
    TargetMap m;
    m.target = target;
    m.mixed_col = ((target.col - params.shift(target.row)) % t + t) % t;
    for (int j = 0; j < 4; ++j)
        m.cipher[static_cast<std::size_t>(j)] = {j, ((m.mixed_col - params.shift(j)) % t + t) % t};
    m.fused = FusedTable::for_row(target.row);
    m.equivalent_key_pos = {target.row, m.mixed_col};
    return m;
}

std::vector<CipherTuple> cipher_tuples(std::span<const State> ciphertexts, TargetMap const& map) {
    std::vector<CipherTuple> out;
    out.reserve(ciphertexts.size());
    for (auto const& c : ciphertexts)
        out.push_back({c.at(map.cipher[0]), c.at(map.cipher[1]), c.at(map.cipher[2]), c.at(map.cipher[3])});
    return out;
}

std::vector<CipherTuple> odd_tuples(std::vector<CipherTuple> tuples) {
    cancel_pairs(tuples);
    return tuples;
}

std::uint8_t partial_sums_filter(TargetMap const& map, std::span<const CipherTuple> tuples, KeyGroup const& guess) {
    auto const& f = map.fused.table;
    auto const& k = guess.last;
    // (x_1, c_2, c_3)
    std::vector<std::uint32_t> s1;
    s1.reserve(tuples.size());
    for (auto const& c : tuples) {
        std::uint32_t const x1 = f[0][c[0] ^ k[0]] ^ f[1][c[1] ^ k[1]];
        s1.push_back(x1 << 16 | std::uint32_t{c[2]} << 8 | c[3]);
    }
    cancel_pairs(s1);
    // (x_2, c_3)
    std::vector<std::uint16_t> s2;
    s2.reserve(s1.size());
    for (auto v : s1) {
        unsigned const x2 = (v >> 16) ^ f[2][((v >> 8) & 0xff) ^ k[2]];
        s2.push_back(static_cast<std::uint16_t>(x2 << 8 | (v & 0xff)));
    }
    cancel_pairs(s2);
    // x_3
    std::array<bool, 256> odd{};
    for (auto v : s2) {
        unsigned const x3 = (v >> 8) ^ f[3][(v & 0xff) ^ k[3]];
        odd[x3] = !odd[x3];
    }
    std::uint8_t acc = 0;
    auto const& si = inv_sbox();
    for (int x = 0; x < 256; ++x)
        if (odd[static_cast<std::size_t>(x)]) acc ^= si[static_cast<std::size_t>(x ^ guess.equivalent)];
    return acc;
}

EncryptionOracle::EncryptionOracle(CipherParams const& params, std::uint64_t seed) : params_(params) {
    auto rng = tagged_rng(seed, kKeyTag);
    std::vector<std::uint8_t> key(static_cast<std::size_t>(params.key_bits() / 8));
    for (auto& b : key) b = static_cast<std::uint8_t>(rng());
    rk_ = key_schedule(key, params);
}

std::vector<State> EncryptionOracle::encrypt(StructuredSet const& set) {
    TableCipher const cipher(params_, rk_);
    std::vector<State> out;
    out.reserve(static_cast<std::size_t>(set.size()));
    for (auto const& pt : set) out.push_back(cipher.encrypt(pt, params_.rounds(), true));
    encryptions_ += set.size();
    return out;
}

KeyGroup true_key_group(RoundKeys const& rk, TargetMap const& map) {
    KeyGroup g;
    for (std::size_t j = 0; j < 4; ++j) g.last[j] = rk[rk.rounds()].at(map.cipher[j]);
    g.equivalent = equivalent_key_rewrite(rk, rk.rounds() - 1).at(map.equivalent_key_pos);
    return g;
}

std::optional<IntegralProperty> builtin_second_order_property(CipherParams const& params) {
    std::vector<int> cols;
    if (params.block_cols() == 8) cols = {2, 5, 6, 7};
    else if (params.block_cols() == 7) cols = {0};
    else return std::nullopt;
    IntegralProperty p;
    p.params = params.with_rounds(4);
    p.active = {{0, 0}, {1, 1}};
    p.rounds = 4;
    for (int c : cols)
        for (int r = 0; r < 4; ++r) p.zero_sum.push_back({r, c});
    return p;
}

IntegralProperty builtin_first_order_property(CipherParams const& params) {
    IntegralProperty p;
    p.params = params.with_rounds(3);
    p.active = {{0, 0}};
    p.rounds = 3;
    for (int c = 0; c < params.block_cols(); ++c)
        for (int r = 0; r < 4; ++r) p.zero_sum.push_back({r, c});
    return p;
}

namespace {

IntegralProperty attack_property(CipherParams const& params, AttackOptions const& opt) {
    std::optional<IntegralProperty> prop = opt.property ? opt.property : builtin_second_order_property(params);
    if (!prop) throw NoProperty("no built-in second-order property for " + params.name());
    if (prop->params.block_cols() != params.block_cols())
        throw std::invalid_argument("property block size does not match the cipher");
    if (prop->final_special)
        throw NoProperty("the distinguisher must hold with MixColumns in its last round");
    if (prop->zero_sum.empty()) throw NoProperty("property has no balanced byte");
    return *prop;
}

}  // namespace

AttackResult run_attack_6round(CipherParams const& params, std::uint64_t seed, AttackOptions const& opt) {
    auto const t0 = std::chrono::steady_clock::now();
    if (opt.structures < 1 || opt.structures > 32) throw std::invalid_argument("structures must be 1..32");
    auto const prop = attack_property(params, opt);
    Position const target = opt.target.value_or(prop.zero_sum.front());
    if (std::find(prop.zero_sum.begin(), prop.zero_sum.end(), target) == prop.zero_sum.end())
        throw std::invalid_argument("target byte is not balanced under the property");

    auto const cipher_params = params.with_rounds(prop.rounds + 2);
    EncryptionOracle oracle(cipher_params, seed);
    auto const map = target_byte_backmap(cipher_params, target);

    auto rng = tagged_rng(seed, kDataTag);
    std::vector<std::vector<CipherTuple>> sets;
    for (int s = 0; s < opt.structures; ++s) {
        StructuredSet const set(random_state(params.block_cols(), rng), prop.active);
        auto const ct = oracle.encrypt(set);
        sets.push_back(odd_tuples(cipher_tuples(ct, map)));
    }

    KeyScan const scan(map.fused, sets);
    auto const [begin, end] = opt.k01_range.value_or(std::pair<std::uint32_t, std::uint32_t>{0, 65536});
    ScanStats stats;
    AttackResult r;
    r.survivors = scan.scan(begin, end, stats, opt.threads, opt.progress);

    r.params = cipher_params;
    r.rounds = cipher_params.rounds();
    r.property = prop;
    r.target = target;
    r.structures = opt.structures;
    r.true_key = true_key_group(oracle.reveal(), map);
    r.true_key_found = std::binary_search(r.survivors.begin(), r.survivors.end(), r.true_key);
    r.counters = {stats.lookups, oracle.encryptions(), stats.candidates};
    std::uint64_t before = stats.candidates;
    bool passed = true;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        passed = passed && partial_sums_filter(map, sets[s], r.true_key) == 0;
        r.trace.push_back({before, stats.passed[s], passed});
        before = stats.passed[s];
    }
    r.wall_seconds = seconds_since(t0);
    return r;
}

ByteWiseResult run_attack_4round_bytewise(CipherParams const& params, std::uint64_t seed, int max_structures) {
    auto const t0 = std::chrono::steady_clock::now();
    if (max_structures < 1) throw std::invalid_argument("max_structures must be positive");
    auto const cp = params.with_rounds(4);
    EncryptionOracle oracle(cp, seed);
    int const n = cp.block_bytes();
    auto const& si = inv_sbox();

    ByteWiseResult r;
    r.params = cp;
    r.candidates.assign(static_cast<std::size_t>(n), {});
    for (auto& c : r.candidates)
        for (int k = 0; k < 256; ++k) c.push_back(static_cast<std::uint8_t>(k));

    auto rng = tagged_rng(seed, kDataTag);
    auto unresolved = [&] {
        return std::any_of(r.candidates.begin(), r.candidates.end(), [](auto const& c) { return c.size() > 1; });
    };
    while (r.structures < max_structures && unresolved()) {
        // With seven or eight columns some bytes still take every value after
        // three rounds and filter nothing; moving the active byte changes which.
        StructuredSet const set(random_state(cp.block_cols(), rng), {{0, r.structures % cp.block_cols()}});
        auto const ct = oracle.encrypt(set);
        ++r.structures;
        std::uint64_t total = 0;
        for (int k = 0; k < n; ++k) {
            std::array<bool, 256> odd{};
            for (auto const& c : ct) odd[c[k]] = !odd[c[k]];
            auto& cand = r.candidates[static_cast<std::size_t>(k)];
            std::erase_if(cand, [&](std::uint8_t key) {
                std::uint8_t acc = 0;
                for (int v = 0; v < 256; ++v)
                    if (odd[static_cast<std::size_t>(v)]) acc ^= si[static_cast<std::size_t>(v ^ key)];
                return acc != 0;
            });
            r.counters.lookups += 256 * static_cast<std::uint64_t>(std::count(odd.begin(), odd.end(), true));
            r.counters.candidates += 256;
            total += cand.size();
        }
        r.survivors_after.push_back(total);
    }

    r.true_key = oracle.reveal()[4];
    r.recovered = State(cp.block_cols());
    r.recovered_all = true;
    for (int k = 0; k < n; ++k) {
        auto const& cand = r.candidates[static_cast<std::size_t>(k)];
        if (cand.size() == 1) r.recovered[k] = cand.front();
        r.recovered_all = r.recovered_all && cand.size() == 1 && cand.front() == r.true_key[k];
    }
    r.counters.encryptions = oracle.encryptions();
    r.wall_seconds = seconds_since(t0);
    return r;
}

AttackPlan plan_attack(CipherParams const& params, int rounds, int structures) {
    if (structures < 1) throw std::invalid_argument("structures must be positive");
    int const t = params.block_cols();
    std::vector<AttackPlan> plans;
    auto add = [&](int order, bool parallel, bool exhaustive, bool executable, std::string desc) {
        AttackPlan p;
        p.params = params.with_rounds(rounds);
        p.rounds = rounds;
        p.order = order;
        p.structures = structures;
        p.parallel_groups = parallel;
        p.last_round_exhaustive = exhaustive;
        p.data_log2 = std::log2(static_cast<double>(structures)) + 8.0 * order;
        p.memory_log2 = 8.0 * order;
        p.executable = executable;
        p.description = std::move(desc);
        if (rounds == 4)
            p.time_log2 = std::log2(static_cast<double>(structures) * 4 * t) + 16;
        else
            p.time_log2 = 8.0 * order + 16 + (parallel ? 1 : 0) + (exhaustive ? 128 : 0);
        plans.push_back(p);
    };

    switch (rounds) {
    case 4:
        add(1, false, false, true, "first-order 3-round distinguisher, last round key byte by byte");
        break;
    case 5:
        add(1, false, false, true, "first-order 3-round distinguisher, partial sums over 5 key bytes");
        break;
    case 6:
        if (t >= 7) add(2, false, false, true, "second-order 4-round distinguisher, partial sums over 5 key bytes");
        if (t == 6) add(2, true, false, false, "second-order 4-round Eq distinguisher, two 5-byte groups in parallel");
        if (t == 5 || t == 6) add(3, false, false, false, "third-order 4-round distinguisher, partial sums");
        if (t == 4) add(4, false, false, false, "fourth-order 4-round distinguisher, partial sums");
        break;
    case 7:
        if (t >= 6) add(8, t == 6, false, false, "eighth-order 5-round distinguisher, partial sums");
        if (t == 5 || t == 6) add(12, false, false, false, "twelfth-order 5-round distinguisher, partial sums");
        break;
    case 8:
        if (t >= 7) add(24, false, false, false, "24th-order 6-round distinguisher, partial sums");
        if (t >= 6) add(8, t == 6, true, false, "eighth-order 5-round distinguisher, last round key guessed in full");
        if (t == 5) add(12, false, true, false, "twelfth-order 5-round distinguisher, last round key guessed in full");
        break;
    default:
        break;
    }
    if (plans.empty())
        throw NoProperty("no integral attack on " + std::to_string(rounds) + "-round " + params.name());
    return *std::min_element(plans.begin(), plans.end(),
                             [](AttackPlan const& a, AttackPlan const& b) { return a.time_log2 < b.time_log2; });
}

AttackPlan plan_for_property(IntegralProperty const& prop, int structures) {
    if (structures < 1) throw std::invalid_argument("structures must be positive");
    AttackPlan p;
    p.rounds = prop.rounds + 2;
    p.params = prop.params.with_rounds(p.rounds);
    p.order = prop.order();
    p.structures = structures;
    p.data_log2 = std::log2(static_cast<double>(structures)) + 8.0 * p.order;
    p.memory_log2 = 8.0 * p.order;
    p.time_log2 = 8.0 * p.order + 16;
    p.executable = !prop.zero_sum.empty() && !prop.final_special;
    p.description = "supplied order-" + std::to_string(p.order) + " " + std::to_string(prop.rounds) +
                    "-round distinguisher, partial sums over 5 key bytes";
    return p;
}

double engine_lookups_log2(AttackPlan const& plan) {
    if (plan.rounds == 4) return plan.time_log2;
    double const n = 8.0 * plan.order;
    double const s = plan.structures;
    // x_1 per (k_0,k_1); x_2 and the parity sets per (k_0..k_2) for two
    // structures; translates and filter tables per (k_0..k_3); survivors of
    // two structures re-evaluated text by text.
    double const parts[] = {16 + 1 + n + std::log2(s), 24 + 1 + n, 40, 37, 24 + 1 + n};
    double sum = 0;
    for (double p : parts) sum += std::exp2(p - 40);
    double v = 40 + std::log2(sum);
    if (plan.parallel_groups) v += 1;
    if (plan.last_round_exhaustive) v += 128;
    return v;
}

nlohmann::json to_json(AttackPlan const& plan) {
    return {{"block_bits", plan.params.block_bits()},
            {"key_bits", plan.params.key_bits()},
            {"rounds", plan.rounds},
            {"order", plan.order},
            {"structures", plan.structures},
            {"parallel_groups", plan.parallel_groups},
            {"last_round_exhaustive", plan.last_round_exhaustive},
            {"data_log2", plan.data_log2},
            {"time_log2", plan.time_log2},
            {"memory_log2", plan.memory_log2},
            {"engine_lookups_log2", engine_lookups_log2(plan)},
            {"executable", plan.executable},
            {"description", plan.description}};
}

nlohmann::json to_json(AttackResult const& r) {
    nlohmann::json survivors = nlohmann::json::array();
    for (auto const& k : r.survivors) survivors.push_back(key_group_json(k));
    nlohmann::json trace = nlohmann::json::array();
    for (auto const& s : r.trace)
        trace.push_back({{"survivors_before", s.survivors_before},
                         {"survivors_after", s.survivors_after},
                         {"true_key_passed", s.true_key_passed}});
    return {{"block_bits", r.params.block_bits()},
            {"key_bits", r.params.key_bits()},
            {"rounds", r.rounds},
            {"property", to_json(r.property)},
            {"target", position_json(r.target)},
            {"structures", r.structures},
            {"survivors", survivors},
            {"survivor_count", r.survivors.size()},
            {"true_key", key_group_json(r.true_key)},
            {"true_key_found", r.true_key_found},
            {"unique", r.true_key_found && r.survivors.size() == 1},
            {"lookups", r.counters.lookups},
            {"lookups_log2", r.counters.lookups ? std::log2(static_cast<double>(r.counters.lookups)) : 0.0},
            {"encryptions", r.counters.encryptions},
            {"candidates", r.counters.candidates},
            {"trace", trace},
            {"wall_time", r.wall_seconds}};
}

nlohmann::json to_json(ByteWiseResult const& r) {
    nlohmann::json cands = nlohmann::json::array();
    for (auto const& c : r.candidates) cands.push_back(c.size());
    return {{"block_bits", r.params.block_bits()},
            {"key_bits", r.params.key_bits()},
            {"rounds", 4},
            {"structures", r.structures},
            {"recovered_round_key", to_hex(r.recovered)},
            {"true_round_key", to_hex(r.true_key)},
            {"recovered_all", r.recovered_all},
            {"candidates_per_byte", cands},
            {"survivors_after", r.survivors_after},
            {"lookups", r.counters.lookups},
            {"encryptions", r.counters.encryptions},
            {"wall_time", r.wall_seconds}};
}

}  // namespace rijndael
