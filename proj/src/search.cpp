#include "rijndael/search.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "rijndael/gf256.hpp"
#include "rijndael/structure_sum.hpp"

namespace rijndael {

namespace {

struct TrialSums {
    State special;
    State full;
};

std::mt19937_64 trial_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    for (auto t : tags) {
        words.push_back(static_cast<std::uint32_t>(t));
        words.push_back(static_cast<std::uint32_t>(t >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

// One random key and one random set of constants.
TrialSums run_trial(CipherParams const& params, std::vector<Position> const& active, std::mt19937_64& rng,
                    int threads) {
    std::vector<std::uint8_t> key(static_cast<std::size_t>(4 * params.key_cols()));
    for (auto& b : key) b = static_cast<std::uint8_t>(rng());
    State base(params.block_cols());
    for (auto& b : base.bytes()) b = static_cast<std::uint8_t>(rng());

    auto const rk = key_schedule(key, params);
    TableCipher const cipher(params, rk);
    StructuredSet const set(base, active);
    StructureSummer const summer(cipher, params.rounds());
    TrialSums s{summer.special_sum(set, threads), {}};
    s.full = mix_columns(s.special);
    return s;
}

std::uint32_t zero_mask(State const& s) {
    std::uint32_t m = 0;
    for (int k = 0; k < s.cols() * 4; ++k)
        if (s[k] == 0) m |= std::uint32_t{1} << k;
    return m;
}

Position position_of(int k) { return {k % 4, k / 4}; }
int index_of(Position p) { return p.row + 4 * p.col; }

bool holds(EqPair const& e, State const& s) {
    return gf_mul(e.first.weight, s.at(e.first.pos)) == gf_mul(e.second.weight, s.at(e.second.pos));
}

void keep_holding(std::vector<EqPair>& pairs, State const& s) {
    std::erase_if(pairs, [&](EqPair const& e) { return !holds(e, s); });
}

enum class Want { ZeroSum, Eq };

using RatioTable = std::array<std::optional<std::pair<std::uint8_t, std::uint8_t>>, 256>;

// ratio -> (w1, w2) with w1 * x = w2 * y whenever x = ratio * y
RatioTable ratio_table(bool all_weights) {
    RatioTable by_ratio{};
    if (all_weights) {
        for (int w = 1; w < 256; ++w) by_ratio[static_cast<std::size_t>(w)] = {{1, static_cast<std::uint8_t>(w)}};
    } else {
        for (std::uint8_t w1 : {1, 2, 3})
            for (std::uint8_t w2 : {1, 2, 3}) {
                auto& slot = by_ratio[gf_mul(w2, gf_inv(w1))];
                if (!slot) slot = {{w1, w2}};
            }
    }
    return by_ratio;
}

// Needs y != 0; x = 0 too would be a joint zero, x != 0 has no ratio.
std::optional<EqPair> equality_for(RatioTable const& by_ratio, State const& sum, int p, int q) {
    std::uint8_t const x = sum[p], y = sum[q];
    if (y == 0) return std::nullopt;
    auto const& w = by_ratio[gf_mul(x, gf_inv(y))];
    if (!w) return std::nullopt;
    return EqPair{{position_of(p), w->first}, {position_of(q), w->second}};
}

// Each pair's weights come from the first trial where it is not jointly
// zero; a single trial would miss pairs whose sums happen to vanish there.
struct EqTracker {
    std::vector<EqPair> pairs;
    std::vector<std::pair<int, int>> open;  // jointly zero in every trial so far
    bool started = false;

    void update(State const& sum, RatioTable const& by_ratio) {
        if (!started) {
            int const n = sum.cols() * 4;
            for (int p = 0; p < n; ++p)
                for (int q = p + 1; q < n; ++q) open.emplace_back(p, q);
            started = true;
        } else {
            keep_holding(pairs, sum);
        }
        std::erase_if(open, [&](std::pair<int, int> const& pq) {
            if (sum[pq.first] == 0 && sum[pq.second] == 0) return false;
            if (auto e = equality_for(by_ratio, sum, pq.first, pq.second)) pairs.push_back(*e);
            return true;
        });
    }

    bool alive() const { return !pairs.empty() || !open.empty(); }

    std::vector<EqPair> result() const {
        auto out = pairs;
        std::sort(out.begin(), out.end(), [](EqPair const& a, EqPair const& b) {
            return std::pair(index_of(a.first.pos), index_of(a.second.pos)) <
                   std::pair(index_of(b.first.pos), index_of(b.second.pos));
        });
        return out;
    }
};

struct Outcome {
    std::uint32_t mask = 0;
    std::vector<EqPair> eq_full;
    std::vector<EqPair> eq_special;
    int trials = 0;
};

Outcome examine(SearchConfig const& cfg, CipherParams const& params, std::vector<Position> const& active,
                std::uint64_t index, Want want, std::uint64_t& encryptions) {
    int const n = params.block_bytes();
    Outcome out;
    out.mask = n == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1;
    auto const by_ratio = ratio_table(cfg.all_weights);
    EqTracker full, special;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        auto rng = trial_rng(cfg.seed, {index, static_cast<std::uint64_t>(trial)});
        auto const sums = run_trial(params, active, rng, cfg.threads);
        encryptions += std::uint64_t{1} << (8 * active.size());
        ++out.trials;
        out.mask &= zero_mask(sums.full);
        full.update(sums.full, by_ratio);
        if (want == Want::Eq) special.update(sums.special, by_ratio);
        bool const alive = want == Want::ZeroSum ? out.mask != 0 : full.alive() || special.alive();
        if (!alive) break;
    }
    if (want == Want::ZeroSum && out.mask == 0) return out;
    out.eq_full = full.result();
    out.eq_special = special.result();
    return out;
}

void check_config(SearchConfig const& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("search needs at least one trial");
    if (cfg.order < 1) throw std::invalid_argument("search order must be positive");
    if (cfg.order > 3) throw Unenumerable("exhaustive search above order 3 is out of reach");
}

struct Scan {
    std::vector<std::vector<Position>> candidates;
    std::vector<Outcome> outcomes;
    SearchResult result;
};

std::vector<Position> rotated(std::vector<Position> c, int k, int cols) {
    for (auto& p : c) p.col = (p.col + k) % cols;
    std::sort(c.begin(), c.end(), [](Position a, Position b) { return index_of(a) < index_of(b); });
    return c;
}

bool is_orbit_rep(std::vector<Position> const& c, int cols) {
    auto key = [](std::vector<Position> const& v) {
        std::vector<int> k;
        for (auto p : v) k.push_back(index_of(p));
        return k;
    };
    auto const own = key(c);
    for (int k = 1; k < cols; ++k)
        if (key(rotated(c, k, cols)) < own) return false;
    return true;
}

// Outcome of the candidate rotated by k columns; trials stays 0 since it was
// not examined.
Outcome rotate_outcome(Outcome const& o, int k, int cols, RatioTable const& by_ratio) {
    auto shift = [&](Position p) { return Position{p.row, (p.col + k) % cols}; };
    Outcome r;
    for (int b = 0; b < 32; ++b)
        if (o.mask >> b & 1) r.mask |= std::uint32_t{1} << index_of(shift(position_of(b)));
    auto pairs = [&](std::vector<EqPair> v) {
        for (auto& e : v) {
            e.first.pos = shift(e.first.pos);
            e.second.pos = shift(e.second.pos);
            if (index_of(e.second.pos) < index_of(e.first.pos)) {
                std::swap(e.first, e.second);
                auto const w = *by_ratio[gf_mul(e.second.weight, gf_inv(e.first.weight))];
                e.first.weight = w.first;
                e.second.weight = w.second;
            }
        }
        std::sort(v.begin(), v.end(), [](EqPair const& a, EqPair const& b) {
            return std::pair(index_of(a.first.pos), index_of(a.second.pos)) <
                   std::pair(index_of(b.first.pos), index_of(b.second.pos));
        });
        return v;
    };
    r.eq_full = pairs(o.eq_full);
    r.eq_special = pairs(o.eq_special);
    return r;
}

bool is_hit(Outcome const& o, Want want) {
    return want == Want::ZeroSum ? o.mask != 0 : !(o.eq_full.empty() && o.eq_special.empty());
}

Scan scan(SearchConfig const& cfg, Want want) {
    check_config(cfg);
    auto const start = std::chrono::steady_clock::now();
    auto const params = cfg.params.with_rounds(cfg.rounds);
    int const cols = params.block_cols();
    Scan s;
    for (auto& c : enumerate_candidates(cols, cfg.order))
        if (!cfg.filter || cfg.filter(c)) s.candidates.push_back(std::move(c));
    std::size_t const n = s.candidates.size();
    s.result.candidates = n;
    s.outcomes.assign(n, Outcome{});
    s.result.trials_per_candidate.assign(n, 0);
    std::vector<bool> done(n, false);
    auto run = [&](std::size_t i) {
        s.outcomes[i] = examine(cfg, params, s.candidates[i], i, want, s.result.encryptions);
        s.result.trials_per_candidate[i] = s.outcomes[i].trials;
        done[i] = true;
    };

    if (!cfg.orbit_reps) {
        for (std::size_t i = 0; i < n; ++i) {
            run(i);
            if (cfg.progress) cfg.progress(i + 1, n);
        }
    } else {
        std::map<std::vector<Position>, std::size_t> index;
        for (std::size_t i = 0; i < n; ++i) index[s.candidates[i]] = i;
        std::vector<std::size_t> reps;
        for (std::size_t i = 0; i < n; ++i)
            if (is_orbit_rep(s.candidates[i], cols)) reps.push_back(i);
        for (std::size_t r = 0; r < reps.size(); ++r) {
            run(reps[r]);
            if (cfg.progress) cfg.progress(r + 1, reps.size());
        }
        auto const by_ratio = ratio_table(cfg.all_weights);
        for (std::size_t i : reps) {
            if (!is_hit(s.outcomes[i], want)) continue;
            for (int k = 1; k < cols; ++k)
                if (auto it = index.find(rotated(s.candidates[i], k, cols)); it != index.end() && !done[it->second]) {
                    s.outcomes[it->second] = rotate_outcome(s.outcomes[i], k, cols, by_ratio);
                    done[it->second] = true;
                }
        }
    }
    s.result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return s;
}

IntegralProperty make_property(SearchConfig const& cfg, std::vector<Position> const& active) {
    IntegralProperty p;
    p.params = cfg.params;
    p.active = active;
    p.rounds = cfg.rounds;
    return p;
}

std::vector<Position> positions_of(std::uint32_t mask) {
    std::vector<Position> out;
    for (int k = 0; k < 32; ++k)
        if (mask >> k & 1) out.push_back(position_of(k));
    return out;
}

}  // namespace

std::size_t SearchResult::minimal_count() const {
    return static_cast<std::size_t>(
        std::count_if(properties.begin(), properties.end(), [](auto const& d) { return !d.implied_by_lower_order; }));
}

std::vector<std::vector<Position>> enumerate_candidates(int cols, int order) {
    int const n = 4 * cols;
    std::vector<std::vector<Position>> out;
    if (order < 1 || order > n) return out;
    std::vector<int> idx(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        std::vector<Position> c;
        for (int k : idx) c.push_back(position_of(k));
        out.push_back(std::move(c));
        int i = order - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - order + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < order; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

CandidateFilter smoke_filter() {
    return [](std::vector<Position> const& c) {
        return std::all_of(c.begin(), c.end(), [](Position p) { return p.col <= 1; });
    };
}

std::vector<EqPair> weighted_equalities(State const& sum, bool all_weights) {
    auto const by_ratio = ratio_table(all_weights);
    std::vector<EqPair> out;
    int const n = sum.cols() * 4;
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q)
            if (auto e = equality_for(by_ratio, sum, p, q)) out.push_back(*e);
    return out;
}

VerifyReport verify_property(IntegralProperty const& prop, int trials, std::uint64_t seed, int threads) {
    prop.validate();
    if (prop.order() > 4) throw Unenumerable("structures above order 4 cannot be enumerated");
    if (trials < 1) throw std::invalid_argument("verification needs at least one trial");
    auto const params = prop.params.with_rounds(prop.rounds);

    VerifyReport rep;
    for (int trial = 0; trial < trials; ++trial) {
        auto rng = trial_rng(seed, {static_cast<std::uint64_t>(trial)});
        auto const sums = run_trial(params, prop.active, rng, threads);
        rep.encryptions += std::uint64_t{1} << (8 * prop.order());
        auto const v = check_expectation(prop.final_special ? sums.special : sums.full, prop);
        if (trial == 0) {
            rep.verdicts = v;
        } else {
            for (std::size_t i = 0; i < v.zero_sum.size(); ++i) rep.verdicts.zero_sum[i].second &= v.zero_sum[i].second;
            for (std::size_t i = 0; i < v.eq_pairs.size(); ++i) rep.verdicts.eq_pairs[i].second &= v.eq_pairs[i].second;
        }
        ++rep.trials;
    }
    rep.pass = rep.verdicts.all_pass();
    rep.log2_false_positive = -8.0 * trials * static_cast<double>(prop.zero_sum.size() + prop.eq_pairs.size());
    return rep;
}

SearchResult search_properties(SearchConfig const& cfg) {
    auto s = scan(cfg, Want::ZeroSum);

    // Balanced bytes already explained by (d-1)-subsets.
    std::map<std::vector<Position>, std::uint32_t> lower;
    if (cfg.order > 1) {
        SearchConfig sub = cfg;
        sub.order = cfg.order - 1;
        sub.filter = nullptr;
        sub.progress = nullptr;
        auto const sr = search_properties(sub);
        for (auto const& d : sr.properties) {
            std::uint32_t m = 0;
            for (auto const& z : d.property.zero_sum) m |= std::uint32_t{1} << index_of(z);
            lower[d.property.active] = m;
        }
    }

    for (std::size_t i = 0; i < s.candidates.size(); ++i) {
        auto const& o = s.outcomes[i];
        if (o.mask == 0) continue;
        Discovery d{make_property(cfg, s.candidates[i]), false};
        d.property.zero_sum = positions_of(o.mask);
        d.property.eq_pairs = o.eq_full;
        std::uint32_t inherited = 0;
        for (std::size_t drop = 0; cfg.order > 1 && drop < s.candidates[i].size(); ++drop) {
            auto sub = s.candidates[i];
            sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
            if (auto it = lower.find(sub); it != lower.end()) inherited |= it->second;
        }
        d.implied_by_lower_order = (o.mask & ~inherited) == 0;
        s.result.properties.push_back(std::move(d));
    }
    return s.result;
}

SearchResult find_eq_properties(SearchConfig const& cfg) {
    auto s = scan(cfg, Want::Eq);
    for (std::size_t i = 0; i < s.candidates.size(); ++i) {
        auto const& o = s.outcomes[i];
        for (bool special : {false, true}) {
            auto const& pairs = special ? o.eq_special : o.eq_full;
            if (pairs.empty()) continue;
            Discovery d{make_property(cfg, s.candidates[i]), false};
            d.property.eq_pairs = pairs;
            d.property.final_special = special;
            s.result.properties.push_back(std::move(d));
        }
    }
    return s.result;
}

IntegralProperty rotate_columns(IntegralProperty const& prop, int k) {
    int const t = prop.params.block_cols();
    auto shift = [&](Position p) { return Position{p.row, ((p.col + k) % t + t) % t}; };
    IntegralProperty r = prop;
    for (auto& p : r.active) p = shift(p);
    for (auto& p : r.zero_sum) p = shift(p);
    for (auto& e : r.eq_pairs) {
        e.first.pos = shift(e.first.pos);
        e.second.pos = shift(e.second.pos);
    }
    return r;
}

IntegralProperty canonical(IntegralProperty prop) {
    std::sort(prop.active.begin(), prop.active.end());
    std::sort(prop.zero_sum.begin(), prop.zero_sum.end());
    for (auto& e : prop.eq_pairs)
        if (e.second.pos < e.first.pos) std::swap(e.first, e.second);
    std::sort(prop.eq_pairs.begin(), prop.eq_pairs.end());
    return prop;
}

bool same_property(IntegralProperty const& a, IntegralProperty const& b) {
    auto const x = canonical(a), y = canonical(b);
    return x.params == y.params && x.rounds == y.rounds && x.active == y.active && x.zero_sum == y.zero_sum &&
           x.eq_pairs == y.eq_pairs && x.final_special == y.final_special;
}

nlohmann::json to_json(SearchResult const& result) {
    nlohmann::json props = nlohmann::json::array();
    for (auto const& d : result.properties) {
        auto j = to_json(d.property);
        j["implied_by_lower_order"] = d.implied_by_lower_order;
        props.push_back(std::move(j));
    }
    return {{"count", result.properties.size()},
            {"minimal_count", result.minimal_count()},
            {"candidates", result.candidates},
            {"encryptions", result.encryptions},
            {"wall_time", result.wall_seconds},
            {"trials_per_candidate", result.trials_per_candidate},
            {"properties", std::move(props)}};
}

nlohmann::json to_json(VerifyReport const& report) {
    nlohmann::json zero = nlohmann::json::array();
    for (auto const& [p, ok] : report.verdicts.zero_sum) zero.push_back({{"pos", {p.row, p.col}}, {"pass", ok}});
    nlohmann::json eq = nlohmann::json::array();
    for (auto const& [e, ok] : report.verdicts.eq_pairs)
        eq.push_back({{"pair",
                       {{e.first.pos.row, e.first.pos.col, e.first.weight}, {e.second.pos.row, e.second.pos.col, e.second.weight}}},
                      {"pass", ok}});
    return {{"pass", report.pass},
            {"trials", report.trials},
            {"zero_sum", std::move(zero)},
            {"eq_pairs", std::move(eq)},
            {"log2_false_positive", report.log2_false_positive},
            {"encryptions", report.encryptions}};
}

std::string to_csv(SearchResult const& result) {
    auto list = [](std::vector<Position> const& v) {
        std::string s;
        for (auto const& p : v) s += (s.empty() ? "" : " ") + std::string("(") + std::to_string(p.row) + "," + std::to_string(p.col) + ")";
        return s;
    };
    std::ostringstream out;
    out << "index,block_bits,order,rounds,active,zero_sum,eq_pairs,final_special,implied_by_lower_order\n";
    for (std::size_t i = 0; i < result.properties.size(); ++i) {
        auto const& p = result.properties[i].property;
        out << i << ',' << p.params.block_bits() << ',' << p.order() << ',' << p.rounds << ",\"" << list(p.active)
            << "\",\"" << list(p.zero_sum) << "\"," << p.eq_pairs.size() << ',' << p.final_special << ','
            << result.properties[i].implied_by_lower_order << '\n';
    }
    return out.str();
}

}  // namespace rijndael
