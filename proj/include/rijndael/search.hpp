#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rijndael/integral.hpp"

namespace rijndael {

class Unenumerable : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using CandidateFilter = std::function<bool(std::vector<Position> const&)>;

struct SearchConfig {
    CipherParams params = CipherParams::from_bits(128, 128);
    int order = 2;
    int rounds = 4;
    int trials = 5;
    std::uint64_t seed = 0;
    int threads = 1;
    CandidateFilter filter;     // empty: every position set
    bool all_weights = false;   // Eq weights 01..ff instead of {01,02,03}
    // Examine one candidate per column-rotation orbit and report the other
    // members by rotating its outcome (their trials_per_candidate is 0).
    // Rotating columns commutes with every round, so the results match a full
    // scan up to trial noise.
    bool orbit_reps = false;
    std::function<void(std::size_t done, std::size_t total)> progress;
};

struct Discovery {
    IntegralProperty property;
    // Every balanced byte is already balanced for some (d-1)-byte subset of
    // the active positions.
    bool implied_by_lower_order = false;
};

struct SearchResult {
    std::vector<Discovery> properties;
    std::vector<int> trials_per_candidate;  // candidate enumeration order
    std::uint64_t candidates = 0;
    std::uint64_t encryptions = 0;
    double wall_seconds = 0;

    std::size_t minimal_count() const;
};

struct VerifyReport {
    bool pass = false;
    int trials = 0;
    Verdicts verdicts;  // an item passes iff it held in every trial
    double log2_false_positive = 0;  // -8 * trials * expected items
    std::uint64_t encryptions = 0;
};

// Fresh key and constants per trial, derived from (seed, trial).
VerifyReport verify_property(IntegralProperty const& prop, int trials, std::uint64_t seed, int threads = 1);

// Zero-sum search over every d-subset of byte positions (full-round sums).
// Survivors of a one-key screen are confirmed with trials-1 further keys;
// Eq pairs among the remaining bytes are attached to each property.
SearchResult search_properties(SearchConfig const& cfg);

// Eq-pair search under both last-round conventions. A finding lists only the
// weighted equalities whose bytes are not jointly zero.
SearchResult find_eq_properties(SearchConfig const& cfg);

// Every d-subset of positions of a t-column state, in lexicographic order of
// the byte index row + 4 * col.
std::vector<std::vector<Position>> enumerate_candidates(int cols, int order);

// Active positions confined to columns 0 and 1.
CandidateFilter smoke_filter();

// Weighted equalities w1 * sum[p] = w2 * sum[q] with p < q, at most one per
// pair (weights picked canonically per ratio), skipping pairs where both
// bytes are zero.
std::vector<EqPair> weighted_equalities(State const& sum, bool all_weights);

// Shift every position by k columns.
IntegralProperty rotate_columns(IntegralProperty const& prop, int k);

// Sorted positions and pairs, so that equal properties compare equal.
IntegralProperty canonical(IntegralProperty prop);
bool same_property(IntegralProperty const& a, IntegralProperty const& b);

nlohmann::json to_json(SearchResult const& result);
nlohmann::json to_json(VerifyReport const& report);
std::string to_csv(SearchResult const& result);

}  // namespace rijndael
