#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rijndael/partial_sums.hpp"

namespace rijndael {

struct ScanStats {
    std::uint64_t lookups = 0;
    std::uint64_t candidates = 0;
    // passed[s]: key groups that satisfied structures 0..s.
    std::vector<std::uint64_t> passed;

    void merge(ScanStats const& other);
};

// Exhaustive scan of (k_0..k_4) for one target byte.
//
// Per (k_0, k_1, k_2) the texts of a structure collapse into W[c_3], the set of
// x_2 values of odd multiplicity among texts with that c_3 (256 bits each).
// For every k_3 the parity set of x_3 is then the XOR of the translates
// W[c_3] ^ S_3[c_3 ^ k_3], and the filter for all 256 k_4 follows from
// a table indexed by bytes of that set. The first two structures go through
// this pipeline together; later structures only see the survivors.
class KeyScan {
public:
    // `structures` are odd-multiplicity tuple sets (see odd_tuples).
    KeyScan(FusedTable const& fused, std::vector<std::vector<CipherTuple>> const& structures);
    ~KeyScan();
    KeyScan(KeyScan const&) = delete;
    KeyScan& operator=(KeyScan const&) = delete;

    std::size_t structures() const;

    // Key groups with k_0 | k_1 << 8 in [begin, end) that pass every
    // structure, sorted.
    std::vector<KeyGroup> scan(std::uint32_t begin, std::uint32_t end, ScanStats& stats, int threads = 1,
                               std::function<void(std::size_t, std::size_t)> const& progress = {}) const;

    // Same result from a plain implementation (parity histograms per k_3).
    std::vector<KeyGroup> scan_portable(std::uint32_t begin, std::uint32_t end, ScanStats& stats) const;

    // True when scan() uses the AVX-512 VBMI / GFNI kernel.
    static bool accelerated();

    struct Impl;

private:
    Impl* impl_;
};

// filter[k_4] for every k_4 at once.
std::array<std::uint8_t, 256> filter_all_k4(TargetMap const& map, std::span<const CipherTuple> tuples,
                                            std::array<std::uint8_t, 4> const& last);

}  // namespace rijndael
