#pragma once

#include <cstdint>

#include "rijndael/integral.hpp"
#include "rijndael/table_cipher.hpp"

namespace rijndael {

// XOR-sum of a structured set after `rounds` rounds, evaluated with
// incremental table lookups: the innermost active byte only disturbs a few
// columns in the second and third rounds, so those rounds reuse constant
// partial results computed once per 256 texts.
//
// special_sum() is the sum with the last round's MixColumns omitted.
// Structures always hold an even number of texts, so the last round key
// cancels and full_sum() = MixColumns(special_sum()).
class StructureSummer {
public:
    StructureSummer(TableCipher const& cipher, int rounds);

    int rounds() const { return rounds_; }

    // Sum over the texts whose outer counter (all active bytes but the first)
    // lies in [outer_begin, outer_end).
    State special_sum(StructuredSet const& set, std::uint64_t outer_begin, std::uint64_t outer_end) const;
    State special_sum(StructuredSet const& set, int threads = 1) const;
    State full_sum(StructuredSet const& set, int threads = 1) const;

    static std::uint64_t outer_count(StructuredSet const& set) { return set.distinct() >> 8; }

private:
    TableCipher const& cipher_;
    int rounds_;
};

// Plain route: encrypt every text with encrypt_reduced and XOR.
State reference_sum(StructuredSet const& set, RoundKeys const& rk, int rounds, bool final_special);

int default_threads();

}  // namespace rijndael
