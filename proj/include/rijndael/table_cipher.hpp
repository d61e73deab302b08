#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rijndael/cipher.hpp"

namespace rijndael {

// Column word: row r lives in bits 8r..8r+7.
using Column = std::uint32_t;
using ColumnBlock = std::array<Column, kMaxCols>;

// te[r][x] is MixColumns applied to a column holding S[x] at row r and
// zeros elsewhere.
struct RoundTables {
    std::array<std::array<Column, 256>, 4> te;
    std::array<std::array<Column, 256>, 4> sb;  // S[x] << 8r
};

RoundTables const& round_tables();

inline std::uint8_t byte_of(Column w, int row) { return static_cast<std::uint8_t>(w >> (8 * row)); }

ColumnBlock to_columns(State const& s);
State from_columns(ColumnBlock const& b, int cols);

// T-table encryption, bit-identical to encrypt_reduced.
class TableCipher {
public:
    TableCipher(CipherParams const& params, RoundKeys const& rk);

    CipherParams const& params() const { return params_; }
    int cols() const { return params_.block_cols(); }
    Column round_key(int round, int col) const {
        return keys_[static_cast<std::size_t>(round * kMaxCols + col)];
    }

    // One keyed round on column words; `mix` selects whether MixColumns runs.
    void round(ColumnBlock& s, int round, bool mix) const;

    void encrypt(ColumnBlock& s, int rounds, bool final_special) const;
    State encrypt(State const& pt, int rounds, bool final_special) const;

private:
    CipherParams params_;
    std::vector<Column> keys_;
    std::array<std::array<int, kMaxCols>, 4> source_col_{};  // ShiftRows source column per (row, col)
};

}  // namespace rijndael
