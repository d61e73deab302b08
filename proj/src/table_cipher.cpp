#include "rijndael/table_cipher.hpp"

#include <bit>

#include "rijndael/gf256.hpp"

namespace rijndael {

RoundTables const& round_tables() {
    static const RoundTables tables = [] {
        RoundTables t{};
        auto const& s = sbox();
        for (int x = 0; x < 256; ++x) {
            std::uint8_t const v = s[static_cast<std::size_t>(x)];
            Column const base = static_cast<Column>(gf_mul(v, 2)) | static_cast<Column>(v) << 8 |
                                static_cast<Column>(v) << 16 | static_cast<Column>(gf_mul(v, 3)) << 24;
            for (int r = 0; r < 4; ++r) {
                t.te[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)] = std::rotl(base, 8 * r);
                t.sb[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)] = static_cast<Column>(v) << (8 * r);
            }
        }
        return t;
    }();
    return tables;
}

ColumnBlock to_columns(State const& s) {
    ColumnBlock b{};
    for (int c = 0; c < s.cols(); ++c)
        b[static_cast<std::size_t>(c)] = static_cast<Column>(s.at(0, c)) | static_cast<Column>(s.at(1, c)) << 8 |
                                         static_cast<Column>(s.at(2, c)) << 16 | static_cast<Column>(s.at(3, c)) << 24;
    return b;
}

State from_columns(ColumnBlock const& b, int cols) {
    State s(cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < 4; ++r) s.at(r, c) = byte_of(b[static_cast<std::size_t>(c)], r);
    return s;
}

TableCipher::TableCipher(CipherParams const& params, RoundKeys const& rk) : params_(params) {
    if (rk.keys.empty() || rk[0].cols() != params.block_cols())
        throw InvalidParams("round keys do not match cipher parameters");
    keys_.assign(static_cast<std::size_t>((rk.rounds() + 1) * kMaxCols), 0);
    for (int r = 0; r <= rk.rounds(); ++r) {
        auto cols = to_columns(rk[r]);
        for (int c = 0; c < kMaxCols; ++c) keys_[static_cast<std::size_t>(r * kMaxCols + c)] = cols[static_cast<std::size_t>(c)];
    }
    int const t = params.block_cols();
    for (int row = 0; row < 4; ++row)
        for (int c = 0; c < t; ++c)
            source_col_[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)] = (c + params.shift(row)) % t;
}

void TableCipher::round(ColumnBlock& s, int round, bool mix) const {
    auto const& tb = round_tables();
    auto const& table = mix ? tb.te : tb.sb;
    int const t = cols();
    ColumnBlock out{};
    for (int c = 0; c < t; ++c) {
        auto const uc = static_cast<std::size_t>(c);
        out[uc] = table[0][byte_of(s[static_cast<std::size_t>(source_col_[0][uc])], 0)] ^
                  table[1][byte_of(s[static_cast<std::size_t>(source_col_[1][uc])], 1)] ^
                  table[2][byte_of(s[static_cast<std::size_t>(source_col_[2][uc])], 2)] ^
                  table[3][byte_of(s[static_cast<std::size_t>(source_col_[3][uc])], 3)] ^ round_key(round, c);
    }
    s = out;
}

void TableCipher::encrypt(ColumnBlock& s, int rounds, bool final_special) const {
    if (rounds < 1 || static_cast<std::size_t>(rounds) * kMaxCols >= keys_.size())
        throw RoundOutOfRange("round count outside key schedule");
    for (int c = 0; c < cols(); ++c) s[static_cast<std::size_t>(c)] ^= round_key(0, c);
    for (int r = 1; r <= rounds; ++r) round(s, r, !(final_special && r == rounds));
}

State TableCipher::encrypt(State const& pt, int rounds, bool final_special) const {
    if (pt.cols() != cols()) throw InvalidParams("state width does not match cipher block size");
    auto b = to_columns(pt);
    encrypt(b, rounds, final_special);
    return from_columns(b, cols());
}

}  // namespace rijndael
