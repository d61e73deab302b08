#include "rijndael/structure_sum.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>
#include <vector>

namespace rijndael {

namespace {

using Table = std::array<std::array<Column, 256>, 4>;

struct Term {
    int out;
    int row;
    int src;
};

// Round whose input varies only in some columns across the inner loop.
struct IncrementalRound {
    int round = 0;
    Table const* table = nullptr;
    std::array<bool, kMaxCols> out_varying{};
    std::vector<Term> varying;
    std::vector<Term> fixed;
};

IncrementalRound plan_round(CipherParams const& p, int round, bool mix, std::array<bool, kMaxCols> const& in_varying) {
    IncrementalRound inc;
    inc.round = round;
    inc.table = mix ? &round_tables().te : &round_tables().sb;
    int const t = p.block_cols();
    for (int j = 0; j < t; ++j) {
        for (int r = 0; r < 4; ++r) {
            int const src = (j + p.shift(r)) % t;
            Term const term{j, r, src};
            if (in_varying[static_cast<std::size_t>(src)]) {
                inc.varying.push_back(term);
                inc.out_varying[static_cast<std::size_t>(j)] = true;
            } else {
                inc.fixed.push_back(term);
            }
        }
    }
    return inc;
}

inline Column lookup(Table const& table, Term const& term, ColumnBlock const& in) {
    return table[static_cast<std::size_t>(term.row)][byte_of(in[static_cast<std::size_t>(term.src)], term.row)];
}

// Fixed part of every output column (key included).
ColumnBlock fixed_part(IncrementalRound const& inc, TableCipher const& cipher, ColumnBlock const& in) {
    ColumnBlock out{};
    for (int j = 0; j < cipher.cols(); ++j) out[static_cast<std::size_t>(j)] = cipher.round_key(inc.round, j);
    for (auto const& term : inc.fixed) out[static_cast<std::size_t>(term.out)] ^= lookup(*inc.table, term, in);
    return out;
}


struct KernelInput {
    TableCipher const& cipher;
    int rounds;
    ColumnBlock const& base1;
    std::vector<std::array<Column, 256>> const& delta;
    std::vector<int> const& target_col;
    IncrementalRound const& inc2;
    IncrementalRound const& inc3;
    std::uint64_t outer_begin;
    std::uint64_t outer_end;
};

template <int T>
constexpr std::array<int, 4> kShifts = T == 8 ? std::array<int, 4>{0, 1, 3, 4}
                                       : T == 7 ? std::array<int, 4>{0, 1, 2, 4}
                                                : std::array<int, 4>{0, 1, 2, 3};

// Full round with constant block width; `mix` picks T-tables or plain S-box.
template <int T>
inline void full_round(Column (&x)[T], Table const& table, Column const* key) {
    constexpr auto s = kShifts<T>;
    Column out[T];
    for (int j = 0; j < T; ++j)
        out[j] = table[0][byte_of(x[j], 0)] ^ table[1][byte_of(x[(j + s[1]) % T], 1)] ^
                 table[2][byte_of(x[(j + s[2]) % T], 2)] ^ table[3][byte_of(x[(j + s[3]) % T], 3)] ^ key[j];
    for (int j = 0; j < T; ++j) x[j] = out[j];
}

// Last round of a sum: the round key cancels over an even number of texts.
template <int T>
inline void accumulate_final(Column const (&x)[T], Table const& sb, Column (&acc)[T]) {
    constexpr auto s = kShifts<T>;
    for (int j = 0; j < T; ++j)
        acc[j] ^= sb[0][byte_of(x[j], 0)] ^ sb[1][byte_of(x[(j + s[1]) % T], 1)] ^
                  sb[2][byte_of(x[(j + s[2]) % T], 2)] ^ sb[3][byte_of(x[(j + s[3]) % T], 3)];
}

template <int T>
ColumnBlock run_kernel(KernelInput const& in) {
    auto const& tables = round_tables();
    int const d = static_cast<int>(in.delta.size());
    int const inner_col = in.target_col[0];
    auto const& delta0 = in.delta[0];
    Table const& table2 = *in.inc2.table;
    bool const has3 = in.rounds >= 3;

    // Round-2 varying terms all read the inner column: one per row.
    std::array<int, 4> out2{};
    for (auto const& term : in.inc2.varying) out2[static_cast<std::size_t>(term.row)] = term.out;

    // Four varying round-2 columns, each feeding one term per row.
    constexpr int kTerms3 = 16;
    std::array<Term, kTerms3> terms3{};
    if (has3) {
        if (in.inc3.varying.size() != kTerms3) throw std::logic_error("unexpected round-3 dependency count");
        std::copy(in.inc3.varying.begin(), in.inc3.varying.end(), terms3.begin());
    }
    Table const& table3 = has3 ? *in.inc3.table : tables.sb;

    // Keys of rounds 4..R-1; the last round's key cancels.
    std::vector<Column> keys;
    for (int r = 4; r < in.rounds; ++r)
        for (int j = 0; j < T; ++j) keys.push_back(in.cipher.round_key(r, j));

    Column acc[T] = {};
    for (std::uint64_t o = in.outer_begin; o < in.outer_end; ++o) {
        ColumnBlock x1 = in.base1;
        std::uint64_t v = o;
        for (int a = 1; a < d; ++a) {
            x1[static_cast<std::size_t>(in.target_col[static_cast<std::size_t>(a)])] ^=
                in.delta[static_cast<std::size_t>(a)][v & 0xff];
            v >>= 8;
        }
        ColumnBlock const c2 = fixed_part(in.inc2, in.cipher, x1);
        // Round-3 fixed terms only read round-2 columns that do not vary,
        // and those equal c2.
        ColumnBlock const c3 = has3 ? fixed_part(in.inc3, in.cipher, c2) : ColumnBlock{};
        Column const col_outer = x1[static_cast<std::size_t>(inner_col)];

        for (int v0 = 0; v0 < 256; ++v0) {
            Column const col = col_outer ^ delta0[static_cast<std::size_t>(v0)];
            Column x2[T];
            for (int j = 0; j < T; ++j) x2[j] = c2[static_cast<std::size_t>(j)];
            x2[out2[0]] ^= table2[0][byte_of(col, 0)];
            x2[out2[1]] ^= table2[1][byte_of(col, 1)];
            x2[out2[2]] ^= table2[2][byte_of(col, 2)];
            x2[out2[3]] ^= table2[3][byte_of(col, 3)];
            if (!has3) {
                for (int j = 0; j < T; ++j) acc[j] ^= x2[j];
                continue;
            }
            Column x[T];
            for (int j = 0; j < T; ++j) x[j] = c3[static_cast<std::size_t>(j)];
            for (int i = 0; i < kTerms3; ++i) {
                auto const& term = terms3[static_cast<std::size_t>(i)];
                x[term.out] ^= table3[static_cast<std::size_t>(term.row)][byte_of(x2[term.src], term.row)];
            }
            if (in.rounds == 3) {
                for (int j = 0; j < T; ++j) acc[j] ^= x[j];
                continue;
            }
            for (int r = 4; r < in.rounds; ++r) full_round<T>(x, tables.te, &keys[static_cast<std::size_t>((r - 4) * T)]);
            accumulate_final<T>(x, tables.sb, acc);
        }
    }
    ColumnBlock out{};
    for (int j = 0; j < T; ++j) out[static_cast<std::size_t>(j)] = acc[j];
    return out;
}

}  // namespace

int default_threads() {
    unsigned const n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

StructureSummer::StructureSummer(TableCipher const& cipher, int rounds) : cipher_(cipher), rounds_(rounds) {
    if (rounds < 1 || rounds > cipher.params().rounds())
        throw RoundOutOfRange("summer round count outside the key schedule");
}

State StructureSummer::special_sum(StructuredSet const& set, std::uint64_t outer_begin, std::uint64_t outer_end) const {
    int const t = cipher_.cols();
    if (set.base().cols() != t) throw InvalidParams("structure width does not match cipher");
    outer_end = std::min(outer_end, outer_count(set));
    State zero(t);
    if (outer_begin >= outer_end || set.multiplicity() % 2 == 0) return zero;

    if (rounds_ == 1) {
        ColumnBlock acc{};
        for (std::uint64_t i = outer_begin << 8; i < (outer_end << 8); ++i) {
            auto b = to_columns(set.at(i));
            cipher_.encrypt(b, 1, true);
            for (int c = 0; c < t; ++c) acc[static_cast<std::size_t>(c)] ^= b[static_cast<std::size_t>(c)];
        }
        return from_columns(acc, t);
    }

    auto const& p = cipher_.params();
    auto const& tables = round_tables();
    auto const& active = set.active();
    int const d = set.order();

    // Round 1 on the base text, and per active byte the column change caused
    // by each value.
    ColumnBlock base1 = to_columns(set.base());
    for (int c = 0; c < t; ++c) base1[static_cast<std::size_t>(c)] ^= cipher_.round_key(0, c);
    ColumnBlock const base_in = base1;
    bool const mix1 = rounds_ > 1;
    cipher_.round(base1, 1, mix1);
    Table const& table1 = mix1 ? tables.te : tables.sb;

    std::vector<std::array<Column, 256>> delta(static_cast<std::size_t>(d));
    std::vector<int> target_col(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        Position const pos = active[static_cast<std::size_t>(a)];
        std::uint8_t const k = byte_of(cipher_.round_key(0, pos.col), pos.row);
        std::uint8_t const keyed_base = byte_of(base_in[static_cast<std::size_t>(pos.col)], pos.row);
        auto const& row_table = table1[static_cast<std::size_t>(pos.row)];
        for (int v = 0; v < 256; ++v)
            delta[static_cast<std::size_t>(a)][static_cast<std::size_t>(v)] =
                row_table[static_cast<std::uint8_t>(v ^ k)] ^ row_table[keyed_base];
        target_col[static_cast<std::size_t>(a)] = ((pos.col - p.shift(pos.row)) % t + t) % t;
    }

    std::array<bool, kMaxCols> varying1{};
    int const inner_col = target_col[0];
    varying1[static_cast<std::size_t>(inner_col)] = true;
    IncrementalRound const inc2 = plan_round(p, 2, rounds_ > 2, varying1);
    bool const has3 = rounds_ >= 3;
    IncrementalRound const inc3 = has3 ? plan_round(p, 3, rounds_ > 3, inc2.out_varying) : IncrementalRound{};

    KernelInput const in{cipher_, rounds_, base1, delta, target_col, inc2, inc3, outer_begin, outer_end};
    ColumnBlock acc{};
    switch (t) {
        case 4: acc = run_kernel<4>(in); break;
        case 5: acc = run_kernel<5>(in); break;
        case 6: acc = run_kernel<6>(in); break;
        case 7: acc = run_kernel<7>(in); break;
        default: acc = run_kernel<8>(in); break;
    }
    return from_columns(acc, t);
}

State StructureSummer::special_sum(StructuredSet const& set, int threads) const {
    std::uint64_t const outer = outer_count(set);
    threads = std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::uint64_t>(outer, 1024))));
    if (threads == 1) return special_sum(set, 0, outer);

    std::vector<State> partial(static_cast<std::size_t>(threads), State(set.base().cols()));
    std::vector<std::thread> workers;
    for (int i = 0; i < threads; ++i) {
        std::uint64_t const begin = outer * static_cast<std::uint64_t>(i) / static_cast<std::uint64_t>(threads);
        std::uint64_t const end = outer * static_cast<std::uint64_t>(i + 1) / static_cast<std::uint64_t>(threads);
        workers.emplace_back([&, i, begin, end] { partial[static_cast<std::size_t>(i)] = special_sum(set, begin, end); });
    }
    for (auto& w : workers) w.join();
    State acc(set.base().cols());
    for (auto const& s : partial) acc ^= s;
    return acc;
}

State StructureSummer::full_sum(StructuredSet const& set, int threads) const {
    return mix_columns(special_sum(set, threads));
}

State reference_sum(StructuredSet const& set, RoundKeys const& rk, int rounds, bool final_special) {
    State acc(set.base().cols());
    for (auto const& s : set) acc ^= encrypt_reduced(s, rk, rounds, final_special);
    return acc;
}

}  // namespace rijndael
