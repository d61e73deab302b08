#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rijndael {

class InvalidParams : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidKey : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class RoundOutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

inline constexpr int kMaxCols = 8;
inline constexpr int kMaxBytes = 4 * kMaxCols;

struct Position {
    int row = 0;
    int col = 0;

    friend constexpr bool operator==(Position, Position) = default;
    friend constexpr auto operator<=>(Position, Position) = default;
};

// Block/key geometry of one Rijndael-b instance.
class CipherParams {
public:
    // Table-driven round count max(t, Nk) + 6 unless `rounds` is given.
    // Key sizes other than 128/192/256 bits are rejected.
    static CipherParams from_bits(int block_bits, int key_bits, int rounds = 0);

    int block_cols() const { return block_cols_; }
    int block_bits() const { return 32 * block_cols_; }
    int block_bytes() const { return 4 * block_cols_; }
    int key_cols() const { return key_cols_; }
    int key_bits() const { return 32 * key_cols_; }
    int rounds() const { return rounds_; }
    std::array<int, 4> const& shift_offsets() const { return shifts_; }
    int shift(int row) const { return shifts_[static_cast<std::size_t>(row)]; }

    // Number of rounds of the full cipher for this block/key pair.
    static int full_rounds(int block_cols, int key_cols);

    CipherParams with_rounds(int rounds) const;

    std::string name() const;

    friend bool operator==(CipherParams const&, CipherParams const&) = default;

private:
    CipherParams(int block_cols, int key_cols, int rounds);

    int block_cols_;
    int key_cols_;
    int rounds_;
    std::array<int, 4> shifts_;
};

// 4 x t byte matrix, stored column-major: byte k of a message sits at
// row k % 4, column k / 4.
class State {
public:
    State() = default;
    explicit State(int cols) : cols_(cols) {
        if (cols < 4 || cols > kMaxCols) throw InvalidParams("state must have 4..8 columns");
    }
    static State from_bytes(std::span<const std::uint8_t> bytes);

    int cols() const { return cols_; }
    int size() const { return 4 * cols_; }

    std::uint8_t& at(int row, int col) { return bytes_[static_cast<std::size_t>(4 * col + row)]; }
    std::uint8_t at(int row, int col) const { return bytes_[static_cast<std::size_t>(4 * col + row)]; }
    std::uint8_t& at(Position p) { return at(p.row, p.col); }
    std::uint8_t at(Position p) const { return at(p.row, p.col); }
    std::uint8_t& operator[](int k) { return bytes_[static_cast<std::size_t>(k)]; }
    std::uint8_t operator[](int k) const { return bytes_[static_cast<std::size_t>(k)]; }

    std::span<std::uint8_t> bytes() { return {bytes_.data(), static_cast<std::size_t>(size())}; }
    std::span<const std::uint8_t> bytes() const { return {bytes_.data(), static_cast<std::size_t>(size())}; }

    bool is_zero() const;

    State& operator^=(State const& other);
    friend State operator^(State a, State const& b) { return a ^= b; }
    friend bool operator==(State const& a, State const& b);

private:
    int cols_ = 4;
    std::array<std::uint8_t, kMaxBytes> bytes_{};
};

struct RoundKeys {
    std::vector<State> keys;  // K_0 .. K_Nr

    int rounds() const { return static_cast<int>(keys.size()) - 1; }
    State const& operator[](int r) const { return keys[static_cast<std::size_t>(r)]; }
};

std::array<std::uint8_t, 256> const& sbox();
std::array<std::uint8_t, 256> const& inv_sbox();

State sub_bytes(State s);
State inv_sub_bytes(State s);
State shift_rows(State const& s, CipherParams const& p);
State inv_shift_rows(State const& s, CipherParams const& p);
State mix_columns(State s);
State inv_mix_columns(State s);
State add_round_key(State s, State const& k);

// Rijndael key expansion; round keys are consecutive t-word slices.
RoundKeys key_schedule(std::span<const std::uint8_t> master_key, CipherParams const& p);

// K_0, then `r` rounds. With `final_special` round r omits MixColumns.
State encrypt_reduced(State pt, RoundKeys const& rk, int r, bool final_special);
State decrypt_reduced(State ct, RoundKeys const& rk, int r, bool final_special);

State encrypt(State const& pt, RoundKeys const& rk);
State decrypt(State const& ct, RoundKeys const& rk);

// Two hex digits per byte, message order.
std::vector<std::uint8_t> parse_hex(std::string_view hex);
std::string to_hex(std::span<const std::uint8_t> bytes);
State state_from_hex(std::string_view hex, CipherParams const& p);
inline std::string to_hex(State const& s) { return to_hex(s.bytes()); }

}  // namespace rijndael
