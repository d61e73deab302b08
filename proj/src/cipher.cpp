#include "rijndael/cipher.hpp"

#include <algorithm>
#include <cctype>

#include "rijndael/gf256.hpp"

namespace rijndael {

namespace {

constexpr std::array<std::uint8_t, 256> kSbox = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
};

constexpr std::array<std::uint8_t, 256> invert(std::array<std::uint8_t, 256> const& s) {
    std::array<std::uint8_t, 256> inv{};
    for (int i = 0; i < 256; ++i) inv[s[static_cast<std::size_t>(i)]] = static_cast<std::uint8_t>(i);
    return inv;
}

constexpr std::array<std::uint8_t, 256> kInvSbox = invert(kSbox);

void check_state(State const& s, CipherParams const& p) {
    if (s.cols() != p.block_cols()) throw InvalidParams("state width does not match cipher block size");
}

void mix_column(std::uint8_t* c) {
    std::uint8_t const a0 = c[0], a1 = c[1], a2 = c[2], a3 = c[3];
    c[0] = static_cast<std::uint8_t>(gf_mul(a0, 2) ^ gf_mul(a1, 3) ^ a2 ^ a3);
    c[1] = static_cast<std::uint8_t>(a0 ^ gf_mul(a1, 2) ^ gf_mul(a2, 3) ^ a3);
    c[2] = static_cast<std::uint8_t>(a0 ^ a1 ^ gf_mul(a2, 2) ^ gf_mul(a3, 3));
    c[3] = static_cast<std::uint8_t>(gf_mul(a0, 3) ^ a1 ^ a2 ^ gf_mul(a3, 2));
}

void inv_mix_column(std::uint8_t* c) {
    std::uint8_t const a0 = c[0], a1 = c[1], a2 = c[2], a3 = c[3];
    c[0] = static_cast<std::uint8_t>(gf_mul(a0, 14) ^ gf_mul(a1, 11) ^ gf_mul(a2, 13) ^ gf_mul(a3, 9));
    c[1] = static_cast<std::uint8_t>(gf_mul(a0, 9) ^ gf_mul(a1, 14) ^ gf_mul(a2, 11) ^ gf_mul(a3, 13));
    c[2] = static_cast<std::uint8_t>(gf_mul(a0, 13) ^ gf_mul(a1, 9) ^ gf_mul(a2, 14) ^ gf_mul(a3, 11));
    c[3] = static_cast<std::uint8_t>(gf_mul(a0, 11) ^ gf_mul(a1, 13) ^ gf_mul(a2, 9) ^ gf_mul(a3, 14));
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

}  // namespace

// ---------------------------------------------------------------------------
// CipherParams
// ---------------------------------------------------------------------------

CipherParams::CipherParams(int block_cols, int key_cols, int rounds)
    : block_cols_(block_cols), key_cols_(key_cols), rounds_(rounds), shifts_{0, 1, 2, 3} {
    if (block_cols < 4 || block_cols > 8) throw InvalidParams("block size must be 128..256 bits in 32-bit steps");
    if (key_cols != 4 && key_cols != 6 && key_cols != 8) throw InvalidParams("key size must be 128, 192 or 256 bits");
    if (rounds < 1 || rounds > 14) throw InvalidParams("round count must be in 1..14");
    if (block_cols == 7) shifts_ = {0, 1, 2, 4};
    if (block_cols == 8) shifts_ = {0, 1, 3, 4};
}

CipherParams CipherParams::from_bits(int block_bits, int key_bits, int rounds) {
    if (block_bits % 32 != 0) throw InvalidParams("block size must be a multiple of 32 bits");
    if (key_bits % 32 != 0) throw InvalidParams("key size must be a multiple of 32 bits");
    int const t = block_bits / 32;
    int const nk = key_bits / 32;
    if (t < 4 || t > 8) throw InvalidParams("block size must be 128..256 bits in 32-bit steps");
    if (nk != 4 && nk != 6 && nk != 8) throw InvalidParams("key size must be 128, 192 or 256 bits");
    return CipherParams(t, nk, rounds == 0 ? full_rounds(t, nk) : rounds);
}

int CipherParams::full_rounds(int block_cols, int key_cols) { return std::max(block_cols, key_cols) + 6; }

CipherParams CipherParams::with_rounds(int rounds) const { return CipherParams(block_cols_, key_cols_, rounds); }

std::string CipherParams::name() const {
    std::string n = block_cols_ == 4 ? "AES" : "Rijndael-" + std::to_string(block_bits());
    return n + "/" + std::to_string(key_bits()) + "/" + std::to_string(rounds_) + "r";
}

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

State State::from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 4 != 0) throw InvalidParams("state byte count must be a multiple of 4");
    State s(static_cast<int>(bytes.size() / 4));
    std::copy(bytes.begin(), bytes.end(), s.bytes_.begin());
    return s;
}

bool State::is_zero() const {
    auto b = bytes();
    return std::all_of(b.begin(), b.end(), [](std::uint8_t x) { return x == 0; });
}

State& State::operator^=(State const& other) {
    if (other.cols_ != cols_) throw InvalidParams("state width mismatch");
    for (std::size_t i = 0; i < bytes_.size(); ++i) bytes_[i] ^= other.bytes_[i];
    return *this;
}

bool operator==(State const& a, State const& b) {
    if (a.cols_ != b.cols_) return false;
    auto x = a.bytes();
    auto y = b.bytes();
    return std::equal(x.begin(), x.end(), y.begin());
}

// ---------------------------------------------------------------------------
// Round operations
// ---------------------------------------------------------------------------

std::array<std::uint8_t, 256> const& sbox() { return kSbox; }
std::array<std::uint8_t, 256> const& inv_sbox() { return kInvSbox; }

State sub_bytes(State s) {
    for (auto& b : s.bytes()) b = kSbox[b];
    return s;
}

State inv_sub_bytes(State s) {
    for (auto& b : s.bytes()) b = kInvSbox[b];
    return s;
}

State shift_rows(State const& s, CipherParams const& p) {
    check_state(s, p);
    int const t = s.cols();
    State out(t);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < t; ++c) out.at(r, c) = s.at(r, (c + p.shift(r)) % t);
    return out;
}

State inv_shift_rows(State const& s, CipherParams const& p) {
    check_state(s, p);
    int const t = s.cols();
    State out(t);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < t; ++c) out.at(r, (c + p.shift(r)) % t) = s.at(r, c);
    return out;
}

State mix_columns(State s) {
    for (int c = 0; c < s.cols(); ++c) mix_column(&s.bytes()[static_cast<std::size_t>(4 * c)]);
    return s;
}

State inv_mix_columns(State s) {
    for (int c = 0; c < s.cols(); ++c) inv_mix_column(&s.bytes()[static_cast<std::size_t>(4 * c)]);
    return s;
}

State add_round_key(State s, State const& k) { return s ^= k; }

// ---------------------------------------------------------------------------
// Key schedule
// ---------------------------------------------------------------------------

RoundKeys key_schedule(std::span<const std::uint8_t> master_key, CipherParams const& p) {
    int const nk = p.key_cols();
    int const t = p.block_cols();
    if (master_key.size() != static_cast<std::size_t>(4 * nk))
        throw InvalidKey("master key must be " + std::to_string(4 * nk) + " bytes, got " +
                         std::to_string(master_key.size()));

    int const total_words = t * (p.rounds() + 1);
    std::vector<std::array<std::uint8_t, 4>> w(static_cast<std::size_t>(total_words));
    for (int i = 0; i < nk && i < total_words; ++i)
        for (int j = 0; j < 4; ++j) w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = master_key[static_cast<std::size_t>(4 * i + j)];

    std::uint8_t rcon = 1;
    for (int i = nk; i < total_words; ++i) {
        auto temp = w[static_cast<std::size_t>(i - 1)];
        if (i % nk == 0) {
            std::rotate(temp.begin(), temp.begin() + 1, temp.end());
            for (auto& b : temp) b = kSbox[b];
            temp[0] ^= rcon;
            rcon = xtime(rcon);
        } else if (nk > 6 && i % nk == 4) {
            for (auto& b : temp) b = kSbox[b];
        }
        for (int j = 0; j < 4; ++j)
            w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                w[static_cast<std::size_t>(i - nk)][static_cast<std::size_t>(j)] ^ temp[static_cast<std::size_t>(j)];
    }

    RoundKeys rk;
    rk.keys.reserve(static_cast<std::size_t>(p.rounds() + 1));
    for (int r = 0; r <= p.rounds(); ++r) {
        State k(t);
        for (int c = 0; c < t; ++c)
            for (int row = 0; row < 4; ++row) k.at(row, c) = w[static_cast<std::size_t>(r * t + c)][static_cast<std::size_t>(row)];
        rk.keys.push_back(k);
    }
    return rk;
}

// ---------------------------------------------------------------------------
// Reduced-round encryption
// ---------------------------------------------------------------------------

namespace {

CipherParams params_for(State const& s, RoundKeys const& rk, int r) {
    if (rk.keys.empty()) throw InvalidKey("empty round key set");
    if (r < 1 || r > rk.rounds())
        throw RoundOutOfRange("round count " + std::to_string(r) + " outside 1.." + std::to_string(rk.rounds()));
    if (s.cols() != rk[0].cols()) throw InvalidParams("state width does not match round keys");
    // Only the shift offsets matter here; key size is irrelevant.
    return CipherParams::from_bits(32 * s.cols(), 128, 1);
}

}  // namespace

State encrypt_reduced(State pt, RoundKeys const& rk, int r, bool final_special) {
    auto const p = params_for(pt, rk, r);
    State s = add_round_key(pt, rk[0]);
    for (int round = 1; round <= r; ++round) {
        s = shift_rows(sub_bytes(s), p);
        if (!(final_special && round == r)) s = mix_columns(s);
        s = add_round_key(s, rk[round]);
    }
    return s;
}

State decrypt_reduced(State ct, RoundKeys const& rk, int r, bool final_special) {
    auto const p = params_for(ct, rk, r);
    State s = ct;
    for (int round = r; round >= 1; --round) {
        s = add_round_key(s, rk[round]);
        if (!(final_special && round == r)) s = inv_mix_columns(s);
        s = inv_sub_bytes(inv_shift_rows(s, p));
    }
    return add_round_key(s, rk[0]);
}

State encrypt(State const& pt, RoundKeys const& rk) { return encrypt_reduced(pt, rk, rk.rounds(), true); }
State decrypt(State const& ct, RoundKeys const& rk) { return decrypt_reduced(ct, rk, rk.rounds(), true); }

// ---------------------------------------------------------------------------
// Hex
// ---------------------------------------------------------------------------

std::vector<std::uint8_t> parse_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int const hi = hex_value(hex[i]);
        int const lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit in '" + std::string(hex) + "'");
        out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 15]);
    }
    return out;
}

State state_from_hex(std::string_view hex, CipherParams const& p) {
    auto bytes = parse_hex(hex);
    if (bytes.size() != static_cast<std::size_t>(p.block_bytes()))
        throw InvalidParams("expected " + std::to_string(p.block_bytes()) + " bytes of block data, got " +
                            std::to_string(bytes.size()));
    return State::from_bytes(bytes);
}

}  // namespace rijndael
