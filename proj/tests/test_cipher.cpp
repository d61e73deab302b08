#include <gtest/gtest.h>

#include <openssl/aes.h>
#include <openssl/evp.h>

#include <random>

#include "rijndael/cipher.hpp"
#include "rijndael/gf256.hpp"
#include "rijndael/table_cipher.hpp"

namespace rijndael {
namespace {

std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, int n) {
    std::vector<std::uint8_t> v(static_cast<std::size_t>(n));
    for (auto& b : v) b = static_cast<std::uint8_t>(rng());
    return v;
}

State random_state(std::mt19937_64& rng, int cols) { return State::from_bytes(random_bytes(rng, 4 * cols)); }

// S-box from its definition: inversion in GF(2^8) followed by the affine map.
std::uint8_t sbox_from_definition(std::uint8_t x) {
    std::uint8_t const inv = gf_inv(x);
    std::uint8_t out = 0;
    for (int i = 0; i < 8; ++i) {
        int const bit = ((inv >> i) ^ (inv >> ((i + 4) % 8)) ^ (inv >> ((i + 5) % 8)) ^ (inv >> ((i + 6) % 8)) ^
                         (inv >> ((i + 7) % 8)) ^ (0x63 >> i)) & 1;
        out |= static_cast<std::uint8_t>(bit << i);
    }
    return out;
}

std::vector<std::uint8_t> openssl_aes_ecb(std::vector<std::uint8_t> const& key, std::vector<std::uint8_t> const& pt) {
    EVP_CIPHER const* cipher = key.size() == 16 ? EVP_aes_128_ecb() : key.size() == 24 ? EVP_aes_192_ecb() : EVP_aes_256_ecb();
    EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
    std::vector<std::uint8_t> out(32);
    int len = 0;
    EVP_EncryptInit_ex(ctx, cipher, nullptr, key.data(), nullptr);
    EVP_CIPHER_CTX_set_padding(ctx, 0);
    EVP_EncryptUpdate(ctx, out.data(), &len, pt.data(), 16);
    EVP_CIPHER_CTX_free(ctx);
    out.resize(16);
    return out;
}

TEST(CipherParams, RoundCountsAndOffsets) {
    int const expected[3][5] = {{10, 11, 12, 13, 14}, {12, 12, 12, 13, 14}, {14, 14, 14, 14, 14}};
    int const keys[3] = {128, 192, 256};
    for (int k = 0; k < 3; ++k)
        for (int b = 0; b < 5; ++b)
            EXPECT_EQ(CipherParams::from_bits(128 + 32 * b, keys[k]).rounds(), expected[k][b]);

    EXPECT_EQ(CipherParams::from_bits(128, 128).shift_offsets(), (std::array<int, 4>{0, 1, 2, 3}));
    EXPECT_EQ(CipherParams::from_bits(160, 128).shift_offsets(), (std::array<int, 4>{0, 1, 2, 3}));
    EXPECT_EQ(CipherParams::from_bits(192, 128).shift_offsets(), (std::array<int, 4>{0, 1, 2, 3}));
    EXPECT_EQ(CipherParams::from_bits(224, 128).shift_offsets(), (std::array<int, 4>{0, 1, 2, 4}));
    EXPECT_EQ(CipherParams::from_bits(256, 128).shift_offsets(), (std::array<int, 4>{0, 1, 3, 4}));
}

TEST(CipherParams, RejectsUnsupportedSizes) {
    EXPECT_THROW(CipherParams::from_bits(160, 160), InvalidParams);
    EXPECT_THROW(CipherParams::from_bits(128, 224), InvalidParams);
    EXPECT_THROW(CipherParams::from_bits(288, 128), InvalidParams);
    EXPECT_THROW(CipherParams::from_bits(130, 128), InvalidParams);
    EXPECT_THROW(CipherParams::from_bits(128, 128, 15), InvalidParams);
    EXPECT_EQ(CipherParams::from_bits(256, 128, 6).rounds(), 6);
}

TEST(SubBytes, TableMatchesDefinition) {
    for (int x = 0; x < 256; ++x) {
        auto const b = static_cast<std::uint8_t>(x);
        EXPECT_EQ(sbox()[b], sbox_from_definition(b)) << x;
        EXPECT_EQ(inv_sbox()[sbox()[b]], b);
    }
}

TEST(SubBytes, ConstantStateAndInverse) {
    State zero(6);
    auto const s = sub_bytes(zero);
    for (auto b : s.bytes()) EXPECT_EQ(b, 0x63);

    std::mt19937_64 rng(1);
    for (int t = 4; t <= 8; ++t) {
        auto const x = random_state(rng, t);
        EXPECT_EQ(inv_sub_bytes(sub_bytes(x)), x);
    }
}

TEST(ShiftRows, Rijndael256RowThreeRotatesByFour) {
    auto const p = CipherParams::from_bits(256, 128);
    State s(8);
    for (int c = 0; c < 8; ++c)
        for (int r = 0; r < 4; ++r) s.at(r, c) = static_cast<std::uint8_t>(16 * r + c);
    auto const out = shift_rows(s, p);
    for (int c = 0; c < 8; ++c) {
        EXPECT_EQ(out.at(0, c), s.at(0, c));
        EXPECT_EQ(out.at(3, c), s.at(3, (c + 4) % 8));
        EXPECT_EQ(out.at(2, c), s.at(2, (c + 3) % 8));
    }
}

TEST(ShiftRows, RowZeroFixedAndInverse) {
    std::mt19937_64 rng(2);
    for (int t = 4; t <= 8; ++t) {
        auto const p = CipherParams::from_bits(32 * t, 128);
        auto const x = random_state(rng, t);
        auto const y = shift_rows(x, p);
        for (int c = 0; c < t; ++c) EXPECT_EQ(y.at(0, c), x.at(0, c));
        EXPECT_EQ(inv_shift_rows(y, p), x);
    }
}

TEST(ShiftRows, CommutesWithSubBytes) {
    std::mt19937_64 rng(4);
    for (int t = 4; t <= 8; ++t) {
        auto const p = CipherParams::from_bits(32 * t, 128);
        auto const x = random_state(rng, t);
        EXPECT_EQ(sub_bytes(shift_rows(x, p)), shift_rows(sub_bytes(x), p));
    }
}

TEST(MixColumns, KnownColumn) {
    // Matrix-vector product computed with an independent GF(2^8) script.
    State s = State::from_bytes(std::vector<std::uint8_t>{0xdb, 0x13, 0x53, 0x45, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    auto const out = mix_columns(s);
    EXPECT_EQ(out.at(0, 0), 0x8e);
    EXPECT_EQ(out.at(1, 0), 0x4d);
    EXPECT_EQ(out.at(2, 0), 0xa1);
    EXPECT_EQ(out.at(3, 0), 0xbc);
    for (int c = 1; c < 4; ++c)
        for (int r = 0; r < 4; ++r) EXPECT_EQ(out.at(r, c), 0);
}

TEST(MixColumns, LinearAndInvertible) {
    std::mt19937_64 rng(5);
    for (int t = 4; t <= 8; ++t) {
        auto const a = random_state(rng, t);
        auto const b = random_state(rng, t);
        EXPECT_EQ(mix_columns(a ^ b), mix_columns(a) ^ mix_columns(b));
        EXPECT_EQ(inv_mix_columns(mix_columns(a)), a);
        EXPECT_EQ(mix_columns(inv_mix_columns(a)), a);
    }
}

TEST(KeySchedule, Aes128MatchesOpenSslWordForWord) {
    std::mt19937_64 rng(6);
    for (int bits : {128, 192, 256}) {
        auto const key = random_bytes(rng, bits / 8);
        AES_KEY ref;
        AES_set_encrypt_key(key.data(), bits, &ref);
        auto const p = CipherParams::from_bits(128, bits);
        auto const rk = key_schedule(key, p);
        ASSERT_EQ(rk.rounds(), ref.rounds);
        for (int r = 0; r <= p.rounds(); ++r) {
            // With AES-NI, OpenSSL keeps round keys in message byte order.
            auto const* bytes = reinterpret_cast<std::uint8_t const*>(ref.rd_key) + 16 * r;
            for (int k = 0; k < 16; ++k) EXPECT_EQ(rk[r][k], bytes[k]);
        }
    }
}

TEST(KeySchedule, ShapeAndZeroKey) {
    for (int t = 4; t <= 8; ++t) {
        for (int bits : {128, 192, 256}) {
            auto const p = CipherParams::from_bits(32 * t, bits);
            std::vector<std::uint8_t> key(static_cast<std::size_t>(bits / 8), 0);
            auto const rk = key_schedule(key, p);
            ASSERT_EQ(rk.keys.size(), static_cast<std::size_t>(p.rounds() + 1));
            for (auto const& k : rk.keys) EXPECT_EQ(k.cols(), t);
            if (bits / 32 >= t) EXPECT_TRUE(rk[0].is_zero());
        }
    }
    // First round key is the first t words of the expansion; with t > Nk it
    // already includes derived words.
    auto const p = CipherParams::from_bits(256, 128);
    std::mt19937_64 rng(8);
    auto const key = random_bytes(rng, 16);
    auto const rk = key_schedule(key, p);
    for (int i = 0; i < 16; ++i) EXPECT_EQ(rk[0][i], key[static_cast<std::size_t>(i)]);
}

TEST(KeySchedule, LengthMismatch) {
    auto const p = CipherParams::from_bits(128, 192);
    std::vector<std::uint8_t> key(16, 0);
    EXPECT_THROW(key_schedule(key, p), InvalidKey);
}

TEST(KeySchedule, Fips197Aes128Expansion) {
    auto const p = CipherParams::from_bits(128, 128);
    auto const rk = key_schedule(parse_hex("2b7e151628aed2a6abf7158809cf4f3c"), p);
    EXPECT_EQ(to_hex(rk[1]), "a0fafe1788542cb123a339392a6c7605");
    EXPECT_EQ(to_hex(rk[10]), "d014f9a8c9ee2589e13f0cc8b6630ca6");
}

TEST(Encrypt, Fips197Vectors) {
    auto const pt = state_from_hex("00112233445566778899aabbccddeeff", CipherParams::from_bits(128, 128));
    struct Vec {
        char const* key;
        char const* ct;
    } const vectors[] = {
        {"000102030405060708090a0b0c0d0e0f", "69c4e0d86a7b0430d8cdb78070b4c55a"},
        {"000102030405060708090a0b0c0d0e0f1011121314151617", "dda97ca4864cdfe06eaf70a0ec0d7191"},
        {"000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f", "8ea2b7ca516745bfeafc49904b496089"},
    };
    for (auto const& v : vectors) {
        auto const key = parse_hex(v.key);
        auto const p = CipherParams::from_bits(128, static_cast<int>(key.size() * 8));
        auto const rk = key_schedule(key, p);
        EXPECT_EQ(to_hex(encrypt(pt, rk)), v.ct);
        EXPECT_EQ(decrypt(state_from_hex(v.ct, p), rk), pt);
    }
}

// Computed once with a separate byte-wise implementation written from the
// cipher definition.
TEST(Encrypt, WideBlockKnownAnswers) {
    struct Vec {
        int block_bits;
        char const* key;
        char const* pt;
        char const* ct;
    } const vectors[] = {
        {160, "5ac3c05095f5b39fc7ae4426b852189f",
         "8df54e9f478e2159c1d887885d6cae4a7dcd0a21",
         "a3c03180948eb74f2868b0ec028acc014fc8f4ed"},
        {160, "1e1b528cc2871469d6f1dc8376bd42b1e835a97a1f753e33",
         "551bd6a1e495697ac97b698091e95506c0d77e92",
         "da65c5323ea300eae1dcb4af70db020072a29c72"},
        {160, "22bd33fa29791d4b22599d284da106fb42845bde747d87921df1cd874cf0e39c",
         "71de8edce330584ef815a29262d7d3089bf500bb",
         "d417d2c83fbae11cf6e0494ec9e606b00c29b8d8"},
        {192, "0bbf5492314b7cf325b2e6e84a82b576",
         "a8dbe38e4e341080e8dbfd35b29eb0a079b7cc8dda87c2d0",
         "25e5510f237d361df2190c57985defa304898c480e9b6f47"},
        {192, "21ea8daa4e998b3b920aee2c519c47bd1a79c10d390e8135",
         "6e0a59511a9552136002fbe873d4e21131d3c615d8edf319",
         "a7980c186ff9e288e271544dac022fc33072231cbece2373"},
        {192, "0ddf83b7efbd1c922a7730185b3d290da6af465437c40f7bece0b8fa4bb17a6d",
         "ed5057a8de7d69086f3b6b182e898b70140c38355440d377",
         "8ddbb1b619e3c209f568f2cdeec7402c7bebbb6c36972179"},
        {224, "a1fed938919f70328c47f7c32c745a99",
         "026a0339774b24677d87041ede3a3bbf8b26ec0b20f4f33cd622a163",
         "1705d92a650370a264519c498eed318605d219cdf05c2694610bb2aa"},
        {224, "84ba109bfd6b9c68cb47c758c77399fb59f8f04b06830b69",
         "fc8f679f8015f4bf8bb1d60156be0b5bd501473db3ad1db0ac5c0677",
         "41bc3f07e841a27936681f85a5bafeee918d3d54c428256d62723f6c"},
        {224, "ef4609cd7fd853bf92baf3a320e4fbe89409659ded2e73e4c3c7118d72299194",
         "2baf531a0f6c1c0e696caca80351980ad6919581bd0d25d9d014419e",
         "f4278ba3591c5fb7c150316852ae9f2761d780c5d3b0026dc5488224"},
        {256, "8355066e30e12feba53f056dc2ec4bd1",
         "afd7648936b9ad9a5d070866bb4edb029394c73d9aab3ecdbd89628213596bd9",
         "a722a364642b3f5c3105f837d62639d722870d9f48a79889887699154e0d6014"},
        {256, "db0f42a9ea5af0661c0c0b79793c118ff77c2bef222b0bd1",
         "240a3a707108a0bb0e14c832ac4a819645659a306c62c5cfa099388096f463f3",
         "b472dc4cdd95e756032723141a6bc565860417b0dd24adb9d29686a56425d17b"},
        {256, "39daaa69c05965cbbb9c717c9c310a816107013d0c8f3349386f77a7fd7d6afa",
         "0c2ca2703764353e576def584603021ac26a338b940fe66b0adaae827ee25818",
         "432eed8dd2e9296edb13de30656430d33fa18423b037ed06dede7ed8521bf8ac"},
    };
    for (auto const& v : vectors) {
        auto const key = parse_hex(v.key);
        auto const p = CipherParams::from_bits(v.block_bits, static_cast<int>(key.size() * 8));
        auto const rk = key_schedule(key, p);
        auto const pt = state_from_hex(v.pt, p);
        EXPECT_EQ(to_hex(encrypt(pt, rk)), v.ct) << v.block_bits << " " << v.key;
        EXPECT_EQ(decrypt(state_from_hex(v.ct, p), rk), pt);
    }
}

TEST(Encrypt, WideBlockReducedKnownAnswers) {
    struct Vec {
        int block_bits;
        char const* key;
        char const* pt;
        char const* ct6;       // 6 rounds, last without MixColumns
        char const* ct4_full;  // 4 full rounds
    } const vectors[] = {
        {160, "f3a7f2ad284255383dab0a0b33bd58ff",
         "9f7c8ec7e07ef3ccdf96a90f857dea3437c137a8",
         "b579be4b9df95a0f2059cfa1d5843e93ed53e849",
         "5b8947830a3328b723e74525b76d2a2bd1338c4b"},
        {224, "d0298b62e0169c7efdc8e7767dda1fd3",
         "bc1d21f1c3c84b834b99cc36a47100e4afaa716c9a91d449a8944035",
         "8931af95b721f7c6b550716439d50004a9268c0783dd520816683b83",
         "4a1dd0999cb047137d76fcdb64577b37f700bc3dd7c4bae3519ce207"},
        {256, "4b636e8faa982075084339bc90b6abe0",
         "037afab0473381afe336063322a4b8100cda25b7734ff89675b5a44f221be6a4",
         "8b2e16397ee3cd456f0426c63a42c51f73dd43a0ab5891126e1b8138c6291f15",
         "811d08e4c96bc557bd488cd35f417d398b9924d5dfa92fb41115eeff62d9678b"},
    };
    for (auto const& v : vectors) {
        auto const key = parse_hex(v.key);
        auto const p = CipherParams::from_bits(v.block_bits, 128);
        auto const rk = key_schedule(key, p);
        auto const pt = state_from_hex(v.pt, p);
        EXPECT_EQ(to_hex(encrypt_reduced(pt, rk, 6, true)), v.ct6) << v.block_bits;
        EXPECT_EQ(to_hex(encrypt_reduced(pt, rk, 4, false)), v.ct4_full) << v.block_bits;
    }
}

TEST(Encrypt, RandomAesAgainstOpenSsl) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 30; ++i) {
        int const bits = 128 + 64 * (i % 3);
        auto const key = random_bytes(rng, bits / 8);
        auto const pt = random_bytes(rng, 16);
        auto const p = CipherParams::from_bits(128, bits);
        auto const ct = encrypt(State::from_bytes(pt), key_schedule(key, p));
        auto const ref = openssl_aes_ecb(key, pt);
        EXPECT_EQ(to_hex(ct), to_hex(ref));
    }
}

TEST(Encrypt, OneRoundUnrolled) {
    std::mt19937_64 rng(10);
    for (int t = 4; t <= 8; ++t) {
        auto const p = CipherParams::from_bits(32 * t, 128);
        auto const rk = key_schedule(random_bytes(rng, 16), p);
        auto const pt = random_state(rng, t);
        auto const expected = add_round_key(mix_columns(shift_rows(sub_bytes(pt ^ rk[0]), p)), rk[1]);
        EXPECT_EQ(encrypt_reduced(pt, rk, 1, false), expected);
        auto const special = add_round_key(shift_rows(sub_bytes(pt ^ rk[0]), p), rk[1]);
        EXPECT_EQ(encrypt_reduced(pt, rk, 1, true), special);
    }
}

TEST(Encrypt, RoundTripAllSizes) {
    std::mt19937_64 rng(11);
    for (int t = 4; t <= 8; ++t) {
        for (int bits : {128, 192, 256}) {
            auto const p = CipherParams::from_bits(32 * t, bits);
            auto const rk = key_schedule(random_bytes(rng, bits / 8), p);
            for (int r = 1; r <= p.rounds(); ++r) {
                auto const pt = random_state(rng, t);
                for (bool special : {false, true})
                    EXPECT_EQ(decrypt_reduced(encrypt_reduced(pt, rk, r, special), rk, r, special), pt);
            }
        }
    }
}

TEST(Encrypt, RoundRangeChecked) {
    auto const p = CipherParams::from_bits(128, 128);
    auto const rk = key_schedule(std::vector<std::uint8_t>(16, 0), p);
    State s(4);
    EXPECT_THROW(encrypt_reduced(s, rk, 0, true), RoundOutOfRange);
    EXPECT_THROW(decrypt_reduced(s, rk, 0, true), RoundOutOfRange);
    EXPECT_THROW(encrypt_reduced(s, rk, 11, true), RoundOutOfRange);
    EXPECT_THROW(encrypt_reduced(State(5), rk, 1, true), InvalidParams);
}

TEST(TableCipher, MatchesReference) {
    std::mt19937_64 rng(12);
    for (int t = 4; t <= 8; ++t) {
        auto const p = CipherParams::from_bits(32 * t, 256);
        auto const rk = key_schedule(random_bytes(rng, 32), p);
        TableCipher const tc(p, rk);
        for (int r = 1; r <= p.rounds(); ++r) {
            auto const pt = random_state(rng, t);
            EXPECT_EQ(tc.encrypt(pt, r, true), encrypt_reduced(pt, rk, r, true));
            EXPECT_EQ(tc.encrypt(pt, r, false), encrypt_reduced(pt, rk, r, false));
        }
    }
}

TEST(Hex, ParseAndFormat) {
    EXPECT_EQ(to_hex(parse_hex("00A1ff")), "00a1ff");
    EXPECT_THROW(parse_hex("abc"), std::invalid_argument);
    EXPECT_THROW(parse_hex("zz"), std::invalid_argument);
    auto const p = CipherParams::from_bits(160, 128);
    EXPECT_THROW(state_from_hex("00112233445566778899aabbccddeeff", p), InvalidParams);
    auto const s = state_from_hex("000102030405060708090a0b0c0d0e0f10111213", p);
    EXPECT_EQ(s.at(1, 0), 0x01);
    EXPECT_EQ(s.at(0, 1), 0x04);
    EXPECT_EQ(s.at(3, 4), 0x13);
}

}  // namespace
}  // namespace rijndael
