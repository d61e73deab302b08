#pragma once

#include <array>
#include <cstdint>

namespace rijndael {

// Element of GF(2^8) modulo x^8 + x^4 + x^3 + x + 1.
class GfByte {
public:
    constexpr GfByte() = default;
    constexpr explicit GfByte(std::uint8_t v) : value_(v) {}

    constexpr std::uint8_t value() const { return value_; }

    friend constexpr GfByte operator+(GfByte a, GfByte b) { return GfByte(a.value_ ^ b.value_); }
    friend constexpr bool operator==(GfByte, GfByte) = default;

private:
    std::uint8_t value_ = 0;
};

constexpr std::uint8_t xtime(std::uint8_t a) {
    return static_cast<std::uint8_t>((a << 1) ^ ((a & 0x80) ? 0x1b : 0x00));
}

// Shift-and-add multiply. Slow but table-free; the table variant below is
// built from it.
constexpr std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) {
    std::uint8_t acc = 0;
    while (b != 0) {
        if (b & 1) acc ^= a;
        a = xtime(a);
        b >>= 1;
    }
    return acc;
}

constexpr GfByte gf_mul(GfByte a, GfByte b) { return GfByte(gf_mul(a.value(), b.value())); }
inline GfByte operator*(GfByte a, GfByte b) { return gf_mul(a, b); }

// a^254; maps 0 to 0.
constexpr std::uint8_t gf_inv(std::uint8_t a) {
    std::uint8_t result = 1;
    std::uint8_t base = a;
    for (unsigned e = 254; e != 0; e >>= 1) {
        if (e & 1) result = gf_mul(result, base);
        base = gf_mul(base, base);
    }
    return a == 0 ? 0 : result;
}

// Row of the full multiplication table: mul_row(c)[x] = c * x.
std::array<std::uint8_t, 256> const& mul_row(std::uint8_t c);

}  // namespace rijndael
