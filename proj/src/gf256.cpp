#include "rijndael/gf256.hpp"

namespace rijndael {

namespace {

struct MulTable {
    std::array<std::array<std::uint8_t, 256>, 256> rows{};
    MulTable() {
        for (int a = 0; a < 256; ++a)
            for (int b = 0; b < 256; ++b)
                rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                    gf_mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b));
    }
};

}  // namespace

std::array<std::uint8_t, 256> const& mul_row(std::uint8_t c) {
    static const MulTable table;
    return table.rows[c];
}

}  // namespace rijndael
