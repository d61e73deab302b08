#include "rijndael/key_scan.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <mutex>
#include <new>
#include <stdexcept>
#include <thread>

#include "rijndael/gf256.hpp"

#if defined(__AVX512F__) && defined(__AVX512BW__) && defined(__AVX512VBMI__) && defined(__AVX512VPOPCNTDQ__) && \
    defined(__GFNI__)
#define RIJNDAEL_SCAN_AVX512 1
#include <immintrin.h>
#endif

namespace rijndael {

void ScanStats::merge(ScanStats const& other) {
    lookups += other.lookups;
    candidates += other.candidates;
    if (passed.size() < other.passed.size()) passed.resize(other.passed.size());
    for (std::size_t i = 0; i < other.passed.size(); ++i) passed[i] += other.passed[i];
}

namespace {

template <class T>
struct Aligned64 {
    using value_type = T;
    Aligned64() = default;
    template <class U>
    Aligned64(Aligned64<U> const&) {}
    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{64})); }
    void deallocate(T* p, std::size_t) { ::operator delete(p, std::align_val_t{64}); }
    friend bool operator==(Aligned64, Aligned64) { return true; }
};

using Buffer = std::vector<std::uint8_t, Aligned64<std::uint8_t>>;

std::size_t padded(std::size_t n) { return (n + 63) / 64 * 64 + 64; }

// Tuples grouped by c_3 with a counting sort.
struct Texts {
    Buffer c0, c1, c2, c3;
    std::array<std::uint32_t, 257> start{};
    std::size_t n = 0;

    explicit Texts(std::vector<CipherTuple> const& tuples) : n(tuples.size()) {
        std::size_t const len = padded(n);
        c0.assign(len, 0);
        c1.assign(len, 0);
        c2.assign(len, 0);
        c3.assign(len, 0);
        for (auto const& t : tuples) ++start[t[3] + 1u];
        for (int v = 0; v < 256; ++v) start[v + 1u] += start[static_cast<std::size_t>(v)];
        auto fill = start;
        for (auto const& t : tuples) {
            auto const i = fill[t[3]]++;
            c0[i] = t[0];
            c1[i] = t[1];
            c2[i] = t[2];
            c3[i] = t[3];
        }
    }
};

using Row = std::array<std::uint8_t, 256>;

std::array<Row, 256> const& inv_rows() {
    // inv_rows()[v][k] = S^{-1}[v ^ k]
    static const auto rows = [] {
        std::array<Row, 256> r{};
        auto const& si = inv_sbox();
        for (int v = 0; v < 256; ++v)
            for (int k = 0; k < 256; ++k)
                r[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)] = si[static_cast<std::size_t>(v ^ k)];
        return r;
    }();
    return rows;
}

}  // namespace

struct KeyScan::Impl {
    FusedTable fused;
    Row inv3{};  // S_3^{-1}
    std::vector<Texts> texts;

    std::vector<KeyGroup> portable(std::uint32_t begin, std::uint32_t end, ScanStats& stats) const;
#ifdef RIJNDAEL_SCAN_AVX512
    void fast(std::uint32_t k01, std::vector<KeyGroup>& out, ScanStats& stats) const;
#endif
};

KeyScan::KeyScan(FusedTable const& fused, std::vector<std::vector<CipherTuple>> const& structures)
    : impl_(new Impl{fused, {}, {}}) {
    if (structures.empty()) {
        delete impl_;
        throw std::invalid_argument("key scan needs at least one structure");
    }
    for (int x = 0; x < 256; ++x) impl_->inv3[fused.table[3][static_cast<std::size_t>(x)]] = static_cast<std::uint8_t>(x);
    for (auto const& s : structures) impl_->texts.emplace_back(s);
}

KeyScan::~KeyScan() { delete impl_; }

std::size_t KeyScan::structures() const { return impl_->texts.size(); }

bool KeyScan::accelerated() {
#ifdef RIJNDAEL_SCAN_AVX512
    return true;
#else
    return false;
#endif
}

std::vector<KeyGroup> KeyScan::Impl::portable(std::uint32_t begin, std::uint32_t end, ScanStats& stats) const {
    auto const& f = fused.table;
    auto const& rows = inv_rows();
    std::size_t const ns = texts.size();
    if (stats.passed.size() < ns) stats.passed.resize(ns);
    std::vector<std::vector<std::uint8_t>> x1(ns), x2(ns);
    std::vector<KeyGroup> out;

    for (std::uint32_t k01 = begin; k01 < end; ++k01) {
        auto const k0 = static_cast<std::uint8_t>(k01), k1 = static_cast<std::uint8_t>(k01 >> 8);
        for (std::size_t s = 0; s < ns; ++s) {
            auto const& t = texts[s];
            x1[s].resize(t.n);
            for (std::size_t i = 0; i < t.n; ++i) x1[s][i] = f[0][t.c0[i] ^ k0] ^ f[1][t.c1[i] ^ k1];
            stats.lookups += 2 * t.n;
        }
        for (int k2 = 0; k2 < 256; ++k2) {
            for (std::size_t s = 0; s < ns; ++s) {
                auto const& t = texts[s];
                x2[s].resize(t.n);
                for (std::size_t i = 0; i < t.n; ++i) x2[s][i] = x1[s][i] ^ f[2][t.c2[i] ^ k2];
                stats.lookups += t.n;
            }
            for (int k3 = 0; k3 < 256; ++k3) {
                std::array<std::uint64_t, 4> alive{~0ull, ~0ull, ~0ull, ~0ull};
                stats.candidates += 256;
                for (std::size_t s = 0; s < ns; ++s) {
                    auto const& t = texts[s];
                    std::array<std::uint64_t, 4> v{};
                    for (std::size_t i = 0; i < t.n; ++i) {
                        unsigned const x3 = x2[s][i] ^ f[3][t.c3[i] ^ k3];
                        v[x3 >> 6] ^= std::uint64_t{1} << (x3 & 63);
                    }
                    stats.lookups += t.n;
                    std::array<std::uint64_t, 32> acc{};
                    for (int w = 0; w < 4; ++w)
                        for (auto bits = v[static_cast<std::size_t>(w)]; bits != 0; bits &= bits - 1) {
                            int const x = 64 * w + std::countr_zero(bits);
                            auto const* r = reinterpret_cast<std::uint64_t const*>(rows[static_cast<std::size_t>(x)].data());
                            for (int q = 0; q < 32; ++q) acc[static_cast<std::size_t>(q)] ^= r[q];
                            stats.lookups += 256;
                        }
                    auto const* bytes = reinterpret_cast<std::uint8_t const*>(acc.data());
                    std::uint64_t count = 0;
                    for (int k4 = 0; k4 < 256; ++k4)
                        if (bytes[k4] != 0) alive[static_cast<std::size_t>(k4 >> 6)] &= ~(std::uint64_t{1} << (k4 & 63));
                    for (auto a : alive) count += static_cast<std::uint64_t>(std::popcount(a));
                    stats.passed[s] += count;
                    if (count == 0) break;
                }
                for (int w = 0; w < 4; ++w)
                    for (auto bits = alive[static_cast<std::size_t>(w)]; bits != 0; bits &= bits - 1)
                        out.push_back({{k0, k1, static_cast<std::uint8_t>(k2), static_cast<std::uint8_t>(k3)},
                                       static_cast<std::uint8_t>(64 * w + std::countr_zero(bits))});
            }
        }
    }
    return out;
}

#ifdef RIJNDAEL_SCAN_AVX512

namespace {

// gf2p8affine matrix for a GF(2)-linear byte map.
std::uint64_t affine_matrix(auto linear) {
    std::uint64_t m = 0;
    for (int i = 0; i < 8; ++i) {
        unsigned row = 0;
        for (int j = 0; j < 8; ++j)
            if ((linear(static_cast<std::uint8_t>(1u << j)) >> i) & 1u) row |= 1u << j;
        m |= static_cast<std::uint64_t>(row) << (8 * (7 - i));
    }
    return m;
}

struct Consts {
    std::uint64_t ainv = 0;      // linear part of the inverse affine map; constant is 0x05
    std::uint64_t identity = 0;
    std::array<std::uint64_t, 8> bit_xor{};  // bit i -> bit i ^ y
    alignas(64) std::array<std::array<std::uint8_t, 64>, 32> lane_xor{};
    // t0[p]: planes b of sum_{j in p} S^{-1}[j ^ k] as bit vectors over k.
    alignas(64) std::array<std::array<std::uint8_t, 256>, 256> t0{};
    // planes[k]: planes b of S^{-1}[v ^ k] as bit vectors over v.
    alignas(64) std::array<std::array<std::uint8_t, 256>, 256> planes{};

    Consts() {
        auto const& si = inv_sbox();
        auto pre = [&](std::uint8_t y) { return gf_inv(si[y]); };
        if (pre(0) != 0x05) throw std::logic_error("unexpected S-box affine constant");
        ainv = affine_matrix([&](std::uint8_t y) { return static_cast<std::uint8_t>(pre(y) ^ pre(0)); });
        identity = affine_matrix([](std::uint8_t y) { return y; });
        for (int y = 0; y < 8; ++y) {
            std::uint64_t m = 0;
            for (int i = 0; i < 8; ++i) m |= std::uint64_t{1} << (8 * (7 - i) + (i ^ y));
            bit_xor[static_cast<std::size_t>(y)] = m;
        }
        for (int i = 0; i < 32; ++i)
            for (int l = 0; l < 64; ++l)
                lane_xor[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] = static_cast<std::uint8_t>(l ^ i);
        for (int p = 0; p < 256; ++p)
            for (int k = 0; k < 256; ++k) {
                unsigned v = 0;
                for (int j = 0; j < 8; ++j)
                    if ((p >> j) & 1) v ^= si[static_cast<std::size_t>(j ^ k)];
                for (int b = 0; b < 8; ++b)
                    if ((v >> b) & 1) t0[static_cast<std::size_t>(p)][static_cast<std::size_t>(32 * b + (k >> 3))] |= static_cast<std::uint8_t>(1u << (k & 7));
            }
        for (int k = 0; k < 256; ++k)
            for (int v = 0; v < 256; ++v) {
                unsigned const s = si[static_cast<std::size_t>(v ^ k)];
                for (int b = 0; b < 8; ++b)
                    if ((s >> b) & 1) planes[static_cast<std::size_t>(k)][static_cast<std::size_t>(32 * b + (v >> 3))] |= static_cast<std::uint8_t>(1u << (v & 7));
            }
    }
};

Consts const& consts() {
    static const Consts c;
    return c;
}

inline __m512i xor3(__m512i a, __m512i b, __m512i c) { return _mm512_ternarylogic_epi64(a, b, c, 0x96); }

// m * S^{-1}[c ^ k] on 64 bytes.
inline __m512i fused_lookup(__m512i c, __m512i key, __m512i ainv, __m512i mul) {
    __m512i const t = _mm512_gf2p8affine_epi64_epi8(_mm512_xor_si512(c, key), ainv, 0x05);
    return _mm512_gf2p8affineinv_epi64_epi8(t, mul, 0);
}

inline std::uint8_t xor_bytes(__m512i v) {
    __m256i const a = _mm256_xor_si256(_mm512_castsi512_si256(v), _mm512_extracti64x4_epi64(v, 1));
    __m128i const b = _mm_xor_si128(_mm256_castsi256_si128(a), _mm256_extracti128_si256(a, 1));
    std::uint64_t w = static_cast<std::uint64_t>(_mm_cvtsi128_si64(b)) ^ static_cast<std::uint64_t>(_mm_extract_epi64(b, 1));
    w ^= w >> 32;
    w ^= w >> 16;
    w ^= w >> 8;
    return static_cast<std::uint8_t>(w);
}

// dst[i] = src[i] ^ m * S^{-1}[c[i] ^ k] over n bytes (rounded up to 64).
void fused_layer(std::uint8_t* dst, std::uint8_t const* src, std::uint8_t const* c, std::size_t n, std::uint8_t k,
                 __m512i ainv, __m512i mul) {
    __m512i const key = _mm512_set1_epi8(static_cast<char>(k));
    for (std::size_t i = 0; i < n; i += 64) {
        __m512i const y = fused_lookup(_mm512_load_si512(c + i), key, ainv, mul);
        __m512i const x = src != nullptr ? _mm512_load_si512(src + i) : _mm512_setzero_si512();
        _mm512_store_si512(dst + i, _mm512_xor_si512(x, y));
    }
}

// Parity sets of x per c_3 group into 256-bit slots, 64 bytes apart.
void build_sets(std::uint8_t* w, Texts const& t, std::uint8_t const* x) {
    __m512i const one = _mm512_set1_epi32(1);
    __m512i const low5 = _mm512_set1_epi32(31);
    for (int c3 = 0; c3 < 256; ++c3) {
        std::uint32_t const b = t.start[static_cast<std::size_t>(c3)];
        std::uint32_t const e = t.start[static_cast<std::size_t>(c3) + 1];
        __m512i a0 = _mm512_setzero_si512(), a1 = a0, a2 = a0, a3 = a0, a4 = a0, a5 = a0, a6 = a0, a7 = a0;
        for (std::uint32_t i = b; i < e; i += 16) {
            auto const m = static_cast<__mmask16>(e - i >= 16 ? 0xffffu : (1u << (e - i)) - 1u);
            __m512i const v = _mm512_cvtepu8_epi32(_mm_loadu_si128(reinterpret_cast<__m128i const*>(x + i)));
            __m512i const bit = _mm512_sllv_epi32(one, _mm512_and_si512(v, low5));
            __m512i const chunk = _mm512_srli_epi32(v, 5);
#define RIJNDAEL_ACC(j) a##j = _mm512_mask_xor_epi32(a##j, _mm512_mask_cmpeq_epi32_mask(m, chunk, _mm512_set1_epi32(j)), a##j, bit)
            RIJNDAEL_ACC(0);
            RIJNDAEL_ACC(1);
            RIJNDAEL_ACC(2);
            RIJNDAEL_ACC(3);
            RIJNDAEL_ACC(4);
            RIJNDAEL_ACC(5);
            RIJNDAEL_ACC(6);
            RIJNDAEL_ACC(7);
#undef RIJNDAEL_ACC
        }
        __m512i const acc[8] = {a0, a1, a2, a3, a4, a5, a6, a7};
        __m128i r[8];
        for (int j = 0; j < 8; ++j) {
            __m256i const h = _mm256_xor_si256(_mm512_castsi512_si256(acc[j]), _mm512_extracti64x4_epi64(acc[j], 1));
            r[j] = _mm_xor_si128(_mm256_castsi256_si128(h), _mm256_extracti128_si256(h, 1));
        }
        for (int q = 0; q < 2; ++q) {
            __m128i const* g = r + 4 * q;
            __m128i const u0 = _mm_xor_si128(_mm_unpacklo_epi32(g[0], g[1]), _mm_unpackhi_epi32(g[0], g[1]));
            __m128i const u1 = _mm_xor_si128(_mm_unpacklo_epi32(g[2], g[3]), _mm_unpackhi_epi32(g[2], g[3]));
            __m128i const s = _mm_xor_si128(_mm_unpacklo_epi64(u0, u1), _mm_unpackhi_epi64(u0, u1));
            _mm_storeu_si128(reinterpret_cast<__m128i*>(w + 64 * c3 + 16 * q), s);
        }
    }
}

}  // namespace

void KeyScan::Impl::fast(std::uint32_t k01, std::vector<KeyGroup>& out, ScanStats& stats) const {
    auto const& cs = consts();
    std::size_t const ns = texts.size();
    std::size_t const piped = std::min<std::size_t>(ns, 2);
    if (stats.passed.size() < ns) stats.passed.resize(ns);

    __m512i const ainv = _mm512_set1_epi64(static_cast<long long>(cs.ainv));
    __m512i const ident = _mm512_set1_epi64(static_cast<long long>(cs.identity));
    __m512i mul[4];
    for (int j = 0; j < 4; ++j) {
        std::uint8_t const c = fused.coef[static_cast<std::size_t>(j)];
        mul[j] = _mm512_set1_epi64(
            static_cast<long long>(affine_matrix([c](std::uint8_t y) { return gf_mul(c, y); })));
    }
    __m512i bit_xor[8];
    for (int y = 0; y < 8; ++y) bit_xor[y] = _mm512_set1_epi64(static_cast<long long>(cs.bit_xor[static_cast<std::size_t>(y)]));
    std::array<std::uint32_t, 256> off{};
    for (int y = 0; y < 256; ++y) off[static_cast<std::size_t>(y)] = static_cast<std::uint32_t>(inv3[static_cast<std::size_t>(y)]) << 6;

    thread_local std::vector<Buffer> x1, x2;
    thread_local Buffer w;
    x1.resize(ns);
    x2.resize(ns);
    w.assign(256 * 64, 0);

    auto const k0 = static_cast<std::uint8_t>(k01), k1 = static_cast<std::uint8_t>(k01 >> 8);
    for (std::size_t s = 0; s < ns; ++s) {
        auto const& t = texts[s];
        std::size_t const len = padded(t.n);
        x1[s].resize(len);
        x2[s].resize(len);
        fused_layer(x1[s].data(), nullptr, t.c0.data(), t.n, k0, ainv, mul[0]);
        fused_layer(x1[s].data(), x1[s].data(), t.c1.data(), t.n, k1, ainv, mul[1]);
        stats.lookups += 2 * t.n;
    }

    alignas(64) std::uint8_t vbytes[64];
    alignas(64) std::uint64_t nz[8];
    for (int k2 = 0; k2 < 256; ++k2) {
        for (std::size_t s = 0; s < piped; ++s) {
            auto const& t = texts[s];
            fused_layer(x2[s].data(), x1[s].data(), t.c2.data(), t.n, static_cast<std::uint8_t>(k2), ainv, mul[2]);
            build_sets(w.data() + 32 * s, t, x2[s].data());
            stats.lookups += t.n;
        }
        std::uint64_t tail_ready = 0;
        stats.candidates += 256 * 256;
        stats.lookups += 256 * (256 + 32);

        for (int k3 = 0; k3 < 256; ++k3) {
            // x_3 parity sets of both piped structures.
            std::uint32_t const koff = static_cast<std::uint32_t>(k3) << 6;
            __m512i v = _mm512_setzero_si512();
            for (int yh = 0; yh < 32; ++yh) {
                std::uint32_t const* o = off.data() + 8 * yh;
                auto ld = [&](int l) { return _mm512_load_si512(w.data() + (o[l] ^ koff)); };
                __m512i const a0 = ld(0);
                __m512i const a1 = _mm512_gf2p8affine_epi64_epi8(ld(1), bit_xor[1], 0);
                __m512i const a2 = _mm512_gf2p8affine_epi64_epi8(ld(2), bit_xor[2], 0);
                __m512i const a3 = _mm512_gf2p8affine_epi64_epi8(ld(3), bit_xor[3], 0);
                __m512i const a4 = _mm512_gf2p8affine_epi64_epi8(ld(4), bit_xor[4], 0);
                __m512i const a5 = _mm512_gf2p8affine_epi64_epi8(ld(5), bit_xor[5], 0);
                __m512i const a6 = _mm512_gf2p8affine_epi64_epi8(ld(6), bit_xor[6], 0);
                __m512i const a7 = _mm512_gf2p8affine_epi64_epi8(ld(7), bit_xor[7], 0);
                __m512i const s = xor3(xor3(a0, a1, a2), xor3(a3, a4, a5), _mm512_xor_si512(a6, a7));
                __m512i const idx = _mm512_load_si512(cs.lane_xor[static_cast<std::size_t>(yh)].data());
                v = _mm512_xor_si512(v, _mm512_permutexvar_epi8(idx, s));
            }

            // Filter bytes of structure 0 for all k_4.
            _mm512_store_si512(vbytes, v);
            __m512i f[4];
            for (auto& x : f) x = _mm512_setzero_si512();
            for (int i = 0; i < 32; i += 2) {
                __m512i const ia = _mm512_load_si512(cs.lane_xor[static_cast<std::size_t>(i)].data());
                __m512i const ib = _mm512_load_si512(cs.lane_xor[static_cast<std::size_t>(i) + 1].data());
                std::uint8_t const* ra = cs.t0[vbytes[i]].data();
                std::uint8_t const* rb = cs.t0[vbytes[i + 1]].data();
                for (int q = 0; q < 4; ++q)
                    f[q] = xor3(f[q], _mm512_permutexvar_epi8(ia, _mm512_load_si512(ra + 64 * q)),
                                _mm512_permutexvar_epi8(ib, _mm512_load_si512(rb + 64 * q)));
            }
            __m512i const any = _mm512_or_si512(_mm512_ternarylogic_epi64(f[0], f[1], f[2], 0xfe), f[3]);
            _mm512_store_si512(nz, any);
            std::uint64_t zero[4];
            std::uint64_t count = 0;
            for (int q = 0; q < 4; ++q) {
                zero[q] = ~(nz[q] | nz[q + 4]);
                count += static_cast<std::uint64_t>(std::popcount(zero[q]));
            }
            stats.passed[0] += count;
            if (count == 0) continue;

            __m512i const v2 = _mm512_shuffle_i64x2(v, v, 0xee);
            for (int q = 0; q < 4; ++q)
                for (auto bits = zero[q]; bits != 0; bits &= bits - 1) {
                    int const k4 = 64 * q + std::countr_zero(bits);
                    if (piped == 2) {
                        std::uint8_t const* pl = cs.planes[static_cast<std::size_t>(k4)].data();
                        __m512i odd = _mm512_setzero_si512();
                        for (int h = 0; h < 4; ++h) {
                            __m512i a = _mm512_and_si512(v2, _mm512_load_si512(pl + 64 * h));
                            a = _mm512_xor_si512(a, _mm512_shuffle_i64x2(a, a, 0xb1));
                            a = _mm512_xor_si512(a, _mm512_shuffle_epi32(a, static_cast<_MM_PERM_ENUM>(0x4e)));
                            odd = _mm512_or_si512(odd, _mm512_popcnt_epi64(a));
                        }
                        stats.lookups += 4;
                        if (_mm512_test_epi64_mask(odd, _mm512_set1_epi64(1)) != 0) continue;
                        ++stats.passed[1];
                    }
                    bool pass = true;
                    for (std::size_t s = 2; s < ns && pass; ++s) {
                        auto const& t = texts[s];
                        if (!((tail_ready >> s) & 1)) {
                            fused_layer(x2[s].data(), x1[s].data(), t.c2.data(), t.n, static_cast<std::uint8_t>(k2),
                                        ainv, mul[2]);
                            stats.lookups += t.n;
                            tail_ready |= std::uint64_t{1} << s;
                        }
                        __m512i const key3 = _mm512_set1_epi8(static_cast<char>(k3));
                        __m512i const key4 = _mm512_set1_epi8(static_cast<char>(k4));
                        __m512i acc = _mm512_setzero_si512();
                        for (std::size_t i = 0; i < t.n; i += 64) {
                            __mmask64 const m = t.n - i >= 64 ? ~__mmask64{0} : (__mmask64{1} << (t.n - i)) - 1;
                            __m512i const x3 = _mm512_xor_si512(
                                _mm512_load_si512(x2[s].data() + i),
                                fused_lookup(_mm512_load_si512(t.c3.data() + i), key3, ainv, mul[3]));
                            __m512i const z = fused_lookup(x3, key4, ainv, ident);
                            acc = _mm512_xor_si512(acc, _mm512_maskz_mov_epi8(m, z));
                        }
                        stats.lookups += 2 * t.n;
                        pass = xor_bytes(acc) == 0;
                        if (pass) ++stats.passed[s];
                    }
                    if (pass)
                        out.push_back({{k0, k1, static_cast<std::uint8_t>(k2), static_cast<std::uint8_t>(k3)},
                                       static_cast<std::uint8_t>(k4)});
                }
        }
    }
}

#endif

std::vector<KeyGroup> KeyScan::scan_portable(std::uint32_t begin, std::uint32_t end, ScanStats& stats) const {
    return impl_->portable(begin, end, stats);
}

std::vector<KeyGroup> KeyScan::scan(std::uint32_t begin, std::uint32_t end, ScanStats& stats, int threads,
                                    std::function<void(std::size_t, std::size_t)> const& progress) const {
    if (begin > end || end > 65536) throw std::out_of_range("k0/k1 range must lie in [0, 65536)");
    std::size_t const total = end - begin;
    std::atomic<std::uint32_t> next{begin};
    std::mutex mu;
    std::size_t done = 0;
    std::vector<KeyGroup> out;
    if (stats.passed.size() < impl_->texts.size()) stats.passed.resize(impl_->texts.size());

    auto worker = [&] {
        std::vector<KeyGroup> local;
        ScanStats ls;
        for (std::uint32_t k01; (k01 = next.fetch_add(1)) < end;) {
            std::vector<KeyGroup> found;
            ScanStats one;
#ifdef RIJNDAEL_SCAN_AVX512
            impl_->fast(k01, found, one);
#else
            found = impl_->portable(k01, k01 + 1, one);
#endif
            local.insert(local.end(), found.begin(), found.end());
            ls.merge(one);
            if (progress) {
                std::lock_guard lock(mu);
                progress(++done, total);
            }
        }
        std::lock_guard lock(mu);
        out.insert(out.end(), local.begin(), local.end());
        stats.merge(ls);
    };
    int const n = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(total, 1))));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    std::sort(out.begin(), out.end());
    return out;
}

std::array<std::uint8_t, 256> filter_all_k4(TargetMap const& map, std::span<const CipherTuple> tuples,
                                            std::array<std::uint8_t, 4> const& last) {
    std::array<std::uint64_t, 4> v{};
    auto const& f = map.fused.table;
    for (auto const& t : tuples) {
        unsigned x = 0;
        for (std::size_t j = 0; j < 4; ++j) x ^= f[j][t[j] ^ last[j]];
        v[x >> 6] ^= std::uint64_t{1} << (x & 63);
    }
    std::array<std::uint8_t, 256> out{};
    auto const& rows = inv_rows();
    for (int w = 0; w < 4; ++w)
        for (auto bits = v[static_cast<std::size_t>(w)]; bits != 0; bits &= bits - 1) {
            auto const& r = rows[static_cast<std::size_t>(64 * w + std::countr_zero(bits))];
            for (int k = 0; k < 256; ++k) out[static_cast<std::size_t>(k)] ^= r[static_cast<std::size_t>(k)];
        }
    return out;
}

}  // namespace rijndael
