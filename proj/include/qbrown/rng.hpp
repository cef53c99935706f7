#pragma once

// Counter-based random streams: any (key, counter) pair maps to an
// independent block of bits, so ensemble evolution parallelizes over
// particles with bit-identical results for a fixed seed regardless of the
// thread partitioning. Philox-4x32 with 10 rounds.

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace qbrown::rng {

namespace detail {
inline constexpr uint32_t kM0 = 0xD2511F53u;
inline constexpr uint32_t kM1 = 0xCD9E8D57u;
inline constexpr uint32_t kW0 = 0x9E3779B9u;
inline constexpr uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    const uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
}
} // namespace detail

inline std::array<uint32_t, 4> philox_block(uint64_t key, uint64_t ctr_hi, uint64_t ctr_lo) {
    uint32_t x0 = static_cast<uint32_t>(ctr_lo);
    uint32_t x1 = static_cast<uint32_t>(ctr_lo >> 32);
    uint32_t x2 = static_cast<uint32_t>(ctr_hi);
    uint32_t x3 = static_cast<uint32_t>(ctr_hi >> 32);
    uint32_t k0 = static_cast<uint32_t>(key);
    uint32_t k1 = static_cast<uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        uint32_t hi0, lo0, hi1, lo1;
        detail::mulhilo(detail::kM0, x0, hi0, lo0);
        detail::mulhilo(detail::kM1, x2, hi1, lo1);
        const uint32_t y0 = hi1 ^ x1 ^ k0;
        const uint32_t y1 = lo1;
        const uint32_t y2 = hi0 ^ x3 ^ k1;
        const uint32_t y3 = lo0;
        x0 = y0;
        x1 = y1;
        x2 = y2;
        x3 = y3;
        k0 += detail::kW0;
        k1 += detail::kW1;
    }
    return {x0, x1, x2, x3};
}

// label -> subkey, so independent suites draw from disjoint streams
inline uint64_t derive_stream(uint64_t seed, std::string_view label) {
    uint64_t h = 0xcbf29ce484222325ull ^ seed;
    for (char ch : label) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ull;
    }
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return h;
}

inline double to_unit_open(uint32_t hi, uint32_t lo) {
    const uint64_t bits = (static_cast<uint64_t>(hi) << 32) | lo;
    double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
}

struct NormalPair {
    double a, b;
};

// two standard normals from one counter block (Box-Muller)
inline NormalPair normal_pair(uint64_t key, uint64_t ctr_hi, uint64_t ctr_lo) {
    const auto blk = philox_block(key, ctr_hi, ctr_lo);
    const double u1 = to_unit_open(blk[0], blk[1]);
    const double u2 = to_unit_open(blk[2], blk[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phase = 2.0 * M_PI * u2;
    return {r * std::cos(phase), r * std::sin(phase)};
}

} // namespace qbrown::rng
