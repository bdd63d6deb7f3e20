// AVX2 Philox4x32-10 kernel: eight counter blocks per pass, bit-identical
// to the scalar reference. Compiled with -mavx2; callers must gate on
// avx2_supported().

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "kaonsim/rng.hpp"
#include "philox_common.hpp"

namespace kaonsim::rng {

namespace {

using namespace detail;

// 32x32 -> 64 unsigned multiply across all eight lanes of c by the
// broadcast constant m; returns the high and low 32-bit halves per lane.
inline void mul_hi_lo_8(__m256i c, __m256i m, __m256i& hi, __m256i& lo) {
    const __m256i prod_even = _mm256_mul_epu32(c, m);
    const __m256i prod_odd = _mm256_mul_epu32(_mm256_srli_epi64(c, 32), m);
    lo = _mm256_blend_epi32(prod_even, _mm256_slli_epi64(prod_odd, 32), 0xAA);
    hi = _mm256_blend_epi32(_mm256_srli_epi64(prod_even, 32), prod_odd, 0xAA);
}

inline void one_round_8(__m256i& c0, __m256i& c1, __m256i& c2, __m256i& c3,
                        __m256i k0, __m256i k1, __m256i m0, __m256i m1) {
    __m256i hi0, lo0, hi1, lo1;
    mul_hi_lo_8(c0, m0, hi0, lo0);
    mul_hi_lo_8(c2, m1, hi1, lo1);
    const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0);
    const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1);
    c0 = n0;
    c1 = lo1;
    c2 = n2;
    c3 = lo0;
}

}  // namespace

void event_uniforms_avx2(std::uint64_t seed, std::uint64_t first_event,
                         std::size_t n, double* u_outcome, double* u_meas) {
    const std::uint32_t seed_lo = static_cast<std::uint32_t>(seed);
    const std::uint32_t seed_hi = static_cast<std::uint32_t>(seed >> 32);
    const __m256i m0 = _mm256_set1_epi32(static_cast<int>(kPhiloxM0));
    const __m256i m1 = _mm256_set1_epi32(static_cast<int>(kPhiloxM1));
    const __m256i w0 = _mm256_set1_epi32(static_cast<int>(kPhiloxW0));
    const __m256i w1 = _mm256_set1_epi32(static_cast<int>(kPhiloxW1));

    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        alignas(32) std::uint32_t ev_lo[8];
        alignas(32) std::uint32_t ev_hi[8];
        for (int j = 0; j < 8; ++j) {
            const std::uint64_t ev = first_event + i + static_cast<std::uint64_t>(j);
            ev_lo[j] = static_cast<std::uint32_t>(ev);
            ev_hi[j] = static_cast<std::uint32_t>(ev >> 32);
        }
        __m256i c0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(ev_lo));
        __m256i c1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(ev_hi));
        __m256i c2 = _mm256_set1_epi32(static_cast<int>(kEventStreamTag));
        __m256i c3 = _mm256_setzero_si256();
        __m256i k0 = _mm256_set1_epi32(static_cast<int>(seed_lo));
        __m256i k1 = _mm256_set1_epi32(static_cast<int>(seed_hi));

        for (int r = 0; r < kPhiloxRounds; ++r) {
            one_round_8(c0, c1, c2, c3, k0, k1, m0, m1);
            k0 = _mm256_add_epi32(k0, w0);
            k1 = _mm256_add_epi32(k1, w1);
        }

        alignas(32) std::uint32_t x0[8], x1[8], x2[8], x3[8];
        _mm256_store_si256(reinterpret_cast<__m256i*>(x0), c0);
        _mm256_store_si256(reinterpret_cast<__m256i*>(x1), c1);
        _mm256_store_si256(reinterpret_cast<__m256i*>(x2), c2);
        _mm256_store_si256(reinterpret_cast<__m256i*>(x3), c3);
        for (int j = 0; j < 8; ++j) {
            u_outcome[i + j] = to_unit_double(x0[j], x1[j]);
            u_meas[i + j] = to_unit_double(x2[j], x3[j]);
        }
    }
    if (i < n) {
        event_uniforms_scalar(seed, first_event + i, n - i, u_outcome + i, u_meas + i);
    }
}

}  // namespace kaonsim::rng

#endif  // x86_64
