#include "kaonsim/rng.hpp"

#include "philox_common.hpp"

namespace kaonsim::rng {

namespace {

using namespace detail;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(prod);
    hi = static_cast<std::uint32_t>(prod >> 32);
}

inline void one_round(std::uint32_t c[4], std::uint32_t k0, std::uint32_t k1) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mul_hi_lo(kPhiloxM0, c[0], hi0, lo0);
    mul_hi_lo(kPhiloxM1, c[2], hi1, lo1);
    const std::uint32_t n0 = hi1 ^ c[1] ^ k0;
    const std::uint32_t n1 = lo1;
    const std::uint32_t n2 = hi0 ^ c[3] ^ k1;
    const std::uint32_t n3 = lo0;
    c[0] = n0;
    c[1] = n1;
    c[2] = n2;
    c[3] = n3;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
    std::uint32_t c[4] = {counter[0], counter[1], counter[2], counter[3]};
    std::uint32_t k0 = key[0];
    std::uint32_t k1 = key[1];
    for (int r = 0; r < detail::kPhiloxRounds; ++r) {
        one_round(c, k0, k1);
        k0 += detail::kPhiloxW0;
        k1 += detail::kPhiloxW1;
    }
    return {c[0], c[1], c[2], c[3]};
}

double to_unit_double(std::uint32_t lo, std::uint32_t hi) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

void event_uniforms_scalar(std::uint64_t seed, std::uint64_t first_event,
                           std::size_t n, double* u_outcome, double* u_meas) {
    const std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    const std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t ev = first_event + i;
        const auto block = philox4x32({static_cast<std::uint32_t>(ev),
                                       static_cast<std::uint32_t>(ev >> 32),
                                       detail::kEventStreamTag, 0u},
                                      {k0, k1});
        u_outcome[i] = to_unit_double(block[0], block[1]);
        u_meas[i] = to_unit_double(block[2], block[3]);
    }
}

}  // namespace kaonsim::rng
