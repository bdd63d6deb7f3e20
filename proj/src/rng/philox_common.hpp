// Philox4x32-10 constants and the per-event counter/key layout shared by
// the scalar and SIMD kernels. Changing anything here changes every
// generated event stream.

#pragma once

#include <cstdint>

namespace kaonsim::rng::detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;
inline constexpr int kPhiloxRounds = 10;

// Fixed third counter word; the fourth is reserved (always 0).
inline constexpr std::uint32_t kEventStreamTag = 0x6B616F6Eu;

}  // namespace kaonsim::rng::detail
