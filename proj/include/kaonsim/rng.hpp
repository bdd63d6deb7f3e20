// rng.hpp
// Counter-based random number generation for the event engine. Every
// event draws its uniforms from one Philox4x32-10 block keyed by the
// master seed and countered by the event index, so an event is a pure
// function of (seed, index) regardless of batching, worker count or the
// kernel used to produce it.
//
// Two kernels produce identical bits: a scalar reference and an AVX2
// variant that runs eight counter blocks per pass. The active kernel is
// chosen at runtime from CPU capabilities.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace kaonsim::rng {

// One Philox4x32-10 block (reference implementation, always scalar).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Map 64 random bits to a double in [0, 1) with 53-bit resolution.
double to_unit_double(std::uint32_t lo, std::uint32_t hi);

// Per-event uniforms for events [first_event, first_event + n):
// u_outcome[i] decides the collision projection branch, u_meas[i] the
// strangeness measurement branch.
void event_uniforms(std::uint64_t seed, std::uint64_t first_event, std::size_t n,
                    double* u_outcome, double* u_meas);

// Direct kernel entry points (equivalence tests call these).
void event_uniforms_scalar(std::uint64_t seed, std::uint64_t first_event,
                           std::size_t n, double* u_outcome, double* u_meas);
#if defined(__x86_64__) || defined(_M_X64)
void event_uniforms_avx2(std::uint64_t seed, std::uint64_t first_event,
                         std::size_t n, double* u_outcome, double* u_meas);
#endif

enum class Backend { Scalar, Avx2 };

bool avx2_supported();
Backend active_backend();
// Override the dispatched kernel; throws std::runtime_error if the
// requested backend is not available on this machine.
void set_backend(Backend b);

}  // namespace kaonsim::rng
