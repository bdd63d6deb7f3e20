#include <atomic>
#include <stdexcept>

#include "kaonsim/rng.hpp"

namespace kaonsim::rng {

namespace {

#if defined(__x86_64__) || defined(_M_X64)
bool detect_avx2() { return __builtin_cpu_supports("avx2") != 0; }
#else
bool detect_avx2() { return false; }
#endif

// Function-local so CPU feature detection runs on first use, not during
// static initialization.
std::atomic<Backend>& backend_slot() {
    static std::atomic<Backend> slot{detect_avx2() ? Backend::Avx2 : Backend::Scalar};
    return slot;
}

}  // namespace

bool avx2_supported() {
    static const bool supported = detect_avx2();
    return supported;
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::Avx2 && !avx2_supported()) {
        throw std::runtime_error("rng::set_backend: AVX2 not available on this CPU");
    }
    backend_slot().store(b, std::memory_order_relaxed);
}

void event_uniforms(std::uint64_t seed, std::uint64_t first_event, std::size_t n,
                    double* u_outcome, double* u_meas) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::Avx2) {
        event_uniforms_avx2(seed, first_event, n, u_outcome, u_meas);
        return;
    }
#endif
    event_uniforms_scalar(seed, first_event, n, u_outcome, u_meas);
}

}  // namespace kaonsim::rng
