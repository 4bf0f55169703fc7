#include "bkmr/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace bkmr::la::simd {

namespace {

const Kernels* pick_auto() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        if (const Kernels* k = avx2_kernels()) return k;
#elif defined(__aarch64__)
    if (const Kernels* k = neon_kernels()) return k;
#endif
    return &scalar_kernels();
}

const Kernels* pick_named(const char* name) {
    if (std::strcmp(name, "scalar") == 0) return &scalar_kernels();
    if (std::strcmp(name, "auto") == 0) return pick_auto();
#if defined(__x86_64__) || defined(_M_X64)
    if (std::strcmp(name, "avx2") == 0 &&
        __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return avx2_kernels();
#endif
#if defined(__aarch64__)
    if (std::strcmp(name, "neon") == 0) return neon_kernels();
#endif
    return nullptr;
}

std::atomic<const Kernels*> g_active{nullptr};

const Kernels* resolve() {
    if (const char* env = std::getenv("BKMR_VI_SIMD"))
        if (const Kernels* k = pick_named(env)) return k;
    return pick_auto();
}

} // namespace

const Kernels& active() {
    const Kernels* k = g_active.load(std::memory_order_acquire);
    if (!k) {
        k = resolve();
        g_active.store(k, std::memory_order_release);
    }
    return *k;
}

bool select(const char* name) {
    const Kernels* k = pick_named(name);
    if (!k) return false;
    g_active.store(k, std::memory_order_release);
    return true;
}

} // namespace bkmr::la::simd
