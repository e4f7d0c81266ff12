#include "prnu/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace prnu::kernels {

const Ops* avx2_table();  // defined in kernels_avx2.cpp

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops* resolve(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return &scalar();
        case Backend::Avx2:
            return (cpu_has_avx2() && avx2_table()) ? avx2_table() : nullptr;
        case Backend::Auto:
        default: {
            if (const char* env = std::getenv("PRNU_KERNEL_BACKEND")) {
                if (std::strcmp(env, "scalar") == 0) return &scalar();
                if (std::strcmp(env, "avx2") == 0) {
                    // Fall back to detection when the forced backend is
                    // impossible on this machine.
                    if (const Ops* forced = resolve(Backend::Avx2)) return forced;
                }
            }
            const Ops* v = resolve(Backend::Avx2);
            return v ? v : &scalar();
        }
    }
}

std::atomic<const Ops*> g_active{nullptr};

}  // namespace

const Ops& active() {
    const Ops* ops = g_active.load(std::memory_order_acquire);
    if (!ops) {
        ops = resolve(Backend::Auto);
        g_active.store(ops, std::memory_order_release);
    }
    return *ops;
}

const Ops* avx2() { return resolve(Backend::Avx2); }

bool select(Backend b) {
    const Ops* ops = resolve(b);
    if (!ops) return false;
    g_active.store(ops, std::memory_order_release);
    return true;
}

}  // namespace prnu::kernels
