#include "rflow/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace rflow::kernels {

// Defined in avx2.cpp; returns nullptr when the TU was built without AVX2.
const Ops* avx2_table();

namespace {

bool cpu_has_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Ops* detect_default() {
    const Ops* avx2 = avx2_table();
    const bool supported = avx2 != nullptr && cpu_has_avx2();
    if (const char* env = std::getenv("RFLOW_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
        if (std::strcmp(env, "avx2") == 0 && supported) return avx2;
    }
    return supported ? avx2 : &scalar_ops();
}

std::atomic<const Ops*>& active_slot() {
    static std::atomic<const Ops*> slot{detect_default()};
    return slot;
}

}  // namespace

const Ops* avx2_ops() {
    const Ops* table = avx2_table();
    return (table != nullptr && cpu_has_avx2()) ? table : nullptr;
}

const Ops& active_ops() { return *active_slot().load(std::memory_order_relaxed); }

IsaLevel active_level() {
    return &active_ops() == &scalar_ops() ? IsaLevel::scalar : IsaLevel::avx2;
}

void set_active_level(IsaLevel level) {
    if (level == IsaLevel::scalar) {
        active_slot().store(&scalar_ops(), std::memory_order_relaxed);
        return;
    }
    const Ops* avx2 = avx2_ops();
    if (avx2 == nullptr) {
        throw std::invalid_argument("AVX2 kernels are not available on this CPU");
    }
    active_slot().store(avx2, std::memory_order_relaxed);
}

const char* level_name(IsaLevel level) {
    return level == IsaLevel::scalar ? "scalar" : "avx2";
}

}  // namespace rflow::kernels
