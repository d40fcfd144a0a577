#pragma once

#include "rflow/image.hpp"

// Low-level pixel kernels behind the public image/flow operations. Every op
// has a scalar reference implementation and, where the CPU supports it, an
// AVX2 variant. Variants are selected once at startup and must produce
// bit-identical output: all accumulate in double, in the same per-pixel
// operation order, and round to float32 only at the final store.

namespace rflow::kernels {

struct Ops {
    const char* name;

    // dst(i,j) = f32(norm * sum_{r,c} k[r*3+c] * src(i+r-1, j+c-1)), taps in
    // row-major order, borders resolved per policy.
    void (*stencil3x3)(const float* src, int width, int height, const double* k9,
                       double norm, BorderPolicy border, float* dst);

    // Separable blur, horizontal then vertical in one sweep. Horizontal-pass
    // rows are kept in a double-precision ring until the vertical pass
    // consumes them, so the result matches a direct 2-D evaluation after a
    // single float32 rounding.
    void (*blur)(const float* src, int width, int height, const double* taps,
                 int radius, BorderPolicy border, float* dst);

    // dst = a - b
    void (*subtract)(const float* a, const float* b, std::size_t count, float* dst);

    // dst = f32(sa*a + sb*b), accumulated in double
    void (*scale_add)(const float* a, const float* b, double sa, double sb,
                      std::size_t count, float* dst);

    // Central differences with replicate borders:
    // fx(i,j) = f32((f(i,j+1) - f(i,j-1)) * 0.5), fy analogous over rows.
    void (*central_gradient)(const float* f, int width, int height, float* fx, float* fy);

    // Fused windowed least-squares flow. Central-difference gradients
    // (float32, replicate borders), the temporal difference, and their five
    // products are produced row by row into a ring buffer; per pixel the
    // products are aggregated over the (2*radius+1)^2 window (coordinates
    // clamped, row-major accumulation in double; the products themselves are
    // exact) and the 2x2 structure tensor is solved. Pixels whose smaller
    // eigenvalue is below tau get (0, 0).
    void (*lk_flow)(const float* current, const float* next, int width, int height,
                    int radius, double tau, float* u, float* v);

    // Fused raw residual-flow channels of a frame difference: one sweep
    // evaluates the four fixed 3x3 stencils (Simpson rows bx, Simpson
    // columns by, Sobel gx, gy; float32 at each stage boundary) into a row
    // ring, 3x3-box-aggregates the Sobel responses, and combines
    // u = f32(box(gy) - by), v = f32(bx - box(gx)).
    void (*reynolds_raw)(const float* delta, int width, int height,
                         BorderPolicy border, float* u_raw, float* v_raw);

    // dst = f32(sqrt(u*u + v*v)) in double
    void (*magnitude)(const float* u, const float* v, std::size_t count, float* dst);

    // Byte quantization: x = (optionally clamped to [0,255]) src[p] * scale,
    // rounded to nearest-even and clamped to [0, 255].
    void (*quantize_bytes)(const float* src, std::size_t count, double scale,
                           bool clamp_input, std::uint8_t* dst);
};

enum class IsaLevel { scalar, avx2 };

// Scalar reference table, always available.
const Ops& scalar_ops();

// AVX2 table, or nullptr when the CPU lacks AVX2.
const Ops* avx2_ops();

// Active table. Defaults to the best supported level; the RFLOW_SIMD
// environment variable ("scalar" or "avx2") overrides at startup.
const Ops& active_ops();
IsaLevel active_level();

// Force a level (throws std::invalid_argument if unsupported). Test hook and
// CLI escape hatch.
void set_active_level(IsaLevel level);

const char* level_name(IsaLevel level);

}  // namespace rflow::kernels
