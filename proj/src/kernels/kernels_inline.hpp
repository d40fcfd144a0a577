#pragma once

#include <cmath>

#include "rflow/image.hpp"

// Per-pixel kernel bodies shared by the scalar backend and the edge/tail
// handling of the SIMD backends. Both must run exactly these operation
// sequences so variant outputs stay bit-identical.

namespace rflow::kernels::detail {

// Maps an out-of-range index per the border policy; -1 means the sample
// contributes zero (zero policy only).
inline int map_index(int i, int n, BorderPolicy border) {
    if (i >= 0 && i < n) return i;
    switch (border) {
        case BorderPolicy::replicate:
            return i < 0 ? 0 : n - 1;
        case BorderPolicy::reflect: {
            if (n == 1) return 0;
            while (i < 0 || i >= n) {
                if (i < 0) i = -i;
                if (i >= n) i = 2 * (n - 1) - i;
            }
            return i;
        }
        case BorderPolicy::zero:
            return -1;
    }
    return -1;
}

inline int clamp_index(int i, int n) {
    return i < 0 ? 0 : (i >= n ? n - 1 : i);
}

inline float stencil3x3_px(const float* src, int width, int height, const double* k9,
                           double norm, BorderPolicy border, int i, int j) {
    double acc = 0.0;
    for (int r = -1; r <= 1; ++r) {
        const int ri = map_index(i + r, height, border);
        for (int c = -1; c <= 1; ++c) {
            const int ci = map_index(j + c, width, border);
            const double sample =
                (ri < 0 || ci < 0) ? 0.0 : static_cast<double>(src[static_cast<std::size_t>(ri) * width + ci]);
            acc += k9[(r + 1) * 3 + (c + 1)] * sample;
        }
    }
    return static_cast<float>(norm * acc);
}

inline double blur_h_px(const float* row, int width, const double* taps, int radius,
                        BorderPolicy border, int j) {
    double acc = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const int cj = map_index(j + k, width, border);
        const double sample = cj < 0 ? 0.0 : static_cast<double>(row[cj]);
        acc += taps[k + radius] * sample;
    }
    return acc;
}

// Vertical-pass accumulation over horizontally blurred rows held in a ring
// (null row pointer = zero contribution under the zero policy).
inline float blur_v_px(const double* const* rows, int taps_n, const double* taps, int j) {
    double acc = 0.0;
    for (int t = 0; t < taps_n; ++t) {
        const double sample = rows[t] ? rows[t][j] : 0.0;
        acc += taps[t] * sample;
    }
    return static_cast<float>(acc);
}


inline void central_gradient_px(const float* f, int width, int height, int i, int j,
                                float* fx, float* fy) {
    const std::size_t p = static_cast<std::size_t>(i) * width + j;
    const int jl = clamp_index(j - 1, width);
    const int jr = clamp_index(j + 1, width);
    const int iu = clamp_index(i - 1, height);
    const int id = clamp_index(i + 1, height);
    const double gx = (static_cast<double>(f[static_cast<std::size_t>(i) * width + jr]) -
                       static_cast<double>(f[static_cast<std::size_t>(i) * width + jl])) *
                      0.5;
    const double gy = (static_cast<double>(f[static_cast<std::size_t>(id) * width + j]) -
                       static_cast<double>(f[static_cast<std::size_t>(iu) * width + j])) *
                      0.5;
    fx[p] = static_cast<float>(gx);
    fy[p] = static_cast<float>(gy);
}

// Ring of per-row scratch blocks for the fused row-banded kernels. Window
// rows always stay within a span smaller than the slot count, so row k maps
// to slot k % slots without collisions; an evicted row that a border policy
// revisits is simply recomputed.
template <typename T>
struct RowRing {
    std::size_t stride = 0;
    int slots = 0;
    std::vector<T> storage;
    std::vector<int> slot_row;

    RowRing(std::size_t row_stride, int slot_count)
        : stride(row_stride), slots(slot_count),
          storage(row_stride * static_cast<std::size_t>(slot_count)),
          slot_row(slot_count, -1) {}

    // Returns the block for image row k, computing it on first use.
    template <typename FillFn>
    const T* row(int k, const FillFn& fill) {
        T* data = storage.data() + static_cast<std::size_t>(k % slots) * stride;
        if (slot_row[k % slots] != k) {
            fill(k, data);
            slot_row[k % slots] = k;
        }
        return data;
    }
};

// Gradient triple at one pixel, quantized to float32 (the op contract) so
// the products below start from the same values as the standalone gradient
// and difference operations.
inline void lk_gradients_px(const float* current, const float* next, int width,
                            int height, int i, int j, float* gx, float* gy, float* gt) {
    const std::size_t row = static_cast<std::size_t>(i) * width;
    const int jl = clamp_index(j - 1, width);
    const int jr = clamp_index(j + 1, width);
    const std::size_t up = static_cast<std::size_t>(clamp_index(i - 1, height)) * width;
    const std::size_t dn = static_cast<std::size_t>(clamp_index(i + 1, height)) * width;
    *gx = static_cast<float>((static_cast<double>(current[row + jr]) -
                              static_cast<double>(current[row + jl])) * 0.5);
    *gy = static_cast<float>((static_cast<double>(current[dn + j]) -
                              static_cast<double>(current[up + j])) * 0.5);
    *gt = next[row + j] - current[row + j];
}

// Fills one product row [xx | xy | yy | xt | yt] (each `width` doubles) from
// the float32 gradient triples of image row `row`. float*float products are
// exact in double.
inline void lk_fill_product_row(const float* current, const float* next, int width,
                                int height, int row, double* dst) {
    double* xx = dst;
    double* xy = dst + width;
    double* yy = dst + 2 * static_cast<std::size_t>(width);
    double* xt = dst + 3 * static_cast<std::size_t>(width);
    double* yt = dst + 4 * static_cast<std::size_t>(width);
    for (int j = 0; j < width; ++j) {
        float gxf, gyf, gtf;
        lk_gradients_px(current, next, width, height, row, j, &gxf, &gyf, &gtf);
        const double gx = gxf;
        const double gy = gyf;
        const double gt = gtf;
        xx[j] = gx * gx;
        xy[j] = gx * gy;
        yy[j] = gy * gy;
        xt[j] = gx * gt;
        yt[j] = gy * gt;
    }
}

// Window accumulation for one pixel from the ring rows (row-major order per
// quantity, columns clamped).
inline void lk_window_px(const double* const* rows, int taps, int width, int radius,
                         int j, double acc[5]) {
    for (int q = 0; q < 5; ++q) acc[q] = 0.0;
    for (int t = 0; t < taps; ++t) {
        const double* row = rows[t];
        for (int c = -radius; c <= radius; ++c) {
            const int cj = clamp_index(j + c, width);
            acc[0] += row[cj];
            acc[1] += row[width + cj];
            acc[2] += row[2 * static_cast<std::size_t>(width) + cj];
            acc[3] += row[3 * static_cast<std::size_t>(width) + cj];
            acc[4] += row[4 * static_cast<std::size_t>(width) + cj];
        }
    }
}

// The four fixed stencils of the residual-flow pipeline at one pixel.
// Sequences are pinned; the SIMD variants mirror them operation for
// operation. Zero-coefficient taps are skipped (they only ever add +/-0).
inline void reynolds_terms_px(const float* src, int width, int height,
                              BorderPolicy border, int i, int j, float* bx, float* by,
                              float* gx, float* gy) {
    double s[3][3];
    for (int r = -1; r <= 1; ++r) {
        const int ri = map_index(i + r, height, border);
        for (int c = -1; c <= 1; ++c) {
            const int ci = map_index(j + c, width, border);
            s[r + 1][c + 1] = (ri < 0 || ci < 0)
                                  ? 0.0
                                  : static_cast<double>(
                                        src[static_cast<std::size_t>(ri) * width + ci]);
        }
    }
    double t = s[0][0] + 4.0 * s[0][1];
    t += s[0][2];
    t -= s[2][0];
    t -= 4.0 * s[2][1];
    t -= s[2][2];
    *bx = static_cast<float>(t * (1.0 / 3.0));

    t = 0.0 - s[0][0];
    t += s[0][2];
    t -= 4.0 * s[1][0];
    t += 4.0 * s[1][2];
    t -= s[2][0];
    t += s[2][2];
    *by = static_cast<float>(t * (1.0 / 3.0));

    t = 0.0 - s[0][0];
    t += s[0][2];
    t -= 2.0 * s[1][0];
    t += 2.0 * s[1][2];
    t -= s[2][0];
    t += s[2][2];
    *gx = static_cast<float>(t);

    t = 0.0 - s[0][0];
    t -= 2.0 * s[0][1];
    t -= s[0][2];
    t += s[2][0];
    t += 2.0 * s[2][1];
    t += s[2][2];
    *gy = static_cast<float>(t);
}

// Stencil-terms rows live in a ring as [bx | by | gx | gy], each `width`
// floats. term_rows holds the window rows for the box stage (null = zero
// contribution under the zero policy); bx/by are read at the center row.
inline void reynolds_combine_px(const float* const* term_rows, const float* center_row,
                                int width, BorderPolicy border, int j, float* u_raw,
                                float* v_raw) {
    double sgx = 0.0;
    double sgy = 0.0;
    for (int t = 0; t < 3; ++t) {
        const float* row = term_rows[t];
        for (int c = -1; c <= 1; ++c) {
            const int cj = map_index(j + c, width, border);
            const bool oob = row == nullptr || cj < 0;
            sgx += oob ? 0.0 : static_cast<double>(row[2 * static_cast<std::size_t>(width) + cj]);
        }
    }
    for (int t = 0; t < 3; ++t) {
        const float* row = term_rows[t];
        for (int c = -1; c <= 1; ++c) {
            const int cj = map_index(j + c, width, border);
            const bool oob = row == nullptr || cj < 0;
            sgy += oob ? 0.0 : static_cast<double>(row[3 * static_cast<std::size_t>(width) + cj]);
        }
    }
    const float sgx_f = static_cast<float>(sgx);
    const float sgy_f = static_cast<float>(sgy);
    *u_raw = static_cast<float>(static_cast<double>(sgy_f) -
                                static_cast<double>(center_row[width + j]));
    *v_raw = static_cast<float>(static_cast<double>(center_row[j]) -
                                static_cast<double>(sgx_f));
}

inline std::uint8_t quantize_px(float value, double scale, bool clamp_input) {
    double x = value;
    if (clamp_input) x = x < 0.0 ? 0.0 : (x > 255.0 ? 255.0 : x);
    x *= scale;
    const double r = std::nearbyint(x);  // ties-to-even under FE_TONEAREST
    return static_cast<std::uint8_t>(r < 0.0 ? 0.0 : (r > 255.0 ? 255.0 : r));
}

inline void lk_solve_px(double a, double b, double c, double sxt, double syt,
                        double tau, float* u, float* v) {
    const double half_trace = 0.5 * (a + c);
    const double diff = 0.5 * (a - c);
    const double lambda_min = half_trace - std::sqrt(diff * diff + b * b);
    if (lambda_min < tau || lambda_min <= 0.0) {
        *u = 0.0f;
        *v = 0.0f;
        return;
    }
    const double det = a * c - b * b;
    // 0.0 - x, not -x: keeps zero signs identical to the SIMD variants.
    const double bx = 0.0 - sxt;
    const double by = 0.0 - syt;
    *u = static_cast<float>((c * bx - b * by) / det);
    *v = static_cast<float>((a * by - b * bx) / det);
}

inline float magnitude_px(float u, float v) {
    const double ud = u;
    const double vd = v;
    return static_cast<float>(std::sqrt(ud * ud + vd * vd));
}

}  // namespace rflow::kernels::detail
