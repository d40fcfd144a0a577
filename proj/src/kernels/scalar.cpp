#include "rflow/kernels/kernels.hpp"

#include "kernels_inline.hpp"

namespace rflow::kernels {
namespace {

namespace d = detail;

void stencil3x3_scalar(const float* src, int width, int height, const double* k9,
                       double norm, BorderPolicy border, float* dst) {
    for (int i = 0; i < height; ++i) {
        float* out = dst + static_cast<std::size_t>(i) * width;
        for (int j = 0; j < width; ++j) {
            out[j] = d::stencil3x3_px(src, width, height, k9, norm, border, i, j);
        }
    }
}

void blur_scalar(const float* src, int width, int height, const double* taps,
                 int radius, BorderPolicy border, float* dst) {
    const int taps_n = 2 * radius + 1;
    d::RowRing<double> ring(static_cast<std::size_t>(width), taps_n);
    std::vector<const double*> rows(taps_n);
    auto fill = [&](int k, double* out) {
        const float* row = src + static_cast<std::size_t>(k) * width;
        for (int j = 0; j < width; ++j) {
            out[j] = d::blur_h_px(row, width, taps, radius, border, j);
        }
    };

    for (int i = 0; i < height; ++i) {
        for (int t = 0; t < taps_n; ++t) {
            const int k = d::map_index(i - radius + t, height, border);
            rows[t] = k < 0 ? nullptr : ring.row(k, fill);
        }
        float* out = dst + static_cast<std::size_t>(i) * width;
        for (int j = 0; j < width; ++j) {
            out[j] = d::blur_v_px(rows.data(), taps_n, taps, j);
        }
    }
}

void subtract_scalar(const float* a, const float* b, std::size_t count, float* dst) {
    for (std::size_t p = 0; p < count; ++p) dst[p] = a[p] - b[p];
}

void scale_add_scalar(const float* a, const float* b, double sa, double sb,
                      std::size_t count, float* dst) {
    for (std::size_t p = 0; p < count; ++p) {
        dst[p] = static_cast<float>(sa * static_cast<double>(a[p]) +
                                    sb * static_cast<double>(b[p]));
    }
}

void central_gradient_scalar(const float* f, int width, int height, float* fx, float* fy) {
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) {
            d::central_gradient_px(f, width, height, i, j, fx, fy);
        }
    }
}

void lk_flow_scalar(const float* current, const float* next, int width, int height,
                    int radius, double tau, float* u, float* v) {
    const int taps = 2 * radius + 1;
    d::RowRing<double> ring(5 * static_cast<std::size_t>(width), taps);
    std::vector<const double*> rows(taps);
    auto fill = [&](int row, double* dst) {
        d::lk_fill_product_row(current, next, width, height, row, dst);
    };

    for (int i = 0; i < height; ++i) {
        for (int t = 0; t < taps; ++t) {
            rows[t] = ring.row(d::clamp_index(i - radius + t, height), fill);
        }
        const std::size_t base = static_cast<std::size_t>(i) * width;
        for (int j = 0; j < width; ++j) {
            double acc[5];
            d::lk_window_px(rows.data(), taps, width, radius, j, acc);
            d::lk_solve_px(acc[0], acc[1], acc[2], acc[3], acc[4], tau, &u[base + j],
                           &v[base + j]);
        }
    }
}

void reynolds_raw_scalar(const float* delta, int width, int height, BorderPolicy border,
                         float* u_raw, float* v_raw) {
    d::RowRing<float> ring(4 * static_cast<std::size_t>(width), 3);
    const float* rows[3];
    auto fill = [&](int k, float* dst) {
        for (int j = 0; j < width; ++j) {
            d::reynolds_terms_px(delta, width, height, border, k, j, &dst[j],
                                 &dst[width + j], &dst[2 * width + j],
                                 &dst[3 * width + j]);
        }
    };

    for (int i = 0; i < height; ++i) {
        for (int t = 0; t < 3; ++t) {
            const int k = d::map_index(i - 1 + t, height, border);
            rows[t] = k < 0 ? nullptr : ring.row(k, fill);
        }
        const float* center = ring.row(i, fill);
        const std::size_t base = static_cast<std::size_t>(i) * width;
        for (int j = 0; j < width; ++j) {
            d::reynolds_combine_px(rows, center, width, border, j, &u_raw[base + j],
                                   &v_raw[base + j]);
        }
    }
}

void magnitude_scalar(const float* u, const float* v, std::size_t count, float* dst) {
    for (std::size_t p = 0; p < count; ++p) dst[p] = d::magnitude_px(u[p], v[p]);
}

void quantize_bytes_scalar(const float* src, std::size_t count, double scale,
                           bool clamp_input, std::uint8_t* dst) {
    for (std::size_t p = 0; p < count; ++p) {
        dst[p] = d::quantize_px(src[p], scale, clamp_input);
    }
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops table{
        "scalar",        stencil3x3_scalar,   blur_scalar,
        subtract_scalar, scale_add_scalar,    central_gradient_scalar,
        lk_flow_scalar,  reynolds_raw_scalar, magnitude_scalar,
        quantize_bytes_scalar,
    };
    return table;
}

}  // namespace rflow::kernels
