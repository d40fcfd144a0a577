// AVX2 kernel variants. Compiled with -mavx2 (no FMA): every lane must run
// the same IEEE operation sequence as the scalar backend so outputs are
// bit-identical. Edges and tails fall back to the shared per-pixel bodies.

#include "rflow/kernels/kernels.hpp"

#include "kernels_inline.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace rflow::kernels {
namespace {

namespace d = detail;

inline __m256d load4d(const float* p) {
    return _mm256_cvtps_pd(_mm_loadu_ps(p));
}

inline void store4f(float* p, __m256d v) {
    _mm_storeu_ps(p, _mm256_cvtpd_ps(v));
}

void stencil3x3_avx2(const float* src, int width, int height, const double* k9,
                     double norm, BorderPolicy border, float* dst) {
    __m256d kv[9];
    for (int t = 0; t < 9; ++t) kv[t] = _mm256_set1_pd(k9[t]);
    const __m256d nv = _mm256_set1_pd(norm);

    for (int i = 0; i < height; ++i) {
        float* out = dst + static_cast<std::size_t>(i) * width;
        if (i == 0 || i == height - 1 || width < 6) {
            for (int j = 0; j < width; ++j) {
                out[j] = d::stencil3x3_px(src, width, height, k9, norm, border, i, j);
            }
            continue;
        }
        const float* r0 = src + static_cast<std::size_t>(i - 1) * width;
        const float* r1 = src + static_cast<std::size_t>(i) * width;
        const float* r2 = src + static_cast<std::size_t>(i + 1) * width;

        out[0] = d::stencil3x3_px(src, width, height, k9, norm, border, i, 0);
        int j = 1;
        for (; j + 3 <= width - 2; j += 4) {
            __m256d acc = _mm256_setzero_pd();
            acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[0], load4d(r0 + j - 1)));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[1], load4d(r0 + j)));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[2], load4d(r0 + j + 1)));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[3], load4d(r1 + j - 1)));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[4], load4d(r1 + j)));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[5], load4d(r1 + j + 1)));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[6], load4d(r2 + j - 1)));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[7], load4d(r2 + j)));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[8], load4d(r2 + j + 1)));
            store4f(out + j, _mm256_mul_pd(nv, acc));
        }
        for (; j < width; ++j) {
            out[j] = d::stencil3x3_px(src, width, height, k9, norm, border, i, j);
        }
    }
}

void blur_avx2(const float* src, int width, int height, const double* taps,
               int radius, BorderPolicy border, float* dst) {
    const int taps_n = 2 * radius + 1;
    d::BlurRowRing ring(width, radius);
    std::vector<const double*> rows(taps_n);
    auto fill = [&](int k, double* out) {
        const float* row = src + static_cast<std::size_t>(k) * width;
        int j = 0;
        for (; j < radius && j < width; ++j) {
            out[j] = d::blur_h_px(row, width, taps, radius, border, j);
        }
        for (; j + 3 <= width - 1 - radius; j += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (int t = 0; t < taps_n; ++t) {
                const __m256d tap = _mm256_set1_pd(taps[t]);
                acc = _mm256_add_pd(acc, _mm256_mul_pd(tap, load4d(row + j - radius + t)));
            }
            _mm256_storeu_pd(out + j, acc);
        }
        for (; j < width; ++j) {
            out[j] = d::blur_h_px(row, width, taps, radius, border, j);
        }
    };

    for (int i = 0; i < height; ++i) {
        for (int t = 0; t < taps_n; ++t) {
            const int k = d::map_index(i - radius + t, height, border);
            rows[t] = k < 0 ? nullptr : ring.row(k, fill);
        }
        float* out = dst + static_cast<std::size_t>(i) * width;
        int j = 0;
        for (; j + 3 <= width - 1; j += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (int t = 0; t < taps_n; ++t) {
                const __m256d tap = _mm256_set1_pd(taps[t]);
                const __m256d sample =
                    rows[t] ? _mm256_loadu_pd(rows[t] + j) : _mm256_setzero_pd();
                acc = _mm256_add_pd(acc, _mm256_mul_pd(tap, sample));
            }
            store4f(out + j, acc);
        }
        for (; j < width; ++j) {
            out[j] = d::blur_v_px(rows.data(), taps_n, taps, j);
        }
    }
}

void subtract_avx2(const float* a, const float* b, std::size_t count, float* dst) {
    std::size_t p = 0;
    for (; p + 8 <= count; p += 8) {
        _mm256_storeu_ps(dst + p,
                         _mm256_sub_ps(_mm256_loadu_ps(a + p), _mm256_loadu_ps(b + p)));
    }
    for (; p < count; ++p) dst[p] = a[p] - b[p];
}

void scale_add_avx2(const float* a, const float* b, double sa, double sb,
                    std::size_t count, float* dst) {
    const __m256d sav = _mm256_set1_pd(sa);
    const __m256d sbv = _mm256_set1_pd(sb);
    std::size_t p = 0;
    for (; p + 4 <= count; p += 4) {
        const __m256d ta = _mm256_mul_pd(sav, load4d(a + p));
        const __m256d tb = _mm256_mul_pd(sbv, load4d(b + p));
        store4f(dst + p, _mm256_add_pd(ta, tb));
    }
    for (; p < count; ++p) {
        dst[p] = static_cast<float>(sa * static_cast<double>(a[p]) +
                                    sb * static_cast<double>(b[p]));
    }
}

void central_gradient_avx2(const float* f, int width, int height, float* fx, float* fy) {
    const __m256d half = _mm256_set1_pd(0.5);
    for (int i = 0; i < height; ++i) {
        const std::size_t base = static_cast<std::size_t>(i) * width;
        const float* row = f + base;
        const float* rup = f + static_cast<std::size_t>(d::clamp_index(i - 1, height)) * width;
        const float* rdn = f + static_cast<std::size_t>(d::clamp_index(i + 1, height)) * width;

        int j = 0;
        for (; j + 4 <= width; j += 4) {
            const __m256d gy =
                _mm256_mul_pd(_mm256_sub_pd(load4d(rdn + j), load4d(rup + j)), half);
            store4f(fy + base + j, gy);
        }
        for (; j < width; ++j) {
            const double gy = (static_cast<double>(rdn[j]) - static_cast<double>(rup[j])) * 0.5;
            fy[base + j] = static_cast<float>(gy);
        }

        if (width >= 6) {
            fx[base] = static_cast<float>(
                (static_cast<double>(row[d::clamp_index(1, width)]) -
                 static_cast<double>(row[0])) * 0.5);
            j = 1;
            for (; j + 3 <= width - 2; j += 4) {
                const __m256d gx =
                    _mm256_mul_pd(_mm256_sub_pd(load4d(row + j + 1), load4d(row + j - 1)), half);
                store4f(fx + base + j, gx);
            }
        } else {
            j = 0;
        }
        for (; j < width; ++j) {
            const int jl = d::clamp_index(j - 1, width);
            const int jr = d::clamp_index(j + 1, width);
            const double gx =
                (static_cast<double>(row[jr]) - static_cast<double>(row[jl])) * 0.5;
            fx[base + j] = static_cast<float>(gx);
        }
    }
}

// Vector twin of lk_solve_px; rejected lanes are zeroed after the fact.
inline void lk_solve_vec(__m256d a, __m256d b, __m256d c, __m256d sxt, __m256d syt,
                         __m256d tauv, float* u, float* v) {
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d half_trace = _mm256_mul_pd(half, _mm256_add_pd(a, c));
    const __m256d diff = _mm256_mul_pd(half, _mm256_sub_pd(a, c));
    const __m256d disc =
        _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(diff, diff), _mm256_mul_pd(b, b)));
    const __m256d lambda_min = _mm256_sub_pd(half_trace, disc);
    const __m256d reject = _mm256_or_pd(_mm256_cmp_pd(lambda_min, tauv, _CMP_LT_OQ),
                                        _mm256_cmp_pd(lambda_min, zero, _CMP_LE_OQ));
    const __m256d det = _mm256_sub_pd(_mm256_mul_pd(a, c), _mm256_mul_pd(b, b));
    const __m256d bx = _mm256_sub_pd(zero, sxt);
    const __m256d by = _mm256_sub_pd(zero, syt);
    __m256d uu =
        _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(c, bx), _mm256_mul_pd(b, by)), det);
    __m256d vv =
        _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(a, by), _mm256_mul_pd(b, bx)), det);
    uu = _mm256_andnot_pd(reject, uu);
    vv = _mm256_andnot_pd(reject, vv);
    store4f(u, uu);
    store4f(v, vv);
}

void lk_flow_avx2(const float* fx, const float* fy, const float* ft, int width,
                  int height, int radius, double tau, float* u, float* v) {
    const int taps = 2 * radius + 1;
    const __m256d tauv = _mm256_set1_pd(tau);
    d::LkProductRing ring(width, radius);
    std::vector<const double*> rows(taps);

    auto fill = [&](int row, double* dst) {
        const std::size_t base = static_cast<std::size_t>(row) * width;
        double* xx = dst;
        double* xy = dst + width;
        double* yy = dst + 2 * static_cast<std::size_t>(width);
        double* xt = dst + 3 * static_cast<std::size_t>(width);
        double* yt = dst + 4 * static_cast<std::size_t>(width);
        int j = 0;
        for (; j + 4 <= width; j += 4) {
            const __m256d gx = load4d(fx + base + j);
            const __m256d gy = load4d(fy + base + j);
            const __m256d gt = load4d(ft + base + j);
            _mm256_storeu_pd(xx + j, _mm256_mul_pd(gx, gx));
            _mm256_storeu_pd(xy + j, _mm256_mul_pd(gx, gy));
            _mm256_storeu_pd(yy + j, _mm256_mul_pd(gy, gy));
            _mm256_storeu_pd(xt + j, _mm256_mul_pd(gx, gt));
            _mm256_storeu_pd(yt + j, _mm256_mul_pd(gy, gt));
        }
        for (; j < width; ++j) {
            const double gx = fx[base + j];
            const double gy = fy[base + j];
            const double gt = ft[base + j];
            xx[j] = gx * gx;
            xy[j] = gx * gy;
            yy[j] = gy * gy;
            xt[j] = gx * gt;
            yt[j] = gy * gt;
        }
    };

    for (int i = 0; i < height; ++i) {
        for (int t = 0; t < taps; ++t) {
            rows[t] = ring.row(d::clamp_index(i - radius + t, height), fill);
        }
        const std::size_t base = static_cast<std::size_t>(i) * width;
        int j = 0;
        for (; j < radius && j < width; ++j) {
            double acc[5];
            d::lk_window_px(rows.data(), taps, width, radius, j, acc);
            d::lk_solve_px(acc[0], acc[1], acc[2], acc[3], acc[4], tau, &u[base + j],
                           &v[base + j]);
        }
        for (; j + 3 <= width - 1 - radius; j += 4) {
            __m256d a0 = _mm256_setzero_pd();
            __m256d a1 = _mm256_setzero_pd();
            __m256d a2 = _mm256_setzero_pd();
            __m256d a3 = _mm256_setzero_pd();
            __m256d a4 = _mm256_setzero_pd();
            for (int t = 0; t < taps; ++t) {
                const double* row = rows[t];
                for (int c = -radius; c <= radius; ++c) {
                    const int jc = j + c;
                    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(row + jc));
                    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(row + width + jc));
                    a2 = _mm256_add_pd(
                        a2, _mm256_loadu_pd(row + 2 * static_cast<std::size_t>(width) + jc));
                    a3 = _mm256_add_pd(
                        a3, _mm256_loadu_pd(row + 3 * static_cast<std::size_t>(width) + jc));
                    a4 = _mm256_add_pd(
                        a4, _mm256_loadu_pd(row + 4 * static_cast<std::size_t>(width) + jc));
                }
            }
            lk_solve_vec(a0, a1, a2, a3, a4, tauv, u + base + j, v + base + j);
        }
        for (; j < width; ++j) {
            double acc[5];
            d::lk_window_px(rows.data(), taps, width, radius, j, acc);
            d::lk_solve_px(acc[0], acc[1], acc[2], acc[3], acc[4], tau, &u[base + j],
                           &v[base + j]);
        }
    }
}

void reynolds_terms_avx2(const float* delta, int width, int height, BorderPolicy border,
                         float* bx, float* by, float* gx, float* gy) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d four = _mm256_set1_pd(4.0);
    const __m256d third = _mm256_set1_pd(1.0 / 3.0);

    for (int i = 0; i < height; ++i) {
        const std::size_t base = static_cast<std::size_t>(i) * width;
        if (i == 0 || i == height - 1 || width < 6) {
            for (int j = 0; j < width; ++j) {
                d::reynolds_terms_px(delta, width, height, border, i, j, &bx[base + j],
                                     &by[base + j], &gx[base + j], &gy[base + j]);
            }
            continue;
        }
        const float* r0 = delta + base - width;
        const float* r1 = delta + base;
        const float* r2 = delta + base + width;

        d::reynolds_terms_px(delta, width, height, border, i, 0, &bx[base], &by[base],
                             &gx[base], &gy[base]);
        int j = 1;
        for (; j + 3 <= width - 2; j += 4) {
            const __m256d s00 = load4d(r0 + j - 1);
            const __m256d s01 = load4d(r0 + j);
            const __m256d s02 = load4d(r0 + j + 1);
            const __m256d s10 = load4d(r1 + j - 1);
            const __m256d s12 = load4d(r1 + j + 1);
            const __m256d s20 = load4d(r2 + j - 1);
            const __m256d s21 = load4d(r2 + j);
            const __m256d s22 = load4d(r2 + j + 1);

            __m256d t = _mm256_add_pd(s00, _mm256_mul_pd(four, s01));
            t = _mm256_add_pd(t, s02);
            t = _mm256_sub_pd(t, s20);
            t = _mm256_sub_pd(t, _mm256_mul_pd(four, s21));
            t = _mm256_sub_pd(t, s22);
            store4f(bx + base + j, _mm256_mul_pd(t, third));

            t = _mm256_sub_pd(zero, s00);
            t = _mm256_add_pd(t, s02);
            t = _mm256_sub_pd(t, _mm256_mul_pd(four, s10));
            t = _mm256_add_pd(t, _mm256_mul_pd(four, s12));
            t = _mm256_sub_pd(t, s20);
            t = _mm256_add_pd(t, s22);
            store4f(by + base + j, _mm256_mul_pd(t, third));

            t = _mm256_sub_pd(zero, s00);
            t = _mm256_add_pd(t, s02);
            t = _mm256_sub_pd(t, _mm256_mul_pd(two, s10));
            t = _mm256_add_pd(t, _mm256_mul_pd(two, s12));
            t = _mm256_sub_pd(t, s20);
            t = _mm256_add_pd(t, s22);
            store4f(gx + base + j, t);

            t = _mm256_sub_pd(zero, s00);
            t = _mm256_sub_pd(t, _mm256_mul_pd(two, s01));
            t = _mm256_sub_pd(t, s02);
            t = _mm256_add_pd(t, s20);
            t = _mm256_add_pd(t, _mm256_mul_pd(two, s21));
            t = _mm256_add_pd(t, s22);
            store4f(gy + base + j, t);
        }
        for (; j < width; ++j) {
            d::reynolds_terms_px(delta, width, height, border, i, j, &bx[base + j],
                                 &by[base + j], &gx[base + j], &gy[base + j]);
        }
    }
}

void box_combine_avx2(const float* bx, const float* by, const float* gx,
                      const float* gy, int width, int height, BorderPolicy border,
                      float* u_raw, float* v_raw) {
    for (int i = 0; i < height; ++i) {
        const std::size_t base = static_cast<std::size_t>(i) * width;
        if (i == 0 || i == height - 1 || width < 6) {
            for (int j = 0; j < width; ++j) {
                d::box_combine_px(bx, by, gx, gy, width, height, border, i, j,
                                  &u_raw[base + j], &v_raw[base + j]);
            }
            continue;
        }
        const float* gx0 = gx + base - width;
        const float* gx1 = gx + base;
        const float* gx2 = gx + base + width;
        const float* gy0 = gy + base - width;
        const float* gy1 = gy + base;
        const float* gy2 = gy + base + width;

        d::box_combine_px(bx, by, gx, gy, width, height, border, i, 0, &u_raw[base],
                          &v_raw[base]);
        int j = 1;
        for (; j + 3 <= width - 2; j += 4) {
            __m256d sgx = _mm256_add_pd(load4d(gx0 + j - 1), load4d(gx0 + j));
            sgx = _mm256_add_pd(sgx, load4d(gx0 + j + 1));
            sgx = _mm256_add_pd(sgx, load4d(gx1 + j - 1));
            sgx = _mm256_add_pd(sgx, load4d(gx1 + j));
            sgx = _mm256_add_pd(sgx, load4d(gx1 + j + 1));
            sgx = _mm256_add_pd(sgx, load4d(gx2 + j - 1));
            sgx = _mm256_add_pd(sgx, load4d(gx2 + j));
            sgx = _mm256_add_pd(sgx, load4d(gx2 + j + 1));

            __m256d sgy = _mm256_add_pd(load4d(gy0 + j - 1), load4d(gy0 + j));
            sgy = _mm256_add_pd(sgy, load4d(gy0 + j + 1));
            sgy = _mm256_add_pd(sgy, load4d(gy1 + j - 1));
            sgy = _mm256_add_pd(sgy, load4d(gy1 + j));
            sgy = _mm256_add_pd(sgy, load4d(gy1 + j + 1));
            sgy = _mm256_add_pd(sgy, load4d(gy2 + j - 1));
            sgy = _mm256_add_pd(sgy, load4d(gy2 + j));
            sgy = _mm256_add_pd(sgy, load4d(gy2 + j + 1));

            // float32 at the stage boundary, then the combine
            const __m256d sgx_f = _mm256_cvtps_pd(_mm256_cvtpd_ps(sgx));
            const __m256d sgy_f = _mm256_cvtps_pd(_mm256_cvtpd_ps(sgy));
            store4f(u_raw + base + j, _mm256_sub_pd(sgy_f, load4d(by + base + j)));
            store4f(v_raw + base + j, _mm256_sub_pd(load4d(bx + base + j), sgx_f));
        }
        for (; j < width; ++j) {
            d::box_combine_px(bx, by, gx, gy, width, height, border, i, j,
                              &u_raw[base + j], &v_raw[base + j]);
        }
    }
}

void magnitude_avx2(const float* u, const float* v, std::size_t count, float* dst) {
    std::size_t p = 0;
    for (; p + 4 <= count; p += 4) {
        const __m256d ud = load4d(u + p);
        const __m256d vd = load4d(v + p);
        store4f(dst + p, _mm256_sqrt_pd(
                             _mm256_add_pd(_mm256_mul_pd(ud, ud), _mm256_mul_pd(vd, vd))));
    }
    for (; p < count; ++p) dst[p] = d::magnitude_px(u[p], v[p]);
}

void quantize_bytes_avx2(const float* src, std::size_t count, double scale,
                         bool clamp_input, std::uint8_t* dst) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d v255 = _mm256_set1_pd(255.0);
    const __m256d scale_v = _mm256_set1_pd(scale);
    std::size_t p = 0;
    for (; p + 8 <= count; p += 8) {
        __m256d d0 = load4d(src + p);
        __m256d d1 = load4d(src + p + 4);
        if (clamp_input) {
            d0 = _mm256_min_pd(_mm256_max_pd(d0, zero), v255);
            d1 = _mm256_min_pd(_mm256_max_pd(d1, zero), v255);
        }
        d0 = _mm256_mul_pd(d0, scale_v);
        d1 = _mm256_mul_pd(d1, scale_v);
        // clamp in the double domain, then convert with ties-to-even
        d0 = _mm256_min_pd(_mm256_max_pd(d0, zero), v255);
        d1 = _mm256_min_pd(_mm256_max_pd(d1, zero), v255);
        const __m128i i0 = _mm256_cvtpd_epi32(d0);
        const __m128i i1 = _mm256_cvtpd_epi32(d1);
        const __m128i packed16 = _mm_packs_epi32(i0, i1);
        const __m128i packed8 = _mm_packus_epi16(packed16, packed16);
        _mm_storel_epi64(reinterpret_cast<__m128i*>(dst + p), packed8);
    }
    for (; p < count; ++p) dst[p] = d::quantize_px(src[p], scale, clamp_input);
}

}  // namespace

const Ops* avx2_table() {
    static const Ops table{
        "avx2",        stencil3x3_avx2,     blur_avx2,
        subtract_avx2, scale_add_avx2,      central_gradient_avx2,
        lk_flow_avx2,  reynolds_terms_avx2, box_combine_avx2,
        magnitude_avx2, quantize_bytes_avx2,
    };
    return &table;
}

}  // namespace rflow::kernels

#else

namespace rflow::kernels {
const Ops* avx2_table() { return nullptr; }
}  // namespace rflow::kernels

#endif  // __AVX2__
