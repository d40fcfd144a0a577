#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rflow/image.hpp"

using namespace rflow;

namespace {

Image8 solid_rgb(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Image8 image(w, h, 3);
    for (int p = 0; p < w * h; ++p) {
        image.data[p * 3] = r;
        image.data[p * 3 + 1] = g;
        image.data[p * 3 + 2] = b;
    }
    return image;
}

}  // namespace

TEST_CASE("to_grayscale BT.601 luma") {
    CHECK(to_grayscale(solid_rgb(3, 3, 255, 255, 255)).at(1, 1) == doctest::Approx(255.0).epsilon(1e-9));
    CHECK(to_grayscale(solid_rgb(3, 3, 0, 0, 0)).at(1, 1) == 0.0f);
    CHECK(to_grayscale(solid_rgb(3, 3, 255, 0, 0)).at(2, 2) ==
          doctest::Approx(76.245).epsilon(1e-6));

    Image8 gray(4, 4, 1);
    CHECK_THROWS_AS(to_grayscale(gray), std::invalid_argument);
    CHECK_THROWS_AS(to_grayscale(solid_rgb(2, 5, 1, 2, 3)), std::invalid_argument);
}

TEST_CASE("named kernels have the stated coefficient sums") {
    CHECK(stencils::simpson_x.coefficient_sum() == 0.0);
    CHECK(stencils::simpson_y.coefficient_sum() == 0.0);
    CHECK(stencils::sobel_x.coefficient_sum() == 0.0);
    CHECK(stencils::sobel_y.coefficient_sum() == 0.0);
    CHECK(stencils::box.coefficient_sum() == 9.0);
    CHECK(stencils::box.normalization == 1.0);
}

TEST_CASE("apply_kernel3 annihilates constants with zero-sum kernels") {
    const Frame constant(7, 5, 7.0f);
    for (const Kernel3& k :
         {stencils::simpson_x, stencils::simpson_y, stencils::sobel_x, stencils::sobel_y}) {
        const Frame out = apply_kernel3(constant, k, BorderPolicy::replicate);
        for (float v : out.data) CHECK(v == 0.0f);
    }
}

TEST_CASE("apply_kernel3 identity kernel returns the input") {
    std::mt19937_64 rng(21);
    const Frame frame = oracle::random_frame(9, 6, rng);
    const Frame out = apply_kernel3(frame, stencils::identity);
    CHECK(oracle::max_abs_diff(frame, out) == 0.0);
}

TEST_CASE("apply_kernel3 matches the naive reference") {
    std::mt19937_64 rng(22);
    const Frame frame = oracle::random_frame(5, 5, rng);
    for (BorderPolicy border :
         {BorderPolicy::replicate, BorderPolicy::reflect, BorderPolicy::zero}) {
        const Frame got = apply_kernel3(frame, stencils::sobel_x, border);
        const Frame want = oracle::stencil3x3(frame, stencils::sobel_x, border);
        CHECK(oracle::max_abs_diff(got, want) <= 1e-6);
    }
}

TEST_CASE("apply_kernel3 rejects too-small frames") {
    const Frame tiny(2, 2, 1.0f);
    CHECK_THROWS_AS(apply_kernel3(tiny, stencils::box), std::invalid_argument);
}

TEST_CASE("apply_kernel3 is linear") {
    std::mt19937_64 rng(23);
    const Frame a = oracle::random_frame(16, 12, rng);
    const Frame b = oracle::random_frame(16, 12, rng);
    const double alpha = 1.7, beta = -0.4;

    Frame mixed(16, 12);
    for (std::size_t p = 0; p < mixed.pixel_count(); ++p) {
        mixed.data[p] = static_cast<float>(alpha * a.data[p] + beta * b.data[p]);
    }
    for (const Kernel3& k :
         {stencils::simpson_x, stencils::simpson_y, stencils::sobel_x, stencils::sobel_y}) {
        const Frame lhs = apply_kernel3(mixed, k);
        const Frame ka = apply_kernel3(a, k);
        const Frame kb = apply_kernel3(b, k);
        double scale = 1e-6;
        for (float v : lhs.data) scale = std::max(scale, std::fabs(static_cast<double>(v)));
        for (std::size_t p = 0; p < lhs.pixel_count(); ++p) {
            const double rhs = alpha * ka.data[p] + beta * kb.data[p];
            CHECK(std::fabs(lhs.data[p] - rhs) <= 1e-6 * scale);
        }
    }
}

TEST_CASE("gaussian taps normalize and pick radius ceil(3 sigma)") {
    const GaussianSpec spec(1.5);
    CHECK(spec.effective_radius() == 5);
    const auto taps = gaussian_taps(spec);
    CHECK(taps.size() == 11);
    double sum = 0.0;
    for (double t : taps) sum += t;
    CHECK(std::fabs(sum - 1.0) <= 1e-12);

    CHECK(GaussianSpec(0.8, 7).effective_radius() == 7);
    CHECK_THROWS_AS(GaussianSpec(-1.0), std::invalid_argument);

    GaussianSpec bad;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(gaussian_blur(Frame(8, 8, 1.0f), bad), std::invalid_argument);
}

TEST_CASE("gaussian_blur preserves constant frames") {
    const Frame constant(17, 11, 42.0f);
    for (double sigma : {0.6, 1.0, 2.3}) {
        const Frame out = gaussian_blur(constant, GaussianSpec(sigma));
        for (float v : out.data) CHECK(std::fabs(v - 42.0) <= 1e-9);
    }
}

TEST_CASE("gaussian_blur of a centered impulse matches direct 2-D evaluation") {
    Frame impulse(31, 31, 0.0f);
    impulse.at(15, 15) = 1.0f;
    const GaussianSpec spec(1.0);
    const Frame got = gaussian_blur(impulse, spec);
    const Frame want = oracle::gaussian_blur(impulse, 1.0, 0, BorderPolicy::replicate);
    CHECK(oracle::max_abs_diff(got, want) <= 1e-6);

    // Peak equals the center weight of the normalized 2-D kernel.
    const auto taps = gaussian_taps(spec);
    const double peak = taps[spec.effective_radius()] * taps[spec.effective_radius()];
    CHECK(got.at(15, 15) == doctest::Approx(peak).epsilon(1e-9));

    double total = 0.0;
    for (float v : got.data) total += v;
    CHECK(std::fabs(total - 1.0) <= 1e-6);
}

TEST_CASE("gaussian_blur conserves mass on constant-padded content") {
    std::mt19937_64 rng(24);
    const GaussianSpec spec(1.2);
    const int r = spec.effective_radius();
    Frame frame(40, 34, 55.0f);
    // random interior, constant margin of width 2r
    for (int i = 2 * r; i < frame.height - 2 * r; ++i) {
        for (int j = 2 * r; j < frame.width - 2 * r; ++j) {
            frame.at(i, j) = static_cast<float>(255.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53));
        }
    }
    const Frame out = gaussian_blur(frame, spec, BorderPolicy::replicate);
    double before = 0.0, after = 0.0;
    for (float v : frame.data) before += v;
    for (float v : out.data) after += v;
    CHECK(std::fabs(after - before) <= 1e-6 * std::fabs(before));
}

TEST_CASE("frame_delta") {
    const Frame current(6, 4, 10.0f);
    const Frame next(6, 4, 13.0f);
    const Frame delta = frame_delta(current, next);
    for (float v : delta.data) CHECK(v == 3.0f);

    const Frame same_delta = frame_delta(current, current);
    for (float v : same_delta.data) CHECK(v == 0.0f);

    std::mt19937_64 rng(25);
    const Frame a = oracle::random_frame(9, 7, rng);
    const Frame b = oracle::random_frame(9, 7, rng);
    const Frame d = frame_delta(a, b);
    for (std::size_t p = 0; p < d.pixel_count(); ++p) {
        CHECK(d.data[p] == b.data[p] - a.data[p]);
    }

    CHECK_THROWS_AS(frame_delta(Frame(3, 3), Frame(4, 3)), std::invalid_argument);
}

TEST_CASE("zero-sum kernels stay zero at replicate borders of constant frames") {
    const Frame constant(5, 5, -3.25f);
    const Frame out = apply_kernel3(constant, stencils::simpson_y, BorderPolicy::replicate);
    for (float v : out.data) CHECK(v == 0.0f);
}
