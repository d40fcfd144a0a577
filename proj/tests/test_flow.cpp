#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstring>
#include <random>

#include "oracles.hpp"
#include "rflow/flow.hpp"
#include "rflow/synth.hpp"

using namespace rflow;

TEST_CASE("spatial_gradient on constants and ramps") {
    const Frame constant(8, 8, 9.5f);
    auto [cx, cy] = spatial_gradient(constant);
    for (float v : cx.data) CHECK(v == 0.0f);
    for (float v : cy.data) CHECK(v == 0.0f);

    Frame ramp(10, 6);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 10; ++j) ramp.at(i, j) = static_cast<float>(j);
    }
    auto [rx, ry] = spatial_gradient(ramp);
    for (int i = 0; i < 6; ++i) {
        for (int j = 1; j < 9; ++j) CHECK(rx.at(i, j) == 1.0f);
    }
    for (float v : ry.data) CHECK(v == 0.0f);
}

TEST_CASE("spatial_gradient matches the naive reference") {
    std::mt19937_64 rng(31);
    const Frame frame = oracle::random_frame(23, 17, rng);
    auto [gx, gy] = spatial_gradient(frame);
    auto [ox, oy] = oracle::spatial_gradient(frame);
    CHECK(oracle::max_abs_diff(gx, ox) <= 1e-6);
    CHECK(oracle::max_abs_diff(gy, oy) <= 1e-6);
    CHECK_THROWS_AS(spatial_gradient(Frame(2, 2)), std::invalid_argument);
}

TEST_CASE("lucas_kanade trivial nullities") {
    std::mt19937_64 rng(32);
    const Frame frame = oracle::random_frame(20, 15, rng);

    const FlowField same = lucas_kanade(frame, frame);
    for (std::size_t p = 0; p < same.pixel_count(); ++p) {
        CHECK(same.u[p] == 0.0f);
        CHECK(same.v[p] == 0.0f);
    }

    const FlowField flat = lucas_kanade(Frame(12, 12, 5.0f), Frame(12, 12, 9.0f));
    for (std::size_t p = 0; p < flat.pixel_count(); ++p) {
        CHECK(flat.u[p] == 0.0f);
        CHECK(flat.v[p] == 0.0f);
    }
}

TEST_CASE("lucas_kanade argument validation") {
    CHECK_THROWS_AS(lucas_kanade(Frame(8, 8), Frame(9, 8)), std::invalid_argument);
    LKConfig even_window;
    even_window.window = 4;
    CHECK_THROWS_AS(lucas_kanade(Frame(8, 8), Frame(8, 8), even_window),
                    std::invalid_argument);
    LKConfig big_window;
    big_window.window = 9;
    CHECK_THROWS_AS(lucas_kanade(Frame(7, 7), Frame(7, 7), big_window),
                    std::invalid_argument);
}

TEST_CASE("lucas_kanade matches the naive reference") {
    std::mt19937_64 rng(33);
    for (int window : {3, 5}) {
        const Frame current = oracle::random_frame(32, 24, rng);
        const Frame next = oracle::random_frame(32, 24, rng);
        LKConfig config;
        config.window = window;
        const FlowField got = lucas_kanade(current, next, config);
        const FlowField want = oracle::lucas_kanade(current, next, window, config.eigen_threshold);
        CHECK(oracle::max_abs_diff(got, want) <= 1e-6);
    }
}

TEST_CASE("lucas_kanade recovers a one-pixel translation") {
    synth::SequenceSpec spec;
    spec.frame_count = 2;
    const synth::Sequence seq = synth::generate(spec);
    const FlowField flow = lucas_kanade(seq.frames[0], seq.frames[1]);
    const synth::EpeStats stats = synth::endpoint_error(flow, seq.truth, 0);
    CHECK(stats.count > 0);
    CHECK(stats.median <= 0.5);
}

TEST_CASE("boundary_terms") {
    const Frame zero(9, 9, 0.0f);
    auto [zx, zy] = boundary_terms(zero);
    for (float v : zx.data) CHECK(v == 0.0f);
    for (float v : zy.data) CHECK(v == 0.0f);

    const Frame constant(9, 9, 4.25f);
    auto [cx, cy] = boundary_terms(constant);
    for (float v : cx.data) CHECK(v == 0.0f);
    for (float v : cy.data) CHECK(v == 0.0f);

    // Impulse response of the correlation is the flipped kernel.
    Frame impulse(5, 5, 0.0f);
    impulse.at(2, 2) = 1.0f;
    auto [ix, iy] = boundary_terms(impulse);
    const Frame ox = oracle::stencil3x3(impulse, stencils::simpson_x, BorderPolicy::replicate);
    const Frame oy = oracle::stencil3x3(impulse, stencils::simpson_y, BorderPolicy::replicate);
    CHECK(oracle::max_abs_diff(ix, ox) <= 1e-6);
    CHECK(oracle::max_abs_diff(iy, oy) <= 1e-6);
    for (int r = -1; r <= 1; ++r) {
        for (int c = -1; c <= 1; ++c) {
            const double coeff = stencils::simpson_x.coefficients[(r + 1) * 3 + (c + 1)] / 3.0;
            CHECK(ix.at(2 - r, 2 - c) == doctest::Approx(coeff).epsilon(1e-6));
        }
    }
}

TEST_CASE("domain_terms composes Sobel then box") {
    const Frame constant(7, 7, -2.0f);
    auto [cx, cy] = domain_terms(constant);
    for (float v : cx.data) CHECK(v == 0.0f);
    for (float v : cy.data) CHECK(v == 0.0f);

    std::mt19937_64 rng(34);
    const Frame delta = oracle::random_frame(7, 7, rng);
    auto [dx, dy] = domain_terms(delta);
    const Frame want_x = oracle::stencil3x3(
        oracle::stencil3x3(delta, stencils::sobel_x, BorderPolicy::replicate), stencils::box,
        BorderPolicy::replicate);
    const Frame want_y = oracle::stencil3x3(
        oracle::stencil3x3(delta, stencils::sobel_y, BorderPolicy::replicate), stencils::box,
        BorderPolicy::replicate);
    CHECK(oracle::max_abs_diff(dx, want_x) <= 1e-6);
    CHECK(oracle::max_abs_diff(dy, want_y) <= 1e-6);
}

TEST_CASE("reynolds_flow nullities") {
    const FlowField zero = reynolds_flow(Frame(11, 8, 0.0f));
    for (std::size_t p = 0; p < zero.pixel_count(); ++p) {
        CHECK(zero.u[p] == 0.0f);
        CHECK(zero.v[p] == 0.0f);
    }
    // Uniform global brightness change: all four stencils annihilate it.
    const FlowField uniform = reynolds_flow(Frame(11, 8, 3.75f));
    for (std::size_t p = 0; p < uniform.pixel_count(); ++p) {
        CHECK(uniform.u[p] == 0.0f);
        CHECK(uniform.v[p] == 0.0f);
    }
}

TEST_CASE("reynolds_flow is linear in the frame difference") {
    std::mt19937_64 rng(35);
    const Frame delta = oracle::random_frame(24, 18, rng, -64.0f, 64.0f);
    const FlowField base = reynolds_flow(delta);
    for (double alpha : {-2.0, 0.5, 10.0}) {
        Frame scaled(delta.width, delta.height);
        for (std::size_t p = 0; p < delta.pixel_count(); ++p) {
            scaled.data[p] = static_cast<float>(alpha * delta.data[p]);
        }
        const FlowField got = reynolds_flow(scaled);
        double scale = 0.0;
        for (std::size_t p = 0; p < base.pixel_count(); ++p) {
            scale = std::max({scale, std::fabs(alpha * base.u[p]), std::fabs(alpha * base.v[p])});
        }
        scale = std::max(scale, 1e-30);
        for (std::size_t p = 0; p < base.pixel_count(); ++p) {
            CHECK(std::fabs(got.u[p] - alpha * base.u[p]) <= 1e-5 * scale);
            CHECK(std::fabs(got.v[p] - alpha * base.v[p]) <= 1e-5 * scale);
        }
    }
}

TEST_CASE("reynolds_flow matches the naive reference") {
    std::mt19937_64 rng(36);
    const Frame delta = oracle::random_frame(21, 19, rng, -128.0f, 128.0f);
    ReynoldsConfig config;
    const FlowField got = reynolds_flow(delta, config);
    const FlowField want = oracle::reynolds_flow(delta, config.sigma, config.border);
    CHECK(oracle::max_abs_diff(got, want) <= 1e-6);

    ReynoldsConfig bad;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(reynolds_flow(delta, bad), std::invalid_argument);
    CHECK_THROWS_AS(reynolds_flow(Frame(2, 3), config), std::invalid_argument);
}

TEST_CASE("combined_flow") {
    std::mt19937_64 rng(37);
    const FlowField a = oracle::random_flow(13, 9, rng);
    const FlowField zero(13, 9);

    const FlowField right = combined_flow(a, zero);
    CHECK(oracle::max_abs_diff(right, a) == 0.0);
    const FlowField left = combined_flow(zero, a);
    CHECK(oracle::max_abs_diff(left, a) == 0.0);

    const FlowField b = oracle::random_flow(13, 9, rng);
    const FlowField sum = combined_flow(a, b);
    for (std::size_t p = 0; p < sum.pixel_count(); ++p) {
        CHECK(sum.u[p] == doctest::Approx(a.u[p] + b.u[p]).epsilon(1e-7));
        CHECK(sum.v[p] == doctest::Approx(a.v[p] + b.v[p]).epsilon(1e-7));
    }
    CHECK_THROWS_AS(combined_flow(a, FlowField(5, 5)), std::invalid_argument);
}

TEST_CASE("flow_magnitude") {
    FlowField flow(6, 5);
    const Frame zero_mag = flow_magnitude(flow);
    for (float v : zero_mag.data) CHECK(v == 0.0f);

    for (std::size_t p = 0; p < flow.pixel_count(); ++p) {
        flow.u[p] = 3.0f;
        flow.v[p] = 4.0f;
    }
    const Frame mag = flow_magnitude(flow);
    for (float v : mag.data) CHECK(v == 5.0f);

    std::mt19937_64 rng(38);
    const FlowField random = oracle::random_flow(11, 7, rng);
    const Frame got = flow_magnitude(random);
    for (std::size_t p = 0; p < random.pixel_count(); ++p) {
        const double want = std::sqrt(static_cast<double>(random.u[p]) * random.u[p] +
                                      static_cast<double>(random.v[p]) * random.v[p]);
        CHECK(std::fabs(got.data[p] - want) <= 1e-6 * std::max(1.0, want));
    }
}

TEST_CASE("flow_angle quadrants") {
    FlowField flow(4, 1);
    flow.u = {1.0f, 0.0f, -1.0f, 0.0f};
    flow.v = {0.0f, 1.0f, 0.0f, 0.0f};
    const Frame angle = flow_angle(flow);
    CHECK(angle.data[0] == 0.0f);
    CHECK(angle.data[1] == 90.0f);
    CHECK(angle.data[2] == 180.0f);
    CHECK(angle.data[3] == 0.0f);  // zero vector pinned to 0
}

TEST_CASE("identical frames yield exact zero through both estimators") {
    synth::SequenceSpec spec;
    spec.pattern = synth::Pattern::random_smooth;
    spec.motion = synth::Motion::translation(0.0, 0.0);
    spec.frame_count = 2;
    spec.width = 48;
    spec.height = 40;
    const synth::Sequence seq = synth::generate(spec);
    REQUIRE(seq.frames[0].data == seq.frames[1].data);

    const FlowField v_o = lucas_kanade(seq.frames[0], seq.frames[1]);
    const FlowField v_r = reynolds_flow(frame_delta(seq.frames[0], seq.frames[1]));
    for (std::size_t p = 0; p < v_o.pixel_count(); ++p) {
        CHECK(v_o.u[p] == 0.0f);
        CHECK(v_o.v[p] == 0.0f);
        CHECK(v_r.u[p] == 0.0f);
        CHECK(v_r.v[p] == 0.0f);
    }
}

TEST_CASE("flow determinism across repeated runs") {
    std::mt19937_64 rng(39);
    const Frame current = oracle::random_frame(40, 30, rng);
    const Frame next = oracle::random_frame(40, 30, rng);
    const FlowField a = lucas_kanade(current, next);
    const FlowField b = lucas_kanade(current, next);
    CHECK(std::memcmp(a.u.data(), b.u.data(), a.pixel_count() * sizeof(float)) == 0);
    CHECK(std::memcmp(a.v.data(), b.v.data(), a.pixel_count() * sizeof(float)) == 0);

    const Frame delta = frame_delta(current, next);
    const FlowField ra = reynolds_flow(delta);
    const FlowField rb = reynolds_flow(delta);
    CHECK(std::memcmp(ra.u.data(), rb.u.data(), ra.pixel_count() * sizeof(float)) == 0);
    CHECK(std::memcmp(ra.v.data(), rb.v.data(), ra.pixel_count() * sizeof(float)) == 0);
}
