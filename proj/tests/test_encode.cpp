#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rflow/encode.hpp"
#include "rflow/io.hpp"
#include "rflow/synth.hpp"

using namespace rflow;

namespace {

FlowField uniform_flow(int w, int h, float u, float v) {
    FlowField flow(w, h);
    std::fill(flow.u.begin(), flow.u.end(), u);
    std::fill(flow.v.begin(), flow.v.end(), v);
    return flow;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("encode_hsv of the zero field is black under any policy") {
    const FlowField zero(9, 7);
    for (const NormalizationPolicy& norm :
         {NormalizationPolicy::per_frame_max(), NormalizationPolicy::fixed(2.0)}) {
        const Image8 image = encode_hsv(zero, norm);
        for (std::uint8_t b : image.data) CHECK(b == 0);
    }
}

TEST_CASE("encode_hsv hue anchors") {
    // (1, 0): angle 0, hue byte 0, full value under per-frame max -> pure red.
    const Image8 red = encode_hsv(uniform_flow(4, 3, 1.0f, 0.0f));
    for (int p = 0; p < 12; ++p) {
        CHECK(red.data[p * 3] == 255);
        CHECK(red.data[p * 3 + 1] == 0);
        CHECK(red.data[p * 3 + 2] == 0);
    }
    // (0, 1): angle 90, hue byte 45 -> (128, 255, 0) from the piecewise formula.
    const Image8 chartreuse = encode_hsv(uniform_flow(4, 3, 0.0f, 1.0f));
    for (int p = 0; p < 12; ++p) {
        CHECK(std::abs(chartreuse.data[p * 3] - 128) <= 1);
        CHECK(std::abs(chartreuse.data[p * 3 + 1] - 255) <= 1);
        CHECK(std::abs(chartreuse.data[p * 3 + 2] - 0) <= 1);
    }
}

TEST_CASE("encode_plus channel semantics") {
    const FlowField zero(6, 5);
    const Image8 black = encode_plus(zero, zero, Frame(6, 5, 0.0f));
    for (std::uint8_t b : black.data) CHECK(b == 0);

    const Image8 blue = encode_plus(zero, zero, Frame(6, 5, 200.0f));
    for (int p = 0; p < 30; ++p) {
        CHECK(blue.data[p * 3] == 0);
        CHECK(blue.data[p * 3 + 1] == 0);
        CHECK(blue.data[p * 3 + 2] == 200);
    }
    CHECK_THROWS_AS(encode_plus(zero, FlowField(4, 4), Frame(6, 5)), std::invalid_argument);
}

TEST_CASE("encode_plus: moving blob energy stays on the blob support") {
    synth::SequenceSpec spec;
    spec.width = 96;
    spec.height = 96;
    spec.frame_count = 2;
    const synth::Sequence seq = synth::generate(spec);

    const FlowField v_o = lucas_kanade(seq.frames[0], seq.frames[1]);
    const FlowField v_r = reynolds_flow(frame_delta(seq.frames[0], seq.frames[1]));
    const Image8 image = encode_plus(v_o, v_r, seq.frames[0]);

    // Support: pattern above a tiny intensity threshold, dilated generously
    // for the window, stencils, and Gaussian tails.
    const int dilate = 12;
    std::vector<std::uint8_t> support(seq.frames[0].pixel_count(), 0);
    for (int i = 0; i < spec.height; ++i) {
        for (int j = 0; j < spec.width; ++j) {
            if (seq.frames[0].at(i, j) > 0.25f) {
                for (int di = -dilate; di <= dilate; ++di) {
                    for (int dj = -dilate; dj <= dilate; ++dj) {
                        const int ii = i + di, jj = j + dj;
                        if (ii >= 0 && ii < spec.height && jj >= 0 && jj < spec.width) {
                            support[static_cast<std::size_t>(ii) * spec.width + jj] = 1;
                        }
                    }
                }
            }
        }
    }
    double r_in = 0.0, r_total = 0.0, g_in = 0.0, g_total = 0.0;
    for (std::size_t p = 0; p < support.size(); ++p) {
        const double r = image.data[p * 3];
        const double g = image.data[p * 3 + 1];
        r_total += r;
        g_total += g;
        if (support[p]) {
            r_in += r;
            g_in += g;
        }
        CHECK(image.data[p * 3 + 2] ==
              static_cast<std::uint8_t>(std::nearbyint(
                  std::clamp(static_cast<double>(seq.frames[0].data[p]), 0.0, 255.0))));
    }
    REQUIRE(r_total > 0.0);
    REQUIRE(g_total > 0.0);
    CHECK(r_in / r_total >= 0.99);
    CHECK(g_in / g_total >= 0.99);
}

TEST_CASE("encode_plus channel independence") {
    std::mt19937_64 rng(41);
    const FlowField v_o = oracle::random_flow(10, 8, rng);
    const FlowField v_r = oracle::random_flow(10, 8, rng);
    const FlowField v_r2 = oracle::random_flow(10, 8, rng);
    const Frame frame = oracle::random_frame(10, 8, rng);
    Frame frame2 = frame;
    frame2.at(3, 3) += 40.0f;

    const Image8 base = encode_plus(v_o, v_r, frame);
    const Image8 changed_g = encode_plus(v_o, v_r2, frame);
    const Image8 changed_b = encode_plus(v_o, v_r, frame2);
    bool g_differs = false;
    for (std::size_t p = 0; p < base.data.size() / 3; ++p) {
        CHECK(changed_g.data[p * 3] == base.data[p * 3]);          // R untouched
        CHECK(changed_g.data[p * 3 + 2] == base.data[p * 3 + 2]);  // B untouched
        if (changed_g.data[p * 3 + 1] != base.data[p * 3 + 1]) g_differs = true;
        CHECK(changed_b.data[p * 3] == base.data[p * 3]);
        CHECK(changed_b.data[p * 3 + 1] == base.data[p * 3 + 1]);
    }
    CHECK(g_differs);
    CHECK(changed_b.data[(3 * 10 + 3) * 3 + 2] != base.data[(3 * 10 + 3) * 3 + 2]);
}

TEST_CASE("fixed_scale normalization is monotone in magnitude") {
    std::mt19937_64 rng(42);
    const NormalizationPolicy norm = NormalizationPolicy::fixed(6.0);
    FlowField flow(64, 1);
    for (int j = 0; j < 64; ++j) {
        flow.u[j] = static_cast<float>(8.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53));
        flow.v[j] = 0.0f;
    }
    const FlowField zero(64, 1);
    const Image8 image = encode_plus(flow, zero, Frame(64, 1, 0.0f), norm);
    for (int a = 0; a < 64; ++a) {
        for (int b = 0; b < 64; ++b) {
            if (flow.u[a] >= flow.u[b]) {
                CHECK(image.data[a * 3] >= image.data[b * 3]);
            }
        }
    }
}

TEST_CASE("flo round-trip is bit-exact") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 20; ++i) {
        const int w = 1 + static_cast<int>(rng() % 17);
        const int h = 1 + static_cast<int>(rng() % 13);
        const FlowField flow = oracle::random_flow(w, h, rng, -1000.0f, 1000.0f);
        std::stringstream buffer;
        write_flo(flow, buffer);
        const FlowField back = read_flo(buffer);
        CHECK(back.width == w);
        CHECK(back.height == h);
        CHECK(back.u == flow.u);
        CHECK(back.v == flow.v);
    }
}

TEST_CASE("flo layout is exactly the Middlebury format") {
    FlowField flow(1, 1);
    std::stringstream buffer;
    write_flo(flow, buffer);
    const std::string bytes = buffer.str();
    REQUIRE(bytes.size() == 20);
    const unsigned char magic[4] = {0x50, 0x49, 0x45, 0x48};  // 202021.25f LE = "PIEH"
    for (int i = 0; i < 4; ++i) CHECK(static_cast<unsigned char>(bytes[i]) == magic[i]);
    CHECK(bytes[4] == 1);
    CHECK(bytes[8] == 1);

    std::stringstream buffer23;
    write_flo(FlowField(2, 3), buffer23);
    CHECK(buffer23.str().size() == 12 + 2 * 3 * 8);
}

TEST_CASE("flo reader rejects malformed input") {
    FlowField flow(3, 2);
    std::stringstream good;
    write_flo(flow, good);
    std::string bytes = good.str();

    std::string bad_magic = bytes;
    bad_magic[0] = 0x01;
    std::stringstream bad_magic_stream(bad_magic);
    CHECK_THROWS_WITH_AS(read_flo(bad_magic_stream), "flo: bad magic", std::runtime_error);

    std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_WITH_AS(read_flo(truncated), "flo: truncated payload", std::runtime_error);

    std::string zero_dims = bytes;
    zero_dims[4] = 0;
    std::stringstream zero_stream(zero_dims);
    CHECK_THROWS_WITH_AS(read_flo(zero_stream), "flo: non-positive dimensions",
                         std::runtime_error);
}

TEST_CASE("png round-trips exactly") {
    const std::string rgb_path = temp_path("rflow_test_rgb.png");
    std::mt19937_64 rng(44);
    Image8 rgb(13, 9, 3);
    for (std::uint8_t& b : rgb.data) b = static_cast<std::uint8_t>(rng() % 256);
    write_png(rgb, rgb_path);
    const Image8 back = read_png(rgb_path);
    CHECK(back.channels == 3);
    CHECK(back.data == rgb.data);
    std::remove(rgb_path.c_str());

    const std::string black_path = temp_path("rflow_test_black.png");
    write_png(Image8(1, 1, 3), black_path);
    const Image8 black = read_png(black_path);
    CHECK(black.width == 1);
    CHECK(black.data == std::vector<std::uint8_t>({0, 0, 0}));
    std::remove(black_path.c_str());

    const std::string gray_path = temp_path("rflow_test_gray.png");
    write_png(Frame(3, 3, 127.6f), gray_path);
    const Image8 gray = read_png(gray_path);
    CHECK(gray.channels == 1);
    CHECK(gray.data[0] == 128);  // round half away from zero
    std::remove(gray_path.c_str());
}

TEST_CASE("pgm round-trips through writer and reader") {
    const std::string path = temp_path("rflow_test.pgm");
    std::mt19937_64 rng(45);
    Image8 gray(7, 5, 1);
    for (std::uint8_t& b : gray.data) b = static_cast<std::uint8_t>(rng() % 256);
    write_pgm(gray, path);
    const Image8 back = read_pgm(path);
    CHECK(back.width == 7);
    CHECK(back.height == 5);
    CHECK(back.data == gray.data);
    std::remove(path.c_str());
}
