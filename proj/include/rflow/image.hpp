#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace rflow {

// How stencil and blur taps outside the image are resolved.
// replicate: clamp to the nearest edge pixel (default).
// reflect:   mirror about the edge pixel, edge not repeated (-1 -> 1).
// zero:      out-of-range samples contribute 0.
enum class BorderPolicy { replicate, reflect, zero };

// Single-channel float32 pixel buffer, row-major. Loaded images live in
// [0, 255]; derived fields (frame differences, stencil responses) are
// unrestricted but must stay finite.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    Frame() = default;
    Frame(int w, int h, float fill = 0.0f);

    float& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
    float at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    bool same_size(const Frame& other) const {
        return width == other.width && height == other.height;
    }
};

// 8-bit image, 1 (grayscale) or 3 (RGB, interleaved) channels, row-major.
struct Image8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    Image8() = default;
    Image8(int w, int h, int c);

    std::size_t byte_count() const {
        return static_cast<std::size_t>(width) * height * channels;
    }
};

// Fixed 3x3 correlation stencil. The weighted sum over the neighborhood is
// scaled by `normalization` once, after accumulation.
struct Kernel3 {
    std::array<double, 9> coefficients{};  // row-major, coefficients[r*3 + c]
    double normalization = 1.0;

    double coefficient_sum() const {
        double s = 0.0;
        for (double c : coefficients) s += c;
        return s;
    }
};

namespace stencils {

// Simpson boundary stencils, 1/3-scaled +-[1,4,1] rows/columns.
inline constexpr Kernel3 simpson_x{{1, 4, 1, 0, 0, 0, -1, -4, -1}, 1.0 / 3.0};
inline constexpr Kernel3 simpson_y{{-1, 0, 1, -4, 0, 4, -1, 0, 1}, 1.0 / 3.0};

// Sobel gradient stencils.
inline constexpr Kernel3 sobel_x{{-1, 0, 1, -2, 0, 2, -1, 0, 1}, 1.0};
inline constexpr Kernel3 sobel_y{{-1, -2, -1, 0, 0, 0, 1, 2, 1}, 1.0};

// Unnormalized 3x3 aggregation (coefficient sum 9, normalization 1).
inline constexpr Kernel3 box{{1, 1, 1, 1, 1, 1, 1, 1, 1}, 1.0};

inline constexpr Kernel3 identity{{0, 0, 0, 0, 1, 0, 0, 0, 0}, 1.0};

}  // namespace stencils

// Discrete Gaussian kernel description. radius defaults to ceil(3*sigma);
// pass an explicit radius to override.
struct GaussianSpec {
    double sigma = 1.0;
    int radius = 0;  // 0 = derive from sigma

    GaussianSpec() = default;
    explicit GaussianSpec(double s, int r = 0);

    int effective_radius() const;
};

// Normalized 1-D taps for a GaussianSpec, length 2*radius+1, sum 1 within
// 1e-12.
std::vector<double> gaussian_taps(const GaussianSpec& spec);

// BT.601 luma of a 3-channel 8-bit image, as float32 in [0, 255].
Frame to_grayscale(const Image8& rgb);

// Correlation (no kernel flip) of the 3x3 neighborhood with the kernel,
// scaled by the kernel normalization. Output has the input dimensions.
Frame apply_kernel3(const Frame& frame, const Kernel3& kernel,
                    BorderPolicy border = BorderPolicy::replicate);

// Separable Gaussian smoothing, horizontal then vertical. The intermediate
// pass is kept in double so the result matches a direct 2-D evaluation.
Frame gaussian_blur(const Frame& frame, const GaussianSpec& spec,
                    BorderPolicy border = BorderPolicy::replicate);

// next - current, per pixel.
Frame frame_delta(const Frame& current, const Frame& next);

}  // namespace rflow
