#pragma once

#include <utility>

#include "rflow/image.hpp"

namespace rflow {

// Dense two-channel velocity field, pixels/frame. u is the horizontal
// (column) component, v the vertical (row) component, y increasing downward.
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<float> u;
    std::vector<float> v;

    FlowField() = default;
    FlowField(int w, int h);

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    bool same_size(const FlowField& other) const {
        return width == other.width && height == other.height;
    }
};

// Windowed least-squares flow parameters. The window is the side length of
// the aggregation patch; eigen_threshold is the minimum smaller eigenvalue
// of the structure tensor for a pixel to receive nonzero flow (stated on the
// [0, 255] intensity scale).
struct LKConfig {
    int window = 3;
    double eigen_threshold = 1e-4;
};

struct ReynoldsConfig {
    double sigma = 1.0;
    BorderPolicy border = BorderPolicy::replicate;
};

// Central-difference gradients (f_x, f_y) with replicate borders.
std::pair<Frame, Frame> spatial_gradient(const Frame& frame);

// Windowed least-squares optical flow between two frames. Per pixel, the
// structure tensor and mismatch vector are aggregated over the window
// (samples clamped to the frame), and the 2x2 system is solved where the
// smaller eigenvalue clears the threshold; other pixels get (0, 0).
FlowField lucas_kanade(const Frame& current, const Frame& next, const LKConfig& config = {});

// Simpson-rule boundary responses ((delta_f_b)_x, (delta_f_b)_y) of a frame
// difference.
std::pair<Frame, Frame> boundary_terms(const Frame& delta,
                                       BorderPolicy border = BorderPolicy::replicate);

// Box-aggregated Sobel responses ((grad delta_f_w)_x, (grad delta_f_w)_y):
// Sobel stencil first, then the unnormalized 3x3 box, as two stages.
std::pair<Frame, Frame> domain_terms(const Frame& delta,
                                     BorderPolicy border = BorderPolicy::replicate);

// Irrotational residual flow of a frame difference:
//   u = G * (-(delta_f_b)_y + (grad delta_f_w)_y)
//   v = G * ( (delta_f_b)_x - (grad delta_f_w)_x)
// with G the Gaussian smoothing operator of the config.
FlowField reynolds_flow(const Frame& delta, const ReynoldsConfig& config = {});

// Channel-wise sum.
FlowField combined_flow(const FlowField& v_o, const FlowField& v_r);

// Per-pixel sqrt(u^2 + v^2).
Frame flow_magnitude(const FlowField& flow);

// Per-pixel atan2(v, u) in degrees, [0, 360); the zero vector maps to 0.
Frame flow_angle(const FlowField& flow);

}  // namespace rflow
