#pragma once

// Naive double-loop reference implementations, written independently of the
// library's kernel backends. They accumulate in double and quantize to
// float32 at the same operation boundaries as the public API, so dispatched
// paths are expected to agree to well below 1e-6 (normally bit-exactly).

#include <random>
#include <vector>

#include "rflow/flow.hpp"
#include "rflow/image.hpp"

namespace oracle {

rflow::Frame stencil3x3(const rflow::Frame& frame, const rflow::Kernel3& kernel,
                        rflow::BorderPolicy border);

rflow::Frame gaussian_blur(const rflow::Frame& frame, double sigma, int radius,
                           rflow::BorderPolicy border);

std::pair<rflow::Frame, rflow::Frame> spatial_gradient(const rflow::Frame& frame);

rflow::FlowField lucas_kanade(const rflow::Frame& current, const rflow::Frame& next,
                              int window, double tau);

rflow::FlowField reynolds_flow(const rflow::Frame& delta, double sigma,
                               rflow::BorderPolicy border);

// Uniformly random frame in [lo, hi].
rflow::Frame random_frame(int width, int height, std::mt19937_64& rng, float lo = 0.0f,
                          float hi = 255.0f);

rflow::FlowField random_flow(int width, int height, std::mt19937_64& rng, float lo = -8.0f,
                             float hi = 8.0f);

double max_abs_diff(const rflow::Frame& a, const rflow::Frame& b);
double max_abs_diff(const rflow::FlowField& a, const rflow::FlowField& b);

}  // namespace oracle
