#pragma once

#include "rflow/flow.hpp"
#include "rflow/image.hpp"

namespace rflow {

// How flow magnitudes map to [0, 1] before byte quantization.
// per_frame_max divides by max(magnitude, 1e-8); fixed_scale divides by
// `scale` and clamps to [0, 1].
struct NormalizationPolicy {
    enum class Mode { per_frame_max, fixed_scale };
    Mode mode = Mode::per_frame_max;
    double scale = 1.0;

    static NormalizationPolicy per_frame_max() { return {}; }
    static NormalizationPolicy fixed(double scale) {
        return {Mode::fixed_scale, scale};
    }
};

// HSV rendering of a flow field, returned as RGB bytes.
// H: angle/2 as a byte (0..179), S: 255, V: normalized magnitude * 255,
// quantized half-to-even, then converted with the standard piecewise
// HSV -> RGB formula.
Image8 encode_hsv(const FlowField& flow,
                  const NormalizationPolicy& norm = NormalizationPolicy::per_frame_max());

// Magnitude-stack rendering: R = normalized |v_o| * 255, G = normalized
// |v_r| * 255 (channels normalized independently), B = frame intensity
// clamped to [0, 255]. RGB byte order.
Image8 encode_plus(const FlowField& v_o, const FlowField& v_r, const Frame& frame,
                   const NormalizationPolicy& norm = NormalizationPolicy::per_frame_max());

}  // namespace rflow
