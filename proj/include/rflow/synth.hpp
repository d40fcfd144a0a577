#pragma once

#include <cstdint>

#include "rflow/flow.hpp"
#include "rflow/image.hpp"

namespace rflow::synth {

enum class Pattern { gaussian_blob, sine_grating, random_smooth };

struct Motion {
    enum class Kind { translation, divergent };
    Kind kind = Kind::translation;
    double dx = 0.0;     // translation, pixels/frame
    double dy = 0.0;
    double alpha = 0.0;  // divergence rate about the image center, 1/frame

    static Motion translation(double dx, double dy) {
        Motion m;
        m.dx = dx;
        m.dy = dy;
        return m;
    }
    static Motion divergent(double alpha) {
        Motion m;
        m.kind = Kind::divergent;
        m.alpha = alpha;
        return m;
    }
};

struct Illumination {
    enum class Kind { none, uniform_ramp, spatial_ramp };
    Kind kind = Kind::none;
    double beta = 0.0;   // uniform ramp, intensity/frame
    double gamma = 0.0;  // spatial ramp along x, intensity/frame/pixel

    static Illumination uniform_ramp(double beta) {
        Illumination i;
        i.kind = Kind::uniform_ramp;
        i.beta = beta;
        return i;
    }
    static Illumination spatial_ramp(double gamma) {
        Illumination i;
        i.kind = Kind::spatial_ramp;
        i.gamma = gamma;
        return i;
    }
};

// Parametric frame sequence with closed-form motion. Frames are rendered by
// evaluating the pattern at back-advected coordinates, so ground truth is
// free of resampling error. |dx|, |dy| <= 3 and frame_count >= 2.
struct SequenceSpec {
    int width = 128;
    int height = 128;
    int frame_count = 10;
    Pattern pattern = Pattern::gaussian_blob;
    Motion motion = Motion::translation(1.0, 0.0);
    Illumination illumination = {};
    std::uint64_t seed = 1;
};

// Analytic flow and validity mask per consecutive frame pair. The mask marks
// pixels at least 5 px from the border whose pattern gradient magnitude is
// >= 1e-3 (where windowed flow is well-posed).
struct GroundTruth {
    std::vector<FlowField> flow;
    std::vector<std::vector<std::uint8_t>> valid;
};

struct Sequence {
    std::vector<Frame> frames;
    GroundTruth truth;
};

Sequence generate(const SequenceSpec& spec);

struct EpeStats {
    double mean = 0.0;
    double median = 0.0;
    double p95 = 0.0;
    std::size_t count = 0;
};

// Per-pixel Euclidean distances between estimated and true flow over the
// valid pixels. An empty mask means all pixels are valid.
std::vector<double> endpoint_distances(const FlowField& estimate, const FlowField& truth,
                                       const std::vector<std::uint8_t>& valid = {});

// mean / median / p95 of a distance sample (consumes and sorts it).
EpeStats summarize_distances(std::vector<double> distances);

EpeStats endpoint_error(const FlowField& estimate, const FlowField& truth,
                        const std::vector<std::uint8_t>& valid = {});
EpeStats endpoint_error(const FlowField& estimate, const GroundTruth& truth,
                        std::size_t pair_index);

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct AdvectedPatch {
    std::vector<Point2> polygon;
    double area_ratio = 1.0;  // shoelace area, advected / original
};

// One explicit Euler step of a simple polygon under v(x, y) = (alpha*x,
// alpha*y). The exact area ratio is (1 + alpha*dt)^2; the first-order
// prediction 1 + 2*alpha*dt differs by (alpha*dt)^2.
AdvectedPatch advect_patch_area(double alpha, double dt, const std::vector<Point2>& polygon);

}  // namespace rflow::synth
