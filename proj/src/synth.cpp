#include "rflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rflow::synth {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr int kMaskBorder = 5;
constexpr double kMaskGradientMin = 1e-3;

// Intensities are snapped to a 2^-12 grid so that adding an illumination
// ramp stays exact in float32: the frame delta of a uniform ramp is then
// exactly constant and the zero-sum stencils cancel it exactly.
double snap(double v) { return std::nearbyint(v * 4096.0) / 4096.0; }

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct SineComponent {
    double kx, ky, phase, amplitude;
};

// Closed-form pattern evaluated in pattern coordinates (frame 0 pixel grid).
struct PatternField {
    Pattern kind;
    double cx, cy;
    double blob_sigma = 0.0;
    double grating_lx = 0.0, grating_ly = 0.0;
    std::vector<SineComponent> components;

    PatternField(const SequenceSpec& spec)
        : kind(spec.pattern),
          cx((spec.width - 1) / 2.0),
          cy((spec.height - 1) / 2.0) {
        switch (kind) {
            case Pattern::gaussian_blob:
                blob_sigma = std::min(spec.width, spec.height) / 5.0;
                break;
            case Pattern::sine_grating:
                grating_lx = std::max(8.0, spec.width / 6.0);
                grating_ly = std::max(8.0, spec.height / 6.0);
                break;
            case Pattern::random_smooth: {
                std::mt19937_64 rng(spec.seed);
                components.resize(24);
                for (SineComponent& c : components) {
                    const double wavelength = 8.0 + 56.0 * uniform01(rng);
                    const double direction = kTwoPi * uniform01(rng);
                    const double k = kTwoPi / wavelength;
                    c.kx = k * std::cos(direction);
                    c.ky = k * std::sin(direction);
                    c.phase = kTwoPi * uniform01(rng);
                    c.amplitude = 1.0 + 3.0 * uniform01(rng);
                }
                break;
            }
        }
    }

    double value(double x, double y) const {
        switch (kind) {
            case Pattern::gaussian_blob: {
                const double dx = x - cx;
                const double dy = y - cy;
                return 255.0 * std::exp(-(dx * dx + dy * dy) / (2.0 * blob_sigma * blob_sigma));
            }
            case Pattern::sine_grating: {
                const double sx = 1.0 + std::sin(kTwoPi * x / grating_lx);
                const double sy = 1.0 + std::sin(kTwoPi * y / grating_ly);
                return 63.75 * sx * sy;
            }
            case Pattern::random_smooth: {
                double v = 127.5;
                for (const SineComponent& c : components) {
                    v += c.amplitude * std::sin(c.kx * x + c.ky * y + c.phase);
                }
                return v;
            }
        }
        return 0.0;
    }

    double gradient_magnitude(double x, double y) const {
        switch (kind) {
            case Pattern::gaussian_blob: {
                const double dx = x - cx;
                const double dy = y - cy;
                const double s2 = blob_sigma * blob_sigma;
                return value(x, y) * std::sqrt(dx * dx + dy * dy) / s2;
            }
            case Pattern::sine_grating: {
                const double ax = kTwoPi * x / grating_lx;
                const double ay = kTwoPi * y / grating_ly;
                const double gx =
                    63.75 * (kTwoPi / grating_lx) * std::cos(ax) * (1.0 + std::sin(ay));
                const double gy =
                    63.75 * (1.0 + std::sin(ax)) * (kTwoPi / grating_ly) * std::cos(ay);
                return std::sqrt(gx * gx + gy * gy);
            }
            case Pattern::random_smooth: {
                double gx = 0.0, gy = 0.0;
                for (const SineComponent& c : components) {
                    const double co = c.amplitude * std::cos(c.kx * x + c.ky * y + c.phase);
                    gx += co * c.kx;
                    gy += co * c.ky;
                }
                return std::sqrt(gx * gx + gy * gy);
            }
        }
        return 0.0;
    }
};

void validate(const SequenceSpec& spec) {
    if (spec.width < 16 || spec.height < 16) {
        throw std::invalid_argument("sequence dimensions must be at least 16x16");
    }
    if (spec.frame_count < 2) throw std::invalid_argument("frame_count must be >= 2");
    if (spec.motion.kind == Motion::Kind::translation &&
        (std::fabs(spec.motion.dx) > 3.0 || std::fabs(spec.motion.dy) > 3.0)) {
        throw std::invalid_argument("|dx| and |dy| must be <= 3 pixels/frame");
    }
    if (spec.motion.kind == Motion::Kind::divergent && std::fabs(spec.motion.alpha) >= 0.5) {
        throw std::invalid_argument("|alpha| must be < 0.5 per frame");
    }
}

double illumination_term(const Illumination& illum, int frame_index, int x) {
    switch (illum.kind) {
        case Illumination::Kind::none:
            return 0.0;
        case Illumination::Kind::uniform_ramp:
            return snap(illum.beta * frame_index);
        case Illumination::Kind::spatial_ramp:
            return snap(illum.gamma * frame_index * x);
    }
    return 0.0;
}

}  // namespace

Sequence generate(const SequenceSpec& spec) {
    validate(spec);
    const PatternField pattern(spec);
    const int w = spec.width;
    const int h = spec.height;
    const double cx = (w - 1) / 2.0;
    const double cy = (h - 1) / 2.0;

    Sequence seq;
    seq.frames.reserve(spec.frame_count);

    const bool divergent = spec.motion.kind == Motion::Kind::divergent;
    const double alpha = spec.motion.alpha;

    for (int n = 0; n < spec.frame_count; ++n) {
        // Back-advection of pixel (x, y) to pattern coordinates at frame n.
        const double shrink = divergent ? 1.0 / std::pow(1.0 + alpha, n) : 1.0;
        const double off_x = divergent ? 0.0 : spec.motion.dx * n;
        const double off_y = divergent ? 0.0 : spec.motion.dy * n;

        Frame frame(w, h);
        const bool separable =
            spec.pattern == Pattern::gaussian_blob || spec.pattern == Pattern::sine_grating;
        if (separable) {
            // Both axis-separable patterns factor as fx(x) * fy(y).
            std::vector<double> fx(w), fy(h);
            if (spec.pattern == Pattern::gaussian_blob) {
                const double s2 = 2.0 * pattern.blob_sigma * pattern.blob_sigma;
                for (int j = 0; j < w; ++j) {
                    const double qx = divergent ? cx + (j - cx) * shrink : j - off_x;
                    const double dx = qx - pattern.cx;
                    fx[j] = 255.0 * std::exp(-dx * dx / s2);
                }
                for (int i = 0; i < h; ++i) {
                    const double qy = divergent ? cy + (i - cy) * shrink : i - off_y;
                    const double dy = qy - pattern.cy;
                    fy[i] = std::exp(-dy * dy / s2);
                }
            } else {
                for (int j = 0; j < w; ++j) {
                    const double qx = divergent ? cx + (j - cx) * shrink : j - off_x;
                    fx[j] = 63.75 * (1.0 + std::sin(kTwoPi * qx / pattern.grating_lx));
                }
                for (int i = 0; i < h; ++i) {
                    const double qy = divergent ? cy + (i - cy) * shrink : i - off_y;
                    fy[i] = 1.0 + std::sin(kTwoPi * qy / pattern.grating_ly);
                }
            }
            for (int i = 0; i < h; ++i) {
                float* row = frame.data.data() + static_cast<std::size_t>(i) * w;
                for (int j = 0; j < w; ++j) {
                    row[j] = static_cast<float>(snap(fx[j] * fy[i]) +
                                                illumination_term(spec.illumination, n, j));
                }
            }
        } else {
            for (int i = 0; i < h; ++i) {
                float* row = frame.data.data() + static_cast<std::size_t>(i) * w;
                for (int j = 0; j < w; ++j) {
                    const double qx = divergent ? cx + (j - cx) * shrink : j - off_x;
                    const double qy = divergent ? cy + (i - cy) * shrink : i - off_y;
                    row[j] = static_cast<float>(snap(pattern.value(qx, qy)) +
                                                illumination_term(spec.illumination, n, j));
                }
            }
        }
        seq.frames.push_back(std::move(frame));
    }

    const int pairs = spec.frame_count - 1;
    seq.truth.flow.reserve(pairs);
    seq.truth.valid.reserve(pairs);
    for (int n = 0; n < pairs; ++n) {
        FlowField truth(w, h);
        std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
        const double shrink = divergent ? 1.0 / std::pow(1.0 + alpha, n) : 1.0;
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < w; ++j) {
                const std::size_t p = static_cast<std::size_t>(i) * w + j;
                if (divergent) {
                    truth.u[p] = static_cast<float>(alpha * (j - cx));
                    truth.v[p] = static_cast<float>(alpha * (i - cy));
                } else {
                    truth.u[p] = static_cast<float>(spec.motion.dx);
                    truth.v[p] = static_cast<float>(spec.motion.dy);
                }
                const bool interior = i >= kMaskBorder && i < h - kMaskBorder &&
                                      j >= kMaskBorder && j < w - kMaskBorder;
                if (!interior) continue;
                const double qx = divergent ? cx + (j - cx) * shrink : j - spec.motion.dx * n;
                const double qy = divergent ? cy + (i - cy) * shrink : i - spec.motion.dy * n;
                // Gradient of the rendered frame: pattern gradient times the
                // back-advection Jacobian (a uniform scale here).
                const double grad = pattern.gradient_magnitude(qx, qy) * shrink;
                if (grad >= kMaskGradientMin) mask[p] = 1;
            }
        }
        seq.truth.flow.push_back(std::move(truth));
        seq.truth.valid.push_back(std::move(mask));
    }
    return seq;
}

std::vector<double> endpoint_distances(const FlowField& estimate, const FlowField& truth,
                                       const std::vector<std::uint8_t>& valid) {
    if (!estimate.same_size(truth)) {
        throw std::invalid_argument("endpoint_error requires matching dimensions");
    }
    if (!valid.empty() && valid.size() != estimate.pixel_count()) {
        throw std::invalid_argument("validity mask size mismatch");
    }
    std::vector<double> distances;
    distances.reserve(estimate.pixel_count());
    for (std::size_t p = 0; p < estimate.pixel_count(); ++p) {
        if (!valid.empty() && valid[p] == 0) continue;
        const double du = static_cast<double>(estimate.u[p]) - static_cast<double>(truth.u[p]);
        const double dv = static_cast<double>(estimate.v[p]) - static_cast<double>(truth.v[p]);
        distances.push_back(std::sqrt(du * du + dv * dv));
    }
    return distances;
}

EpeStats summarize_distances(std::vector<double> distances) {
    EpeStats stats;
    stats.count = distances.size();
    if (distances.empty()) return stats;

    double total = 0.0;
    for (double d : distances) total += d;
    stats.mean = total / static_cast<double>(distances.size());

    std::sort(distances.begin(), distances.end());
    const std::size_t n = distances.size();
    stats.median = (n % 2 == 1) ? distances[n / 2]
                                : 0.5 * (distances[n / 2 - 1] + distances[n / 2]);
    const std::size_t rank =
        static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    stats.p95 = distances[std::min(n - 1, rank > 0 ? rank - 1 : 0)];
    return stats;
}

EpeStats endpoint_error(const FlowField& estimate, const FlowField& truth,
                        const std::vector<std::uint8_t>& valid) {
    return summarize_distances(endpoint_distances(estimate, truth, valid));
}

EpeStats endpoint_error(const FlowField& estimate, const GroundTruth& truth,
                        std::size_t pair_index) {
    if (pair_index >= truth.flow.size()) {
        throw std::invalid_argument("pair index out of range");
    }
    return endpoint_error(estimate, truth.flow[pair_index], truth.valid[pair_index]);
}

AdvectedPatch advect_patch_area(double alpha, double dt, const std::vector<Point2>& polygon) {
    if (polygon.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");

    auto shoelace = [](const std::vector<Point2>& poly) {
        double twice_area = 0.0;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Point2& a = poly[i];
            const Point2& b = poly[(i + 1) % poly.size()];
            twice_area += a.x * b.y - b.x * a.y;
        }
        return 0.5 * twice_area;
    };

    const double area_before = shoelace(polygon);
    if (area_before == 0.0) throw std::invalid_argument("degenerate polygon (zero area)");

    AdvectedPatch out;
    out.polygon.reserve(polygon.size());
    for (const Point2& p : polygon) {
        out.polygon.push_back({p.x + alpha * p.x * dt, p.y + alpha * p.y * dt});
    }
    out.area_ratio = std::fabs(shoelace(out.polygon) / area_before);
    return out;
}

}  // namespace rflow::synth
