#include "rflow/image.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rflow/kernels/kernels.hpp"

namespace rflow {

namespace {

void require_stencil_size(const Frame& frame) {
    if (frame.width < 3 || frame.height < 3) {
        throw std::invalid_argument("frame must be at least 3x3, got " +
                                    std::to_string(frame.width) + "x" +
                                    std::to_string(frame.height));
    }
    if (frame.data.size() != frame.pixel_count()) {
        throw std::invalid_argument("frame data size does not match dimensions");
    }
}

}  // namespace

Frame::Frame(int w, int h, float fill)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("frame dimensions must be positive");
}

Image8::Image8(int w, int h, int c)
    : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, 0) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("image dimensions must be positive");
    if (c != 1 && c != 3) throw std::invalid_argument("image must have 1 or 3 channels");
}

GaussianSpec::GaussianSpec(double s, int r) : sigma(s), radius(r) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (r < 0) throw std::invalid_argument("radius must be non-negative");
}

int GaussianSpec::effective_radius() const {
    if (radius > 0) return radius;
    return static_cast<int>(std::ceil(3.0 * sigma));
}

std::vector<double> gaussian_taps(const GaussianSpec& spec) {
    if (!(spec.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    const int r = spec.effective_radius();
    std::vector<double> taps(2 * r + 1);
    const double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);
    double total = 0.0;
    for (int k = -r; k <= r; ++k) {
        const double w = std::exp(-static_cast<double>(k) * k * inv2s2);
        taps[k + r] = w;
        total += w;
    }
    for (double& w : taps) w /= total;
    return taps;
}

Frame to_grayscale(const Image8& rgb) {
    if (rgb.channels != 3) {
        throw std::invalid_argument("to_grayscale expects a 3-channel image");
    }
    if (rgb.width < 3 || rgb.height < 3) {
        throw std::invalid_argument("image must be at least 3x3");
    }
    Frame out(rgb.width, rgb.height);
    const std::size_t n = out.pixel_count();
    for (std::size_t p = 0; p < n; ++p) {
        const double r = rgb.data[p * 3];
        const double g = rgb.data[p * 3 + 1];
        const double b = rgb.data[p * 3 + 2];
        out.data[p] = static_cast<float>(0.299 * r + 0.587 * g + 0.114 * b);
    }
    return out;
}

Frame apply_kernel3(const Frame& frame, const Kernel3& kernel, BorderPolicy border) {
    require_stencil_size(frame);
    Frame out(frame.width, frame.height);
    kernels::active_ops().stencil3x3(frame.data.data(), frame.width, frame.height,
                                     kernel.coefficients.data(), kernel.normalization,
                                     border, out.data.data());
    return out;
}

Frame gaussian_blur(const Frame& frame, const GaussianSpec& spec, BorderPolicy border) {
    require_stencil_size(frame);
    const std::vector<double> taps = gaussian_taps(spec);
    Frame out(frame.width, frame.height);
    kernels::active_ops().blur(frame.data.data(), frame.width, frame.height, taps.data(),
                               spec.effective_radius(), border, out.data.data());
    return out;
}

Frame frame_delta(const Frame& current, const Frame& next) {
    if (!current.same_size(next)) {
        throw std::invalid_argument("frame_delta requires matching dimensions");
    }
    Frame out(current.width, current.height);
    kernels::active_ops().subtract(next.data.data(), current.data.data(),
                                   current.pixel_count(), out.data.data());
    return out;
}

}  // namespace rflow
