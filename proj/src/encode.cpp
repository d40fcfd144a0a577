#include "rflow/encode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rflow/kernels/kernels.hpp"

namespace rflow {

namespace {

std::uint8_t quantize_half_even(double x) {
    const double r = std::nearbyint(x);  // ties-to-even under FE_TONEAREST
    return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

double max_value(const Frame& frame) {
    double m = 0.0;
    for (float v : frame.data) m = std::max(m, static_cast<double>(v));
    return m;
}

// Byte scale factor so that quantize(x * scale) realizes the policy:
// per_frame_max divides by max(max, 1e-8), fixed_scale divides by `scale`
// (the [0, 255] output clamp covers the [0, 1] cap).
double channel_scale(const NormalizationPolicy& norm, double frame_max) {
    if (norm.mode == NormalizationPolicy::Mode::per_frame_max) {
        return 255.0 / std::max(frame_max, 1e-8);
    }
    return 255.0 / norm.scale;
}

void validate_norm(const NormalizationPolicy& norm) {
    if (norm.mode == NormalizationPolicy::Mode::fixed_scale && !(norm.scale > 0.0)) {
        throw std::invalid_argument("fixed_scale normalization requires a positive scale");
    }
}

void hsv_bytes_to_rgb(std::uint8_t hue_byte, std::uint8_t value_byte, std::uint8_t* rgb) {
    // Standard piecewise conversion at S = 1, driven by the quantized bytes
    // (hue byte is degrees/2, OpenCV convention).
    const double h = hue_byte * 2.0;
    const double v = value_byte / 255.0;
    const double c = v;
    const double hp = h / 60.0;
    const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r = 0.0, g = 0.0, b = 0.0;
    switch (static_cast<int>(hp) % 6) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
    }
    rgb[0] = quantize_half_even(r * 255.0);
    rgb[1] = quantize_half_even(g * 255.0);
    rgb[2] = quantize_half_even(b * 255.0);
}

}  // namespace

Image8 encode_hsv(const FlowField& flow, const NormalizationPolicy& norm) {
    validate_norm(norm);
    const Frame mag = flow_magnitude(flow);
    const Frame ang = flow_angle(flow);
    const double scale = channel_scale(norm, max_value(mag));

    const std::size_t n = flow.pixel_count();
    std::vector<std::uint8_t> value_bytes(n);
    kernels::active_ops().quantize_bytes(mag.data.data(), n, scale, false,
                                         value_bytes.data());

    Image8 out(flow.width, flow.height, 3);
    for (std::size_t p = 0; p < n; ++p) {
        std::uint8_t hue = quantize_half_even(ang.data[p] / 2.0);
        if (hue >= 180) hue = 0;  // 360 degrees wraps to 0
        hsv_bytes_to_rgb(hue, value_bytes[p], &out.data[p * 3]);
    }
    return out;
}

Image8 encode_plus(const FlowField& v_o, const FlowField& v_r, const Frame& frame,
                   const NormalizationPolicy& norm) {
    validate_norm(norm);
    if (!v_o.same_size(v_r) || v_o.width != frame.width || v_o.height != frame.height) {
        throw std::invalid_argument("encode_plus requires matching dimensions");
    }
    const Frame mag_o = flow_magnitude(v_o);
    const Frame mag_r = flow_magnitude(v_r);

    const std::size_t n = frame.pixel_count();
    std::vector<std::uint8_t> red(n), green(n), blue(n);
    const kernels::Ops& ops = kernels::active_ops();
    ops.quantize_bytes(mag_o.data.data(), n, channel_scale(norm, max_value(mag_o)),
                       false, red.data());
    ops.quantize_bytes(mag_r.data.data(), n, channel_scale(norm, max_value(mag_r)),
                       false, green.data());
    ops.quantize_bytes(frame.data.data(), n, 1.0, true, blue.data());

    Image8 out(frame.width, frame.height, 3);
    for (std::size_t p = 0; p < n; ++p) {
        out.data[p * 3] = red[p];
        out.data[p * 3 + 1] = green[p];
        out.data[p * 3 + 2] = blue[p];
    }
    return out;
}

}  // namespace rflow
