#include "rflow/flow.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rflow/kernels/kernels.hpp"

namespace rflow {

namespace {

constexpr double kRadToDeg = 57.295779513082320876798154814105;  // 180/pi

void require_min_size(const Frame& frame, int side) {
    if (frame.width < side || frame.height < side) {
        throw std::invalid_argument("frame must be at least " + std::to_string(side) +
                                    "x" + std::to_string(side));
    }
}

}  // namespace

FlowField::FlowField(int w, int h)
    : width(w),
      height(h),
      u(static_cast<std::size_t>(w) * h, 0.0f),
      v(static_cast<std::size_t>(w) * h, 0.0f) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("flow dimensions must be positive");
}

std::pair<Frame, Frame> spatial_gradient(const Frame& frame) {
    require_min_size(frame, 3);
    Frame fx(frame.width, frame.height);
    Frame fy(frame.width, frame.height);
    kernels::active_ops().central_gradient(frame.data.data(), frame.width, frame.height,
                                           fx.data.data(), fy.data.data());
    return {std::move(fx), std::move(fy)};
}

FlowField lucas_kanade(const Frame& current, const Frame& next, const LKConfig& config) {
    if (!current.same_size(next)) {
        throw std::invalid_argument("lucas_kanade requires matching dimensions");
    }
    if (config.window < 3 || config.window % 2 == 0) {
        throw std::invalid_argument("window must be odd and >= 3");
    }
    if (config.eigen_threshold < 0.0) {
        throw std::invalid_argument("eigen_threshold must be >= 0");
    }
    if (current.width < config.window || current.height < config.window) {
        throw std::invalid_argument("window larger than frame");
    }

    const int w = current.width;
    const int h = current.height;
    const std::size_t n = current.pixel_count();
    const int radius = config.window / 2;
    const kernels::Ops& ops = kernels::active_ops();

    Frame fx(w, h);
    Frame fy(w, h);
    ops.central_gradient(current.data.data(), w, h, fx.data.data(), fy.data.data());

    Frame ft(w, h);
    ops.subtract(next.data.data(), current.data.data(), n, ft.data.data());

    FlowField flow(w, h);
    ops.lk_flow(fx.data.data(), fy.data.data(), ft.data.data(), w, h, radius,
                config.eigen_threshold, flow.u.data(), flow.v.data());
    return flow;
}

std::pair<Frame, Frame> boundary_terms(const Frame& delta, BorderPolicy border) {
    return {apply_kernel3(delta, stencils::simpson_x, border),
            apply_kernel3(delta, stencils::simpson_y, border)};
}

std::pair<Frame, Frame> domain_terms(const Frame& delta, BorderPolicy border) {
    Frame gx = apply_kernel3(delta, stencils::sobel_x, border);
    Frame gy = apply_kernel3(delta, stencils::sobel_y, border);
    return {apply_kernel3(gx, stencils::box, border),
            apply_kernel3(gy, stencils::box, border)};
}

FlowField reynolds_flow(const Frame& delta, const ReynoldsConfig& config) {
    require_min_size(delta, 3);
    if (!(config.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");

    const int w = delta.width;
    const int h = delta.height;
    const kernels::Ops& ops = kernels::active_ops();

    Frame boundary_x(w, h), boundary_y(w, h), sobel_gx(w, h), sobel_gy(w, h);
    ops.reynolds_terms(delta.data.data(), w, h, config.border, boundary_x.data.data(),
                       boundary_y.data.data(), sobel_gx.data.data(),
                       sobel_gy.data.data());

    Frame u_raw(w, h), v_raw(w, h);
    ops.box_combine(boundary_x.data.data(), boundary_y.data.data(),
                    sobel_gx.data.data(), sobel_gy.data.data(), w, h, config.border,
                    u_raw.data.data(), v_raw.data.data());

    const GaussianSpec spec(config.sigma);
    FlowField flow(w, h);
    Frame u_smooth = gaussian_blur(u_raw, spec, config.border);
    Frame v_smooth = gaussian_blur(v_raw, spec, config.border);
    flow.u = std::move(u_smooth.data);
    flow.v = std::move(v_smooth.data);
    return flow;
}

FlowField combined_flow(const FlowField& v_o, const FlowField& v_r) {
    if (!v_o.same_size(v_r)) {
        throw std::invalid_argument("combined_flow requires matching dimensions");
    }
    FlowField out(v_o.width, v_o.height);
    const kernels::Ops& ops = kernels::active_ops();
    ops.scale_add(v_o.u.data(), v_r.u.data(), 1.0, 1.0, out.pixel_count(), out.u.data());
    ops.scale_add(v_o.v.data(), v_r.v.data(), 1.0, 1.0, out.pixel_count(), out.v.data());
    return out;
}

Frame flow_magnitude(const FlowField& flow) {
    Frame out(flow.width, flow.height);
    kernels::active_ops().magnitude(flow.u.data(), flow.v.data(), flow.pixel_count(),
                                    out.data.data());
    return out;
}

Frame flow_angle(const FlowField& flow) {
    Frame out(flow.width, flow.height);
    const std::size_t n = flow.pixel_count();
    for (std::size_t p = 0; p < n; ++p) {
        const double u = flow.u[p];
        const double v = flow.v[p];
        if (u == 0.0 && v == 0.0) {
            out.data[p] = 0.0f;
            continue;
        }
        double deg = std::atan2(v, u) * kRadToDeg;
        if (deg < 0.0) deg += 360.0;
        if (deg >= 360.0) deg -= 360.0;
        out.data[p] = static_cast<float>(deg);
    }
    return out;
}

}  // namespace rflow
