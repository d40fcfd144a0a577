#include "rflow/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "rflow/kernels/kernels.hpp"

namespace rflow {

namespace {

bool same_flow(const FlowField& a, const FlowField& b) {
    return a.same_size(b) &&
           std::memcmp(a.u.data(), b.u.data(), a.pixel_count() * sizeof(float)) == 0 &&
           std::memcmp(a.v.data(), b.v.data(), a.pixel_count() * sizeof(float)) == 0;
}

bool same_result(const PairResult& a, const PairResult& b) {
    if (a.has_v_o != b.has_v_o || a.has_v_r != b.has_v_r || a.has_v_R != b.has_v_R ||
        a.has_encoded != b.has_encoded) {
        return false;
    }
    if (a.has_v_o && !same_flow(a.v_o, b.v_o)) return false;
    if (a.has_v_r && !same_flow(a.v_r, b.v_r)) return false;
    if (a.has_v_R && !same_flow(a.v_R, b.v_R)) return false;
    if (a.has_encoded && a.encoded.data != b.encoded.data) return false;
    return true;
}

void method_modes(BenchMethod method, FlowMethod* flow, EncodeMode* encode) {
    switch (method) {
        case BenchMethod::reynolds_hsv:
            *flow = FlowMethod::combined;
            *encode = EncodeMode::hsv;
            return;
        case BenchMethod::reynolds_plus:
            *flow = FlowMethod::combined;
            *encode = EncodeMode::plus;
            return;
        case BenchMethod::lk_only:
            *flow = FlowMethod::lk;
            *encode = EncodeMode::none;
            return;
    }
}

}  // namespace

const char* bench_method_name(BenchMethod method) {
    switch (method) {
        case BenchMethod::reynolds_hsv: return "reynolds_hsv";
        case BenchMethod::reynolds_plus: return "reynolds_plus";
        case BenchMethod::lk_only: return "lk_only";
    }
    return "?";
}

BenchReport time_pipeline(const std::vector<Frame>& frames, BenchMethod method,
                          const PipelineConfig& config, const std::string& hardware) {
    if (frames.size() < 3) {
        throw std::invalid_argument("time_pipeline needs at least 3 frames (warm-up + 1)");
    }
    for (const Frame& f : frames) {
        if (!f.same_size(frames.front())) {
            throw std::invalid_argument("time_pipeline requires uniform frame dimensions");
        }
    }

    FlowMethod flow_method = FlowMethod::combined;
    EncodeMode encode_mode = EncodeMode::none;
    method_modes(method, &flow_method, &encode_mode);

    BenchReport report;
    report.method = bench_method_name(method);
    report.width = frames.front().width;
    report.height = frames.front().height;
    report.hardware = hardware;

    using clock = std::chrono::steady_clock;
    for (std::size_t n = 0; n + 1 < frames.size(); ++n) {
        const PairResult reference =
            process_pair(frames[n], frames[n + 1], flow_method, encode_mode, config);
        const auto start = clock::now();
        const PairResult timed =
            process_pair(frames[n], frames[n + 1], flow_method, encode_mode, config);
        const auto stop = clock::now();
        if (!same_result(reference, timed)) {
            throw std::runtime_error("timed run diverged from reference outputs");
        }
        if (n == 0) continue;  // warm-up pair
        report.times_s.push_back(std::chrono::duration<double>(stop - start).count());
    }

    report.frames = static_cast<int>(report.times_s.size());
    std::vector<double> sorted = report.times_s;
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (double t : sorted) total += t;
    report.mean_s = total / static_cast<double>(sorted.size());
    const std::size_t n = sorted.size();
    report.median_s =
        (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(n)));
    report.p95_s = sorted[std::min(n - 1, rank > 0 ? rank - 1 : 0)];

    nlohmann::json cfg;
    cfg["window"] = config.lk.window;
    cfg["tau"] = config.lk.eigen_threshold;
    cfg["sigma"] = config.reynolds.sigma;
    cfg["border"] = config.reynolds.border == BorderPolicy::replicate ? "replicate"
                    : config.reynolds.border == BorderPolicy::reflect ? "reflect"
                                                                      : "zero";
    cfg["norm"] = config.norm.mode == NormalizationPolicy::Mode::per_frame_max
                      ? "per-frame"
                      : "fixed:" + format_double(config.norm.scale);
    cfg["simd"] = kernels::active_ops().name;
    cfg["timing"] = "sequential";
    report.config_json = cfg.dump();
    return report;
}

std::string format_double(double value) {
    char buf[64];
    const auto result =
        std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
    return std::string(buf, result.ptr);
}

void write_csv(const BenchReport& report, std::ostream& out) {
    out << "method,width,height,frames,mean_s,median_s,p95_s\n";
    out << report.method << ',' << report.width << ',' << report.height << ','
        << report.frames << ',' << format_double(report.mean_s) << ','
        << format_double(report.median_s) << ',' << format_double(report.p95_s) << '\n';
    if (!out) throw std::runtime_error("csv write failed");
}

}  // namespace rflow
