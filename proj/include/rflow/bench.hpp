#pragma once

#include <iosfwd>
#include <string>

#include "rflow/pipeline.hpp"

namespace rflow {

enum class BenchMethod { reynolds_hsv, reynolds_plus, lk_only };

const char* bench_method_name(BenchMethod method);

struct BenchReport {
    std::string method;
    int width = 0;
    int height = 0;
    int frames = 0;               // measured pairs (warm-up pair excluded)
    std::vector<double> times_s;  // wall time per measured pair
    double mean_s = 0.0;
    double median_s = 0.0;
    double p95_s = 0.0;
    std::string config_json;  // resolved pipeline parameters
    std::string hardware;     // caller-provided descriptor, never fabricated
};

// Times the full per-pair pipeline (flow + encoding) for each consecutive
// pair with a monotonic clock. The first pair is discarded as warm-up, and
// every timed output is verified byte-identical against an untimed
// reference run. Requires at least 3 frames of uniform size.
BenchReport time_pipeline(const std::vector<Frame>& frames, BenchMethod method,
                          const PipelineConfig& config, const std::string& hardware = "");

// Two CSV lines: the fixed header
// method,width,height,frames,mean_s,median_s,p95_s and one data row.
// Decimal points are locale-independent.
void write_csv(const BenchReport& report, std::ostream& out);

// Locale-independent float formatting shared by the CSV and summaries
// (plain decimal down to 1e-4, scientific below).
std::string format_double(double value);

}  // namespace rflow
