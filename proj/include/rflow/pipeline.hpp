#pragma once

#include "rflow/encode.hpp"
#include "rflow/flow.hpp"

namespace rflow {

enum class FlowMethod { lk, reynolds, combined };
enum class EncodeMode { none, hsv, plus };

struct PipelineConfig {
    LKConfig lk;
    ReynoldsConfig reynolds;
    NormalizationPolicy norm;
};

// Outputs of one frame pair. Fields are populated on demand: v_o when the
// method involves LK, v_r when it involves Reynolds flow, v_R only for the
// combined method when the encoding does not make it redundant (the
// magnitude stack never forms the sum).
struct PairResult {
    FlowField v_o;
    FlowField v_r;
    FlowField v_R;
    Image8 encoded;
    bool has_v_o = false;
    bool has_v_r = false;
    bool has_v_R = false;
    bool has_encoded = false;
};

PairResult process_pair(const Frame& current, const Frame& next, FlowMethod method,
                        EncodeMode encode, const PipelineConfig& config);

}  // namespace rflow
