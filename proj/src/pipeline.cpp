#include "rflow/pipeline.hpp"

#include <stdexcept>

namespace rflow {

PairResult process_pair(const Frame& current, const Frame& next, FlowMethod method,
                        EncodeMode encode, const PipelineConfig& config) {
    if (!current.same_size(next)) {
        throw std::invalid_argument("process_pair requires matching dimensions");
    }
    PairResult result;

    const bool need_vo = method != FlowMethod::reynolds || encode == EncodeMode::plus;
    const bool need_vr = method != FlowMethod::lk || encode == EncodeMode::plus;

    if (need_vo) {
        result.v_o = lucas_kanade(current, next, config.lk);
        result.has_v_o = true;
    }
    if (need_vr) {
        result.v_r = reynolds_flow(frame_delta(current, next), config.reynolds);
        result.has_v_r = true;
    }
    if (method == FlowMethod::combined && encode != EncodeMode::plus) {
        result.v_R = combined_flow(result.v_o, result.v_r);
        result.has_v_R = true;
    }

    if (encode == EncodeMode::hsv) {
        const FlowField& field = method == FlowMethod::lk         ? result.v_o
                                 : method == FlowMethod::reynolds ? result.v_r
                                                                  : result.v_R;
        result.encoded = encode_hsv(field, config.norm);
        result.has_encoded = true;
    } else if (encode == EncodeMode::plus) {
        result.encoded = encode_plus(result.v_o, result.v_r, current, config.norm);
        result.has_encoded = true;
    }
    return result;
}

}  // namespace rflow
