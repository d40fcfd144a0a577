#pragma once

#include <string>
#include <vector>

#include "rflow/bench.hpp"
#include "rflow/pipeline.hpp"
#include "rflow/synth.hpp"

namespace rflow::cli {

// Fully resolved run parameters. Defaults < config file < command-line
// flags; the resolved object is what sidecars record, so --config <sidecar>
// reproduces a run exactly.
struct RunConfig {
    std::string input;
    std::string output = ".";
    FlowMethod method = FlowMethod::combined;
    EncodeMode encode = EncodeMode::hsv;
    double sigma = 1.0;
    int window = 3;
    double tau = 1e-4;
    NormalizationPolicy norm;
    BorderPolicy border = BorderPolicy::replicate;
    int threads = 1;
    std::string hardware;
    synth::SequenceSpec sequence;

    PipelineConfig pipeline() const;
};

// Serialized config (sorted keys, stable bytes). `command` records the
// subcommand the sidecar came from; loaders ignore it.
std::string config_to_json(const RunConfig& config, const std::string& command);

// Merges values from a JSON config file (unknown keys ignored).
void apply_json_file(const std::string& path, RunConfig* config);

FlowMethod parse_method(const std::string& name);
EncodeMode parse_encode(const std::string& name);
BorderPolicy parse_border(const std::string& name);
NormalizationPolicy parse_norm(const std::string& text);   // "per-frame" | "fixed:<scale>"
synth::Pattern parse_pattern(const std::string& name);     // blob | grating | random
synth::Motion parse_motion(const std::string& text);       // translate:dx,dy | divergent:a
synth::Illumination parse_illumination(const std::string& text);  // none | uniform:b | spatial:g

std::string method_name(FlowMethod method);
std::string encode_name(EncodeMode mode);
std::string border_name(BorderPolicy border);
std::string norm_name(const NormalizationPolicy& norm);

// Frames matching a directory (all .png/.pgm inside) or a glob pattern
// ('*'/'?' in the final path component), sorted by filename.
std::vector<std::string> list_frame_files(const std::string& input);

int cmd_flow(const RunConfig& config);
int cmd_encode(const RunConfig& config);
int cmd_synth(const RunConfig& config);
int cmd_bench(const RunConfig& config);

struct EvalOptions {
    std::string estimates;
    std::string truth;
    bool use_masks = true;   // apply mask_NNNN.pgm files found beside the truth
    bool json_output = false;
};

int cmd_eval(const EvalOptions& options);

}  // namespace rflow::cli
