// rflow: training-free dense flow toolkit.
// Subcommands: flow, encode, synth, bench, eval.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "rflow/cli.hpp"
#include "rflow/kernels/kernels.hpp"

namespace {

using rflow::cli::RunConfig;

struct RawArgs {
    std::string config_file;
    std::string input, output, method, encode, norm, border;
    double sigma = 0.0;
    int window = 0;
    double tau = 0.0;
    int threads = 0;
    std::string hardware;
    std::string simd;
    // synth
    int width = 0, height = 0, frames = 0;
    std::string pattern, motion, illumination;
    std::uint64_t seed = 0;

    CLI::Option* input_opt = nullptr;
    CLI::Option* output_opt = nullptr;
    CLI::Option* method_opt = nullptr;
    CLI::Option* encode_opt = nullptr;
    CLI::Option* sigma_opt = nullptr;
    CLI::Option* window_opt = nullptr;
    CLI::Option* tau_opt = nullptr;
    CLI::Option* norm_opt = nullptr;
    CLI::Option* border_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* hardware_opt = nullptr;
    CLI::Option* width_opt = nullptr;
    CLI::Option* height_opt = nullptr;
    CLI::Option* frames_opt = nullptr;
    CLI::Option* pattern_opt = nullptr;
    CLI::Option* motion_opt = nullptr;
    CLI::Option* illumination_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

void add_common_options(CLI::App* cmd, RawArgs* raw) {
    cmd->add_option("--config", raw->config_file, "JSON config file (flags override it)");
    raw->input_opt = cmd->add_option("--input,-i", raw->input,
                                     "Input frames: directory or glob of .png/.pgm files");
    raw->output_opt = cmd->add_option("--output,-o", raw->output, "Output directory");
    raw->method_opt =
        cmd->add_option("--method", raw->method, "Flow method: lk|reynolds|combined");
    raw->encode_opt = cmd->add_option("--encode", raw->encode, "Encoding: hsv|plus");
    raw->sigma_opt = cmd->add_option("--sigma", raw->sigma, "Gaussian smoothing sigma");
    raw->window_opt = cmd->add_option("--window", raw->window, "LK window side (odd, >= 3)");
    raw->tau_opt = cmd->add_option("--tau", raw->tau, "LK eigenvalue threshold");
    raw->norm_opt = cmd->add_option("--norm", raw->norm,
                                    "Magnitude normalization: per-frame|fixed:<scale>");
    raw->border_opt =
        cmd->add_option("--border", raw->border, "Border policy: replicate|reflect|zero");
    raw->threads_opt = cmd->add_option("--threads", raw->threads, "Worker threads for pairs");
    raw->hardware_opt = cmd->add_option("--hardware", raw->hardware,
                                        "Hardware descriptor recorded in bench reports");
    cmd->add_option("--simd", raw->simd, "Force kernel backend: scalar|avx2");
}

void add_synth_options(CLI::App* cmd, RawArgs* raw) {
    raw->width_opt = cmd->add_option("--width", raw->width, "Frame width");
    raw->height_opt = cmd->add_option("--height", raw->height, "Frame height");
    raw->frames_opt = cmd->add_option("--frames", raw->frames, "Frame count (>= 2)");
    raw->pattern_opt =
        cmd->add_option("--pattern", raw->pattern, "Pattern: blob|grating|random");
    raw->motion_opt = cmd->add_option(
        "--motion", raw->motion, "Motion: translate:<dx>,<dy>|divergent:<alpha>");
    raw->illumination_opt = cmd->add_option(
        "--illum", raw->illumination, "Illumination: none|uniform:<beta>|spatial:<gamma>");
    raw->seed_opt = cmd->add_option("--seed", raw->seed, "Pattern seed");
}

RunConfig resolve(const RawArgs& raw) {
    RunConfig config;
    if (!raw.config_file.empty()) rflow::cli::apply_json_file(raw.config_file, &config);

    auto given = [](const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; };
    if (given(raw.input_opt)) config.input = raw.input;
    if (given(raw.output_opt)) config.output = raw.output;
    if (given(raw.method_opt)) config.method = rflow::cli::parse_method(raw.method);
    if (given(raw.encode_opt)) config.encode = rflow::cli::parse_encode(raw.encode);
    if (given(raw.sigma_opt)) config.sigma = raw.sigma;
    if (given(raw.window_opt)) config.window = raw.window;
    if (given(raw.tau_opt)) config.tau = raw.tau;
    if (given(raw.norm_opt)) config.norm = rflow::cli::parse_norm(raw.norm);
    if (given(raw.border_opt)) config.border = rflow::cli::parse_border(raw.border);
    if (given(raw.threads_opt)) config.threads = raw.threads;
    if (given(raw.hardware_opt)) config.hardware = raw.hardware;
    if (given(raw.width_opt)) config.sequence.width = raw.width;
    if (given(raw.height_opt)) config.sequence.height = raw.height;
    if (given(raw.frames_opt)) config.sequence.frame_count = raw.frames;
    if (given(raw.pattern_opt)) config.sequence.pattern = rflow::cli::parse_pattern(raw.pattern);
    if (given(raw.motion_opt)) config.sequence.motion = rflow::cli::parse_motion(raw.motion);
    if (given(raw.illumination_opt)) {
        config.sequence.illumination = rflow::cli::parse_illumination(raw.illumination);
    }
    if (given(raw.seed_opt)) config.sequence.seed = raw.seed;

    if (!raw.simd.empty()) {
        if (raw.simd == "scalar") {
            rflow::kernels::set_active_level(rflow::kernels::IsaLevel::scalar);
        } else if (raw.simd == "avx2") {
            rflow::kernels::set_active_level(rflow::kernels::IsaLevel::avx2);
        } else {
            throw CLI::ValidationError("--simd", "expected scalar or avx2");
        }
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Training-free dense flow estimation (windowed least-squares + "
                 "irrotational residual flow) with HSV and magnitude-stack encodings"};
    app.require_subcommand(1);

    RawArgs flow_raw, encode_raw, synth_raw, bench_raw;

    CLI::App* flow_cmd =
        app.add_subcommand("flow", "Write .flo flow fields per consecutive frame pair");
    add_common_options(flow_cmd, &flow_raw);

    CLI::App* encode_cmd =
        app.add_subcommand("encode", "Write encoded PNGs per consecutive frame pair");
    add_common_options(encode_cmd, &encode_raw);

    CLI::App* synth_cmd = app.add_subcommand(
        "synth", "Generate a synthetic sequence with analytic ground truth");
    add_common_options(synth_cmd, &synth_raw);
    add_synth_options(synth_cmd, &synth_raw);

    CLI::App* bench_cmd =
        app.add_subcommand("bench", "Time the per-pair pipeline and write a CSV report");
    add_common_options(bench_cmd, &bench_raw);

    CLI::App* eval_cmd = app.add_subcommand("eval", "Endpoint error of estimates vs truth");
    rflow::cli::EvalOptions eval_options;
    eval_cmd->add_option("--estimates", eval_options.estimates, "Directory of estimate .flo")
        ->required();
    eval_cmd->add_option("--truth", eval_options.truth, "Directory of ground-truth .flo")
        ->required();
    bool no_mask = false;
    eval_cmd->add_flag("--no-mask", no_mask, "Ignore mask_NNNN.pgm validity masks");
    eval_cmd->add_flag("--json", eval_options.json_output, "Machine-readable JSON output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (flow_cmd->parsed()) return rflow::cli::cmd_flow(resolve(flow_raw));
        if (encode_cmd->parsed()) return rflow::cli::cmd_encode(resolve(encode_raw));
        if (synth_cmd->parsed()) return rflow::cli::cmd_synth(resolve(synth_raw));
        if (bench_cmd->parsed()) return rflow::cli::cmd_bench(resolve(bench_raw));
        if (eval_cmd->parsed()) {
            eval_options.use_masks = !no_mask;
            return rflow::cli::cmd_eval(eval_options);
        }
    } catch (const std::exception& e) {
        std::cerr << "rflow: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
