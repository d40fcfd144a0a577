#include "rflow/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <regex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rflow/io.hpp"

namespace rflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string pad4(std::size_t n) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04zu", n);
    return buf;
}

// Runs fn(0..count-1) on up to `threads` workers; rethrows the first error.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<Frame> load_frames(const std::vector<std::string>& files) {
    std::vector<Frame> frames(files.size());
    bool color_notice = false;
    for (std::size_t i = 0; i < files.size(); ++i) {
        LoadedFrame loaded = load_frame(files[i]);
        if (loaded.was_color && !color_notice) {
            std::cerr << "note: color input converted to grayscale (BT.601 luma)\n";
            color_notice = true;
        }
        frames[i] = std::move(loaded.frame);
    }
    return frames;
}

void write_sidecar(const std::string& artifact_path, const json& config,
                   const std::string& command, std::size_t pair_index) {
    json sidecar = config;
    sidecar["command"] = command;
    sidecar["artifact"] = fs::path(artifact_path).filename().string();
    sidecar["pair"] = pair_index;
    std::ofstream out(artifact_path + ".json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write sidecar for " + artifact_path);
    out << sidecar.dump(2) << '\n';
}

json config_json(const RunConfig& config, const std::string& command) {
    json j;
    j["command"] = command;
    j["input"] = config.input;
    j["output"] = config.output;
    j["method"] = method_name(config.method);
    j["encode"] = encode_name(config.encode);
    j["sigma"] = config.sigma;
    j["window"] = config.window;
    j["tau"] = config.tau;
    j["norm"] = norm_name(config.norm);
    j["border"] = border_name(config.border);
    j["threads"] = config.threads;
    if (!config.hardware.empty()) j["hardware"] = config.hardware;

    json s;
    s["width"] = config.sequence.width;
    s["height"] = config.sequence.height;
    s["frames"] = config.sequence.frame_count;
    switch (config.sequence.pattern) {
        case synth::Pattern::gaussian_blob: s["pattern"] = "blob"; break;
        case synth::Pattern::sine_grating: s["pattern"] = "grating"; break;
        case synth::Pattern::random_smooth: s["pattern"] = "random"; break;
    }
    const synth::Motion& m = config.sequence.motion;
    s["motion"] = m.kind == synth::Motion::Kind::translation
                      ? "translate:" + format_double(m.dx) + "," + format_double(m.dy)
                      : "divergent:" + format_double(m.alpha);
    const synth::Illumination& il = config.sequence.illumination;
    switch (il.kind) {
        case synth::Illumination::Kind::none: s["illumination"] = "none"; break;
        case synth::Illumination::Kind::uniform_ramp:
            s["illumination"] = "uniform:" + format_double(il.beta);
            break;
        case synth::Illumination::Kind::spatial_ramp:
            s["illumination"] = "spatial:" + format_double(il.gamma);
            break;
    }
    s["seed"] = config.sequence.seed;
    j["synth"] = s;
    return j;
}

int run_guarded(const char* command, const std::function<int()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        std::cerr << "rflow " << command << ": " << e.what() << '\n';
        return 1;
    }
}

std::vector<std::string> sorted_files(const std::string& dir, const std::string& ext) {
    std::vector<std::string> files;
    if (!fs::is_directory(dir)) return files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() == ext) files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

PipelineConfig RunConfig::pipeline() const {
    PipelineConfig p;
    p.lk.window = window;
    p.lk.eigen_threshold = tau;
    p.reynolds.sigma = sigma;
    p.reynolds.border = border;
    p.norm = norm;
    return p;
}

std::string config_to_json(const RunConfig& config, const std::string& command) {
    return config_json(config, command).dump(2);
}

void apply_json_file(const std::string& path, RunConfig* config) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);

    config->input = j.value("input", config->input);
    config->output = j.value("output", config->output);
    if (j.contains("method")) config->method = parse_method(j["method"].get<std::string>());
    if (j.contains("encode")) config->encode = parse_encode(j["encode"].get<std::string>());
    config->sigma = j.value("sigma", config->sigma);
    config->window = j.value("window", config->window);
    config->tau = j.value("tau", config->tau);
    if (j.contains("norm")) config->norm = parse_norm(j["norm"].get<std::string>());
    if (j.contains("border")) config->border = parse_border(j["border"].get<std::string>());
    config->threads = j.value("threads", config->threads);
    config->hardware = j.value("hardware", config->hardware);

    if (j.contains("synth")) {
        const json& s = j["synth"];
        config->sequence.width = s.value("width", config->sequence.width);
        config->sequence.height = s.value("height", config->sequence.height);
        config->sequence.frame_count = s.value("frames", config->sequence.frame_count);
        if (s.contains("pattern"))
            config->sequence.pattern = parse_pattern(s["pattern"].get<std::string>());
        if (s.contains("motion"))
            config->sequence.motion = parse_motion(s["motion"].get<std::string>());
        if (s.contains("illumination"))
            config->sequence.illumination =
                parse_illumination(s["illumination"].get<std::string>());
        config->sequence.seed = s.value("seed", config->sequence.seed);
    }
}

FlowMethod parse_method(const std::string& name) {
    if (name == "lk") return FlowMethod::lk;
    if (name == "reynolds") return FlowMethod::reynolds;
    if (name == "combined") return FlowMethod::combined;
    throw std::invalid_argument("unknown method: " + name + " (lk|reynolds|combined)");
}

EncodeMode parse_encode(const std::string& name) {
    if (name == "hsv") return EncodeMode::hsv;
    if (name == "plus") return EncodeMode::plus;
    if (name == "none") return EncodeMode::none;
    throw std::invalid_argument("unknown encoding: " + name + " (hsv|plus)");
}

BorderPolicy parse_border(const std::string& name) {
    if (name == "replicate") return BorderPolicy::replicate;
    if (name == "reflect") return BorderPolicy::reflect;
    if (name == "zero") return BorderPolicy::zero;
    throw std::invalid_argument("unknown border policy: " + name + " (replicate|reflect|zero)");
}

NormalizationPolicy parse_norm(const std::string& text) {
    if (text == "per-frame") return NormalizationPolicy::per_frame_max();
    if (text.rfind("fixed:", 0) == 0) {
        const double scale = std::stod(text.substr(6));
        if (!(scale > 0.0)) throw std::invalid_argument("fixed scale must be positive");
        return NormalizationPolicy::fixed(scale);
    }
    throw std::invalid_argument("unknown normalization: " + text +
                                " (per-frame|fixed:<scale>)");
}

synth::Pattern parse_pattern(const std::string& name) {
    if (name == "blob") return synth::Pattern::gaussian_blob;
    if (name == "grating") return synth::Pattern::sine_grating;
    if (name == "random") return synth::Pattern::random_smooth;
    throw std::invalid_argument("unknown pattern: " + name + " (blob|grating|random)");
}

synth::Motion parse_motion(const std::string& text) {
    if (text.rfind("translate:", 0) == 0) {
        const std::string args = text.substr(10);
        const auto comma = args.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("motion translate needs dx,dy");
        }
        return synth::Motion::translation(std::stod(args.substr(0, comma)),
                                          std::stod(args.substr(comma + 1)));
    }
    if (text.rfind("divergent:", 0) == 0) {
        return synth::Motion::divergent(std::stod(text.substr(10)));
    }
    throw std::invalid_argument("unknown motion: " + text +
                                " (translate:<dx>,<dy>|divergent:<alpha>)");
}

synth::Illumination parse_illumination(const std::string& text) {
    if (text == "none") return {};
    if (text.rfind("uniform:", 0) == 0) {
        return synth::Illumination::uniform_ramp(std::stod(text.substr(8)));
    }
    if (text.rfind("spatial:", 0) == 0) {
        return synth::Illumination::spatial_ramp(std::stod(text.substr(8)));
    }
    throw std::invalid_argument("unknown illumination: " + text +
                                " (none|uniform:<beta>|spatial:<gamma>)");
}

std::string method_name(FlowMethod method) {
    switch (method) {
        case FlowMethod::lk: return "lk";
        case FlowMethod::reynolds: return "reynolds";
        case FlowMethod::combined: return "combined";
    }
    return "?";
}

std::string encode_name(EncodeMode mode) {
    switch (mode) {
        case EncodeMode::none: return "none";
        case EncodeMode::hsv: return "hsv";
        case EncodeMode::plus: return "plus";
    }
    return "?";
}

std::string border_name(BorderPolicy border) {
    switch (border) {
        case BorderPolicy::replicate: return "replicate";
        case BorderPolicy::reflect: return "reflect";
        case BorderPolicy::zero: return "zero";
    }
    return "?";
}

std::string norm_name(const NormalizationPolicy& norm) {
    return norm.mode == NormalizationPolicy::Mode::per_frame_max
               ? "per-frame"
               : "fixed:" + format_double(norm.scale);
}

std::vector<std::string> list_frame_files(const std::string& input) {
    std::vector<std::string> files;
    if (input.empty()) return files;

    if (fs::is_directory(input)) {
        for (const auto& entry : fs::directory_iterator(input)) {
            if (!entry.is_regular_file()) continue;
            // mask_NNNN.pgm files accompany ground truth, never input frames
            if (entry.path().filename().string().rfind("mask_", 0) == 0) continue;
            const std::string ext = entry.path().extension().string();
            if (ext == ".png" || ext == ".PNG" || ext == ".pgm" || ext == ".PGM") {
                files.push_back(entry.path().string());
            }
        }
    } else {
        const fs::path pattern_path(input);
        const fs::path dir =
            pattern_path.parent_path().empty() ? fs::path(".") : pattern_path.parent_path();
        const std::string pattern = pattern_path.filename().string();
        if (pattern.find('*') == std::string::npos &&
            pattern.find('?') == std::string::npos) {
            if (fs::is_regular_file(input)) files.push_back(input);
        } else if (fs::is_directory(dir)) {
            std::string rx;
            for (char c : pattern) {
                if (c == '*') rx += ".*";
                else if (c == '?') rx += '.';
                else if (std::isalnum(static_cast<unsigned char>(c))) rx += c;
                else { rx += '\\'; rx += c; }
            }
            const std::regex re(rx);
            for (const auto& entry : fs::directory_iterator(dir)) {
                if (!entry.is_regular_file()) continue;
                if (std::regex_match(entry.path().filename().string(), re)) {
                    files.push_back(entry.path().string());
                }
            }
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

int cmd_flow(const RunConfig& config) {
    return run_guarded("flow", [&]() -> int {
        const std::vector<std::string> files = list_frame_files(config.input);
        if (files.size() < 2) {
            std::cerr << "rflow flow: need at least 2 input frames, found " << files.size()
                      << " (input: " << config.input << ")\n";
            return 1;
        }
        const std::vector<Frame> frames = load_frames(files);
        fs::create_directories(config.output);
        const json sidecar_base = config_json(config, "flow");
        const PipelineConfig pipeline = config.pipeline();
        const fs::path out_dir(config.output);

        parallel_for(frames.size() - 1, config.threads, [&](std::size_t n) {
            const PairResult result =
                process_pair(frames[n], frames[n + 1], config.method, EncodeMode::none,
                             pipeline);
            const std::string tag = pad4(n);
            if (result.has_v_o) {
                const std::string path = (out_dir / ("v_o_" + tag + ".flo")).string();
                write_flo(result.v_o, path);
                write_sidecar(path, sidecar_base, "flow", n);
            }
            if (result.has_v_r) {
                const std::string path = (out_dir / ("v_r_" + tag + ".flo")).string();
                write_flo(result.v_r, path);
                write_sidecar(path, sidecar_base, "flow", n);
            }
            if (result.has_v_R) {
                const std::string path = (out_dir / ("v_R_" + tag + ".flo")).string();
                write_flo(result.v_R, path);
                write_sidecar(path, sidecar_base, "flow", n);
            }
        });
        std::cout << "wrote flow fields for " << frames.size() - 1 << " pair(s) to "
                  << config.output << '\n';
        return 0;
    });
}

int cmd_encode(const RunConfig& config) {
    return run_guarded("encode", [&]() -> int {
        if (config.encode == EncodeMode::none) {
            std::cerr << "rflow encode: choose an encoding (hsv|plus)\n";
            return 1;
        }
        const std::vector<std::string> files = list_frame_files(config.input);
        if (files.size() < 2) {
            std::cerr << "rflow encode: need at least 2 input frames, found "
                      << files.size() << " (input: " << config.input << ")\n";
            return 1;
        }
        const std::vector<Frame> frames = load_frames(files);
        fs::create_directories(config.output);
        const json sidecar_base = config_json(config, "encode");
        const PipelineConfig pipeline = config.pipeline();
        const fs::path out_dir(config.output);
        const std::string prefix = config.encode == EncodeMode::hsv ? "hsv_" : "plus_";

        parallel_for(frames.size() - 1, config.threads, [&](std::size_t n) {
            const PairResult result = process_pair(frames[n], frames[n + 1], config.method,
                                                   config.encode, pipeline);
            const std::string path = (out_dir / (prefix + pad4(n) + ".png")).string();
            write_png(result.encoded, path);
            write_sidecar(path, sidecar_base, "encode", n);
        });
        std::cout << "wrote " << frames.size() - 1 << " encoded image(s) to "
                  << config.output << '\n';
        return 0;
    });
}

int cmd_synth(const RunConfig& config) {
    return run_guarded("synth", [&]() -> int {
        const synth::Sequence sequence = synth::generate(config.sequence);
        fs::create_directories(config.output);
        const fs::path out_dir(config.output);

        for (std::size_t n = 0; n < sequence.frames.size(); ++n) {
            write_png(sequence.frames[n], (out_dir / ("frame_" + pad4(n) + ".png")).string());
        }
        for (std::size_t n = 0; n < sequence.truth.flow.size(); ++n) {
            write_flo(sequence.truth.flow[n], (out_dir / ("flow_" + pad4(n) + ".flo")).string());
            Image8 mask(config.sequence.width, config.sequence.height, 1);
            for (std::size_t p = 0; p < mask.byte_count(); ++p) {
                mask.data[p] = sequence.truth.valid[n][p] ? 255 : 0;
            }
            write_pgm(mask, (out_dir / ("mask_" + pad4(n) + ".pgm")).string());
        }

        json manifest = config_json(config, "synth");
        manifest["frame_files"] = sequence.frames.size();
        manifest["flow_files"] = sequence.truth.flow.size();
        manifest["mask_files"] = sequence.truth.valid.size();
        std::ofstream out((out_dir / "manifest.json").string(), std::ios::binary);
        if (!out) throw std::runtime_error("cannot write manifest.json");
        out << manifest.dump(2) << '\n';

        std::cout << "wrote " << sequence.frames.size() << " frame(s), "
                  << sequence.truth.flow.size() << " ground-truth flow field(s) to "
                  << config.output << '\n';
        return 0;
    });
}

int cmd_bench(const RunConfig& config) {
    return run_guarded("bench", [&]() -> int {
        const std::vector<std::string> files = list_frame_files(config.input);
        if (files.size() < 3) {
            std::cerr << "rflow bench: need at least 3 input frames, found "
                      << files.size() << " (input: " << config.input << ")\n";
            return 1;
        }
        const std::vector<Frame> frames = load_frames(files);

        BenchMethod method = BenchMethod::reynolds_hsv;
        if (config.method == FlowMethod::lk) {
            method = BenchMethod::lk_only;
        } else if (config.encode == EncodeMode::plus) {
            method = BenchMethod::reynolds_plus;
        }

        std::string hardware = config.hardware;
        if (hardware.empty()) {
            if (const char* env = std::getenv("RFLOW_HARDWARE")) hardware = env;
        }

        const BenchReport report =
            time_pipeline(frames, method, config.pipeline(), hardware);

        fs::create_directories(config.output);
        const std::string csv_path = (fs::path(config.output) / "bench.csv").string();
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + csv_path);
        write_csv(report, csv);

        json detail;
        detail["report"] = {{"method", report.method},
                            {"width", report.width},
                            {"height", report.height},
                            {"frames", report.frames},
                            {"mean_s", report.mean_s},
                            {"median_s", report.median_s},
                            {"p95_s", report.p95_s},
                            {"times_s", report.times_s},
                            {"hardware", report.hardware},
                            {"config", json::parse(report.config_json)}};
        detail["run"] = config_json(config, "bench");
        std::ofstream detail_out((fs::path(config.output) / "bench.json").string(),
                                 std::ios::binary);
        detail_out << detail.dump(2) << '\n';

        std::cout << report.method << " " << report.width << "x" << report.height
                  << " pairs=" << report.frames << " mean_s=" << format_double(report.mean_s)
                  << " median_s=" << format_double(report.median_s)
                  << " p95_s=" << format_double(report.p95_s) << '\n';
        return 0;
    });
}

int cmd_eval(const EvalOptions& options) {
    return run_guarded("eval", [&]() -> int {
        const std::vector<std::string> estimates = sorted_files(options.estimates, ".flo");
        const std::vector<std::string> truths = sorted_files(options.truth, ".flo");
        if (estimates.empty()) {
            std::cerr << "rflow eval: no .flo files in " << options.estimates << '\n';
            return 1;
        }
        if (estimates.size() != truths.size()) {
            std::cerr << "rflow eval: count mismatch (" << estimates.size()
                      << " estimates vs " << truths.size() << " truths)\n";
            return 1;
        }
        std::vector<std::string> masks;
        if (options.use_masks) {
            masks = sorted_files(options.truth, ".pgm");
            if (masks.size() != truths.size()) masks.clear();
        }

        json pairs_json = json::array();
        std::vector<double> pooled;
        for (std::size_t n = 0; n < estimates.size(); ++n) {
            const FlowField estimate = read_flo(estimates[n]);
            const FlowField truth = read_flo(truths[n]);
            std::vector<std::uint8_t> valid;
            if (!masks.empty()) {
                const Image8 mask = read_pgm(masks[n]);
                if (mask.width != truth.width || mask.height != truth.height) {
                    throw std::runtime_error("mask dimensions mismatch: " + masks[n]);
                }
                valid.resize(mask.byte_count());
                for (std::size_t p = 0; p < valid.size(); ++p) {
                    valid[p] = mask.data[p] > 0 ? 1 : 0;
                }
            }
            std::vector<double> distances = synth::endpoint_distances(estimate, truth, valid);
            const synth::EpeStats stats = synth::summarize_distances(distances);
            pooled.insert(pooled.end(), distances.begin(), distances.end());

            if (options.json_output) {
                pairs_json.push_back({{"pair", n},
                                      {"mean", stats.mean},
                                      {"median", stats.median},
                                      {"p95", stats.p95},
                                      {"count", stats.count}});
            } else {
                std::cout << "pair " << pad4(n) << ": mean=" << format_double(stats.mean)
                          << " median=" << format_double(stats.median)
                          << " p95=" << format_double(stats.p95) << " n=" << stats.count
                          << '\n';
            }
        }
        const synth::EpeStats total = synth::summarize_distances(std::move(pooled));
        if (options.json_output) {
            json out;
            out["pairs"] = pairs_json;
            out["aggregate"] = {{"mean", total.mean},
                                {"median", total.median},
                                {"p95", total.p95},
                                {"count", total.count}};
            std::cout << out.dump(2) << '\n';
        } else {
            std::cout << "aggregate: mean=" << format_double(total.mean)
                      << " median=" << format_double(total.median)
                      << " p95=" << format_double(total.p95) << " n=" << total.count << '\n';
        }
        return 0;
    });
}

}  // namespace rflow::cli
