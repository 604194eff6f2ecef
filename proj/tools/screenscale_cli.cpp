// screenscale: command-line front end for classification, scaling, offset
// training, benchmarking and synthetic fixture generation.
//
// Exit status: 0 success, 2 usage or input error, 3 processing error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include <screenscale/screenscale.hpp>

namespace fs = std::filesystem;
using namespace screenscale;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kProcessingError = 3;

/// Thrown for bad user input that is only detected after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config_path;
    std::string offsets_path;
    int threads = 0;  // 0: take from config
};

Config load_config(const Common& c) {
    Config cfg;
    if (!c.config_path.empty()) {
        if (!fs::exists(c.config_path)) throw UsageError(c.config_path + ": config file not found");
        cfg = config_from_json(read_json_file(c.config_path));
    }
    if (!c.offsets_path.empty()) {
        if (!fs::exists(c.offsets_path)) throw UsageError(c.offsets_path + ": offsets file not found");
        cfg.offsets = offsets_from_json(read_json_file(c.offsets_path), cfg.offsets);
    }
    if (c.threads > 0) cfg.threads = c.threads;
    return cfg;
}

MethodSettings settings_of(const Config& cfg) {
    MethodSettings s;
    s.classifier = cfg.classifier;
    s.offsets = cfg.offsets;
    s.threads = cfg.threads;
    return s;
}

Raster read_input(const std::string& path) {
    if (!fs::exists(path)) throw ImageError(ImageErrorKind::missing_file, path + ": no such file");
    return load_image(path);
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
    Common common;
    std::string input;
    std::string out;
    std::string summary;
};

int cmd_classify(const ClassifyArgs& a) {
    const Config cfg = load_config(a.common);
    const Raster img = read_input(a.input);
    const ContentMap map = classify(img, cfg.classifier);
    save_image(map.to_mask(), a.out);
    const std::string summary = a.summary.empty() ? a.out + ".json" : a.summary;
    write_text_file(summary, content_map_summary(map, cfg.classifier).dump(2) + "\n");
    std::cout << "major type: " << to_string(map.major_type()) << " (" << map.count(ContentType::text) << " text, "
              << map.count(ContentType::pictorial) << " pictorial blocks)\n";
    return kOk;
}

struct ScaleArgs {
    Common common;
    std::string input;
    std::string out;
    std::string method = "adaptive";
    double factor = 1.5;
};

int cmd_scale(const ScaleArgs& a) {
    const Method method = method_from_string(a.method);
    if (!(a.factor > 0.0)) throw UsageError("factor must be positive");
    const Config cfg = load_config(a.common);
    const Raster img = read_input(a.input);
    const Raster out = scale_with(method, img, a.factor, settings_of(cfg));
    save_image(out, a.out);
    std::cout << to_string(method) << ": " << img.width() << "x" << img.height() << " -> " << out.width() << "x"
              << out.height() << "\n";
    return kOk;
}

struct TrainArgs {
    Common common;
    std::string manifest;
    std::string out;
    std::string curves_dir;
};

int cmd_train(const TrainArgs& a) {
    const Config cfg = load_config(a.common);
    if (!fs::exists(a.manifest)) throw UsageError(a.manifest + ": manifest not found");
    CorpusManifest manifest;
    try {
        manifest = load_manifest(a.manifest);
    } catch (const FormatError& e) {
        throw UsageError(e.what());
    }
    if (manifest.count(ContentType::text) == 0 || manifest.count(ContentType::pictorial) == 0)
        throw UsageError("manifest must contain both text and pictorial blocks");

    // Relative image paths are resolved against the manifest's directory.
    const fs::path base = fs::path(a.manifest).parent_path();
    for (CorpusEntry& e : manifest.entries)
        if (fs::path(e.image).is_relative()) e.image = (base / e.image).string();

    const TrainingResult result = train_offsets(manifest, cfg.training);
    write_text_file(a.out, to_json_value(result.offsets).dump(2) + "\n");

    const fs::path dir = a.curves_dir.empty() ? fs::path(a.out).parent_path() : fs::path(a.curves_dir);
    if (!dir.empty()) fs::create_directories(dir);
    for (const ErrorCurve& c : result.curves) {
        const fs::path p = dir / ("curve_" + std::string(to_string(c.content)) + "_" +
                                  std::string(to_string(c.direction)) + ".csv");
        write_text_file(p.string(), format_curve_csv(c));
        std::cout << to_string(c.content) << " " << to_string(c.direction) << ": tau* = " << c.tau_star()
                  << (c.degenerate ? "  [degenerate]" : "") << "\n";
    }
    if (result.degenerate())
        std::cerr << "warning: degenerate training output (energy only at DC or minimum on the sweep boundary)\n";
    return kOk;
}

struct BenchArgs {
    Common common;
    std::vector<std::string> inputs;
    std::vector<double> factors{1.5};
    std::vector<std::string> methods{"bilinear", "bicubic", "sli-fixed", "adaptive"};
    std::string reference = "bicubic";
    int runs = 5;
    std::string out;
};

int cmd_bench(const BenchArgs& a) {
    if (a.runs < 1) throw UsageError("--runs must be >= 1");
    std::vector<Method> methods;
    for (const auto& m : a.methods) methods.push_back(method_from_string(m));
    const bool roundtrip = a.reference == "original";
    const Method reference = roundtrip ? Method::bilinear : method_from_string(a.reference);
    for (double f : a.factors)
        if (!(f > 0.0)) throw UsageError("factors must be positive");
    const Config cfg = load_config(a.common);
    const MethodSettings settings = settings_of(cfg);

    std::ostringstream csv;
    csv << kBenchHeader << "\n";
    bool any_error = false;
    std::cerr << "psnr reference: " << (roundtrip ? "original (downscale then upscale round trip)" : a.reference)
              << "\n";
    for (const std::string& path : a.inputs) {
        std::optional<Raster> img;
        std::string load_error;
        try {
            img = read_input(path);
        } catch (const std::exception& e) {
            load_error = e.what();
        }
        for (double factor : a.factors) {
            std::optional<Raster> source, truth, ref_out;
            if (img) {
                try {
                    if (roundtrip) {
                        truth = *img;
                        // Integer factors reduce by area mean; others fall back to bilinear.
                        const double k = std::round(factor);
                        source = k >= 1.0 && std::abs(factor - k) < 1e-12
                                     ? reduce_area(*img, static_cast<int>(k))
                                     : scale_bilinear(*img, 1.0 / factor, settings.threads);
                    } else {
                        source = *img;
                        ref_out = scale_with(reference, *source, factor, settings);
                    }
                } catch (const std::exception& e) {
                    load_error = e.what();
                    source.reset();
                }
            }
            for (Method m : methods) {
                BenchRow row;
                row.method = std::string(to_string(m));
                row.factor = factor;
                if (!source) {
                    row.error = load_error.empty() ? "input unavailable" : load_error;
                    any_error = true;
                    csv << format_bench_row(row) << "\n";
                    continue;
                }
                row.width = source->width();
                row.height = source->height();
                try {
                    std::vector<double> times;
                    Raster out;
                    for (int r = 0; r < a.runs; ++r) {
                        const auto t0 = std::chrono::steady_clock::now();
                        out = scale_with(m, *source, factor, settings);
                        const auto t1 = std::chrono::steady_clock::now();
                        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
                    }
                    std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
                    row.wall_ms = times[times.size() / 2];
                    OpTally tally;
                    scale_with(m, *source, factor, settings, &tally);
                    const OpCounts counts = count_ops(&tally);
                    row.adds = counts.additions();
                    row.muls = counts.multiplications();
                    const Raster& ref = roundtrip ? *truth : *ref_out;
                    if (ref.width() != out.width() || ref.height() != out.height())
                        throw std::runtime_error("output size differs from reference (factor does not invert)");
                    row.psnr_vs_reference = psnr(ref, out).psnr;
                } catch (const std::exception& e) {
                    row.error = e.what();
                    any_error = true;
                }
                csv << format_bench_row(row) << "\n";
            }
        }
    }
    if (a.out.empty()) std::cout << csv.str();
    else write_text_file(a.out, csv.str());
    return any_error ? kProcessingError : kOk;
}

struct GenArgs {
    std::string kind;
    int width = 1280;
    int height = 768;
    std::uint64_t seed = 1;
    int per_label = 200;
    std::string out;
    std::string truth;
};

int cmd_gen(const GenArgs& a) {
    if (a.kind == "corpus") {
        const synth::Corpus corpus = synth::training_corpus(a.seed, a.per_label);
        const fs::path dir(a.out);
        fs::create_directories(dir);
        CorpusManifest manifest;
        for (std::size_t i = 0; i < corpus.sources.size(); ++i) {
            const auto& s = corpus.sources[i];
            save_image(s.image, (dir / ("src_" + std::to_string(i) + ".ppm")).string());
        }
        for (const auto& b : corpus.blocks)
            manifest.entries.push_back(
                {"src_" + std::to_string(b.source) + ".ppm", b.x, b.y, corpus.sources[b.source].label});
        write_text_file((dir / "manifest.jsonl").string(), format_manifest(manifest));
        std::cout << "wrote " << manifest.entries.size() << " blocks from " << corpus.sources.size()
                  << " images to " << dir.string() << "\n";
        return kOk;
    }
    if (a.width < 1 || a.height < 1) throw UsageError("width and height must be positive");
    if (a.kind == "composite") {
        const synth::Composite c = synth::text_picture_composite(a.width, a.height, a.seed);
        save_image(c.image, a.out);
        if (!a.truth.empty()) {
            const BlockGrid grid(a.width, a.height);
            save_image(ContentMap(grid, c.truth).to_mask(), a.truth);
        }
    } else if (a.kind == "text") {
        save_image(synth::text_page(a.width, a.height, a.seed), a.out);
    } else if (a.kind == "picture") {
        save_image(synth::picture(a.width, a.height, a.seed), a.out);
    } else if (a.kind == "constant") {
        save_image(Raster(a.width, a.height, 3, 128), a.out);
    } else {
        throw UsageError("unknown generator '" + a.kind + "'");
    }
    return kOk;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "JSON configuration file");
    sub->add_option("--offsets", c.offsets_path, "JSON offset table overriding the configured offsets");
    sub->add_option("--threads", c.threads, "worker threads (overrides config)")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Content-adaptive screen image scaling"};
    app.require_subcommand(1);

    ClassifyArgs classify_args;
    auto* classify_cmd = app.add_subcommand("classify", "classify 16x16 blocks into text and pictorial content");
    classify_cmd->add_option("input", classify_args.input, "input P5/P6 image")->required();
    classify_cmd->add_option("--out", classify_args.out, "block mask PGM (text = 255)")->required();
    classify_cmd->add_option("--summary", classify_args.summary, "JSON summary path (default: <out>.json)");
    add_common(classify_cmd, classify_args.common);

    ScaleArgs scale_args;
    auto* scale_cmd = app.add_subcommand("scale", "scale an image");
    scale_cmd->add_option("input", scale_args.input, "input P5/P6 image")->required();
    scale_cmd->add_option("--out", scale_args.out, "output image")->required();
    scale_cmd->add_option("--factor", scale_args.factor, "scale factor")->capture_default_str();
    scale_cmd->add_option("--method", scale_args.method, "bilinear | bicubic | sli-fixed | adaptive")
        ->capture_default_str();
    add_common(scale_cmd, scale_args.common);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train shift offsets from a block corpus manifest");
    train_cmd->add_option("manifest", train_args.manifest, "JSON-lines corpus manifest")->required();
    train_cmd->add_option("--out", train_args.out, "output offsets JSON")->required();
    train_cmd->add_option("--curves-dir", train_args.curves_dir, "directory for error-curve CSVs");
    add_common(train_cmd, train_args.common);

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "time methods and report operation counts and PSNR");
    bench_cmd->add_option("inputs", bench_args.inputs, "input images")->required();
    bench_cmd->add_option("--factors", bench_args.factors, "scale factors")->capture_default_str();
    bench_cmd->add_option("--methods", bench_args.methods, "methods to run")->capture_default_str();
    bench_cmd->add_option("--reference", bench_args.reference,
                          "PSNR reference: a method name, or 'original' for a downscale/upscale round trip")
        ->capture_default_str();
    bench_cmd->add_option("--runs", bench_args.runs, "timed runs per row (median reported)")->capture_default_str();
    bench_cmd->add_option("--out", bench_args.out, "CSV output (default: stdout)");
    add_common(bench_cmd, bench_args.common);

    GenArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gen", "generate synthetic fixtures");
    gen_cmd->add_option("kind", gen_args.kind, "composite | text | picture | constant | corpus")->required();
    gen_cmd->add_option("--out", gen_args.out, "output image (or directory for corpus)")->required();
    gen_cmd->add_option("--width", gen_args.width)->capture_default_str();
    gen_cmd->add_option("--height", gen_args.height)->capture_default_str();
    gen_cmd->add_option("--seed", gen_args.seed)->capture_default_str();
    gen_cmd->add_option("--per-label", gen_args.per_label, "corpus blocks per label")->capture_default_str();
    gen_cmd->add_option("--truth", gen_args.truth, "composite ground-truth block mask PGM");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        if (*classify_cmd) return cmd_classify(classify_args);
        if (*scale_cmd) return cmd_scale(scale_args);
        if (*train_cmd) return cmd_train(train_args);
        if (*bench_cmd) return cmd_bench(bench_args);
        if (*gen_cmd) return cmd_gen(gen_args);
    } catch (const ImageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ImageErrorKind::write_failed ? kProcessingError : kInputError;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kProcessingError;
    }
    return kInputError;
}
