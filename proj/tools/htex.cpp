// htex: generate synthetic surfaces, analyze images along the Hilbert path,
// and place them on the complexity-entropy / Fisher-entropy planes.

#include <htex/errors.hpp>
#include <htex/grid.hpp>
#include <htex/hilbert.hpp>
#include <htex/imageio.hpp>
#include <htex/ordinal.hpp>
#include <htex/patterns2d.hpp>
#include <htex/plot.hpp>
#include <htex/quantifiers.hpp>
#include <htex/report.hpp>
#include <htex/synth.hpp>
#include <htex/version.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr int kExitInput = 1;
constexpr int kExitComputation = 2;

// Bad user input that is not tied to a specific file.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(const std::exception_ptr& ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const InputError&) {
        return kExitInput;
    } catch (const htex::io_error&) {
        return kExitInput;
    } catch (const std::invalid_argument&) {
        return kExitInput;
    } catch (const std::out_of_range&) {
        return kExitInput;
    } catch (...) {
        return kExitComputation;
    }
}

std::string describe(const std::exception_ptr& ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const std::exception& e) {
        return e.what();
    } catch (...) {
        return "unknown error";
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_value(const std::string& s, const std::string& what) {
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw InputError("bad " + what + ": '" + s + "'");
    }
    return v;
}

// ---- Runs and manifests ------------------------------------------------------

struct Invocation {
    std::vector<std::string> arguments;
    std::string effective_config;
};

json manifest_base(const Invocation& inv, const std::string& verb) {
    return {{"tool", "htex"},
            {"version", htex::kVersion},
            {"verb", verb},
            {"arguments", inv.arguments},
            {"effective_options", inv.effective_config}};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw htex::io_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw htex::io_error("write failed: " + path.string());
}

fs::path manifest_path(const fs::path& out) {
    return fs::path(out.string() + ".manifest.json");
}

template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F&& body) {
    jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) body(i);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

unsigned default_jobs() {
    return std::max(1U, std::thread::hardware_concurrency());
}

// ---- Inputs --------------------------------------------------------------------

bool is_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".pgm" || ext == ".ppm" || ext == ".pnm" || ext == ".png";
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& args) {
    std::vector<fs::path> out;
    for (const auto& a : args) {
        const fs::path p(a);
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(p)) {
                if (entry.is_regular_file() && is_image_extension(entry.path())) {
                    found.push_back(entry.path());
                }
            }
            std::ranges::sort(found);
            if (found.empty()) throw InputError(a + ": no PGM/PPM/PNG files in directory");
            out.insert(out.end(), found.begin(), found.end());
        } else if (fs::exists(p, ec)) {
            out.push_back(p);
        } else {
            throw InputError(a + ": no such file or directory");
        }
    }
    return out;
}

struct LoadedInput {
    std::string label;
    std::string source;
    std::string kind = "image";  // cascade | fbs | image
    std::optional<std::uint64_t> seed;
    htex::Matrix full;
    htex::ScalarGrid grid{1};
};

// Generated surfaces carry a sidecar pointing at lossless doubles; anything
// else is decoded, reduced to a scalar and center-cropped.
LoadedInput load_input(const fs::path& path) {
    LoadedInput in;
    in.label = path.stem().string();
    in.source = path.string();
    fs::path sidecar = path;
    sidecar.replace_extension(".json");
    if (fs::exists(sidecar) && path.extension() != ".json") {
        json meta;
        try {
            std::ifstream f(sidecar);
            meta = json::parse(f);
        } catch (const json::exception& e) {
            throw htex::io_error(sidecar.string() + ": " + e.what());
        }
        if (meta.value("generator", "") == "htex" && meta.contains("raw")) {
            try {
                in.kind = meta.at("kind").get<std::string>();
                const int level = meta.at("level").get<int>();
                if (meta.contains("seed") && !meta["seed"].is_null()) {
                    in.seed = meta["seed"].get<std::uint64_t>();
                }
                in.grid = htex::read_raw_f64(sidecar.parent_path() / meta.at("raw").get<std::string>(),
                                             level);
            } catch (const json::exception& e) {
                throw htex::io_error(sidecar.string() + ": " + e.what());
            }
            in.full = in.grid.matrix();
            return in;
        }
    }
    const auto img = htex::load_image(path);
    in.full = htex::to_scalar(img);
    in.grid = htex::center_crop_pow2(in.full).grid;
    return in;
}

int default_dim(const std::string& kind) {
    if (kind == "cascade") return 6;
    if (kind == "fbs") return 5;
    return 8;
}

struct TransformSpec {
    std::string name;
    std::optional<htex::RigidOp> rigid;
    double degrees = 0.0;
};

TransformSpec parse_transform(const std::string& s) {
    if (const auto op = htex::parse_rigid_op(s)) return {std::string(htex::to_string(*op)), op, 0.0};
    if (s.starts_with("rotate:")) {
        const double deg = parse_value<double>(s.substr(7), "rotation angle");
        return {s, std::nullopt, deg};
    }
    throw InputError("unknown transform '" + s +
                     "' (expected id, rot90, rot180, rot270, mirror or rotate:<degrees>)");
}

htex::ScalarGrid apply(const TransformSpec& t, const LoadedInput& in) {
    if (t.rigid) return htex::transform(in.grid, *t.rigid);
    return htex::rotate_arbitrary(in.full, t.degrees);
}

struct Outcome {
    std::vector<htex::AnalysisRow> rows;
    std::vector<std::string> warnings;
    std::exception_ptr error;
};

htex::AnalysisRow make_row(const LoadedInput& in, const std::string& method,
                           const std::string& transform, int tau,
                           const htex::OrdinalDistribution& dist, const htex::InfoTriple& triple) {
    htex::AnalysisRow r;
    r.label = in.label;
    r.source = in.source;
    r.method = method;
    r.dim = dist.order();
    r.tau = tau;
    r.transform = transform;
    r.triple = triple;
    r.samples = dist.samples();
    r.undersampled = dist.undersampled();
    r.seed = in.seed;
    return r;
}

// Merges per-input outcomes in input order, reports diagnostics and returns
// the process exit code.
int collect(std::vector<Outcome>& outcomes, const std::vector<fs::path>& inputs,
            std::vector<htex::AnalysisRow>& rows, json& failures) {
    int code = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        for (const auto& w : outcomes[i].warnings) std::cerr << "warning: " << w << '\n';
        if (outcomes[i].error) {
            const std::string msg = describe(outcomes[i].error);
            std::cerr << "error: " << inputs[i].string() << ": " << msg << '\n';
            failures.push_back({{"input", inputs[i].string()}, {"error", msg}});
            code = std::max(code, exit_code_for(outcomes[i].error));
        }
        rows.insert(rows.end(), outcomes[i].rows.begin(), outcomes[i].rows.end());
    }
    return code;
}

void emit_rows(const std::vector<htex::AnalysisRow>& rows, const std::string& out) {
    if (out.empty()) {
        htex::write_csv(std::cout, rows);
    } else {
        htex::write_csv(fs::path(out), rows);
    }
}

json seeds_of(const std::vector<htex::AnalysisRow>& rows) {
    json seeds = json::object();
    for (const auto& r : rows) {
        if (r.seed) seeds[r.source] = *r.seed;
    }
    return seeds;
}

// ---- Verbs -----------------------------------------------------------------------

struct GenerateOptions {
    std::string kind;
    std::vector<double> probs{0.2434, 0.2522, 0.2566, 0.2478};
    int steps = 10;
    std::string variant = "plain";
    double hurst = 0.5;
    int level = 9;
    std::uint64_t seed = 0;
    std::string out;
};

int run_generate(const GenerateOptions& o, const Invocation& inv) {
    json meta = manifest_base(inv, "generate");
    meta["generator"] = "htex";
    meta["kind"] = o.kind;
    std::optional<htex::ScalarGrid> grid;
    if (o.kind == "cascade") {
        htex::CascadeSpec spec;
        if (o.probs.size() != 4) throw InputError("--probs needs four comma-separated values");
        std::ranges::copy(o.probs, spec.probs.begin());
        spec.steps = o.steps;
        htex::validate(spec);
        grid = htex::cascade(spec);
        if (o.variant == "ordered") grid = htex::ordered_variant(*grid);
        if (o.variant == "randomized") grid = htex::randomized_variant(*grid, o.seed);
        meta["probs"] = spec.probs;
        meta["steps"] = spec.steps;
        meta["variant"] = o.variant;
        meta["seed"] = o.variant == "randomized" ? json(o.seed) : json(nullptr);
    } else {
        const htex::FbsSpec spec{o.hurst, o.level, o.seed};
        htex::validate(spec);
        grid = htex::brownian_surface(spec);
        meta["hurst"] = spec.hurst;
        meta["seed"] = spec.seed;
    }
    meta["level"] = grid->level();

    const fs::path out(o.out);
    fs::path raw = out;
    raw.replace_extension(".f64");
    fs::path sidecar = out;
    sidecar.replace_extension(".json");
    if (raw == out || sidecar == out) throw InputError("--out must not end in .f64 or .json");
    const auto q = htex::write_pgm16(*grid, out);
    htex::write_raw_f64(*grid, raw);
    meta["image"] = out.filename().string();
    meta["raw"] = raw.filename().string();
    meta["raw_format"] = "float64 little-endian, row-major";
    meta["quantization"] = {{"min", q.min}, {"max", q.max}};
    write_json(sidecar, meta);
    return 0;
}

struct AnalyzeOptions {
    std::vector<std::string> inputs;
    std::optional<int> dim;
    int delay = 1;
    std::vector<std::string> transforms{"id"};
    unsigned jobs = default_jobs();
    std::string out;
};

int run_analyze(const AnalyzeOptions& o, const Invocation& inv) {
    std::vector<TransformSpec> transforms;
    for (const auto& t : o.transforms) transforms.push_back(parse_transform(t));
    const auto inputs = expand_inputs(o.inputs);

    std::vector<Outcome> outcomes(inputs.size());
    parallel_for(inputs.size(), o.jobs, [&](std::size_t i) {
        auto& res = outcomes[i];
        try {
            const auto in = load_input(inputs[i]);
            const int dim = o.dim.value_or(default_dim(in.kind));
            for (const auto& t : transforms) {
                const auto seq = htex::unfold(apply(t, in));
                const auto dist = htex::build_distribution(seq, dim, o.delay);
                res.rows.push_back(make_row(in, "hilbert", t.name, o.delay, dist, htex::info_triple(dist)));
                if (dist.undersampled()) res.warnings.push_back(in.label + " [" + t.name + "]: " + dist.warning());
            }
        } catch (...) {
            res.rows.clear();
            res.error = std::current_exception();
        }
    });

    std::vector<htex::AnalysisRow> rows;
    json failures = json::array();
    const int code = collect(outcomes, inputs, rows, failures);
    emit_rows(rows, o.out);
    if (!o.out.empty()) {
        json m = manifest_base(inv, "analyze");
        json in = json::array();
        for (const auto& p : inputs) in.push_back(p.string());
        m["inputs"] = in;
        m["seeds"] = seeds_of(rows);
        m["rows"] = rows.size();
        m["failures"] = failures;
        m["output"] = o.out;
        write_json(manifest_path(o.out), m);
    }
    return code;
}

struct CompareOptions {
    std::vector<std::string> inputs;
    int dim = 8;
    std::string patch = "2x4";
    std::vector<int> patch_delay{1, 1};
    unsigned jobs = default_jobs();
    std::string out;
};

htex::PatchSpec parse_patch(const std::string& shape, const std::vector<int>& delays) {
    const auto dims = split(shape, 'x');
    if (dims.size() != 2) throw InputError("--patch must look like 2x4");
    if (delays.size() != 2) throw InputError("--patch-delay must look like 1,1");
    htex::PatchSpec spec{parse_value<int>(dims[0], "patch rows"), parse_value<int>(dims[1], "patch columns"),
                         delays[0], delays[1]};
    htex::validate(spec);
    return spec;
}

int run_compare(const CompareOptions& o, const Invocation& inv) {
    const auto spec = parse_patch(o.patch, o.patch_delay);
    if (spec.order() != o.dim) {
        throw InputError("patch " + o.patch + " has " + std::to_string(spec.order()) +
                         " cells but --dim is " + std::to_string(o.dim));
    }
    const auto inputs = expand_inputs(o.inputs);

    std::vector<Outcome> outcomes(inputs.size());
    parallel_for(inputs.size(), o.jobs, [&](std::size_t i) {
        auto& res = outcomes[i];
        try {
            const auto in = load_input(inputs[i]);
            const auto cmp = htex::compare_methods(in.grid, o.dim, spec);
            res.rows.push_back(make_row(in, "hilbert", "id", 1, cmp.hilbert_dist, cmp.hilbert));
            res.rows.push_back(make_row(in, "patch2d", "id", spec.row_delay, cmp.patch_dist, cmp.patch));
            for (const auto* d : {&cmp.hilbert_dist, &cmp.patch_dist}) {
                if (d->undersampled()) res.warnings.push_back(in.label + ": " + d->warning());
            }
        } catch (...) {
            res.rows.clear();
            res.error = std::current_exception();
        }
    });

    std::vector<htex::AnalysisRow> rows;
    json failures = json::array();
    const int code = collect(outcomes, inputs, rows, failures);
    emit_rows(rows, o.out);
    if (!o.out.empty()) {
        json m = manifest_base(inv, "compare");
        json in = json::array();
        for (const auto& p : inputs) in.push_back(p.string());
        m["inputs"] = in;
        m["seeds"] = seeds_of(rows);
        m["patch"] = {{"rows", spec.rows}, {"cols", spec.cols},
                      {"row_delay", spec.row_delay}, {"col_delay", spec.col_delay}};
        m["rows"] = rows.size();
        m["failures"] = failures;
        m["output"] = o.out;
        write_json(manifest_path(o.out), m);
    }
    return code;
}

struct PlotCommandOptions {
    std::string csv;
    std::string plane = "cecp";
    std::string group_by;
    std::string title;
    std::string out;
};

int run_plot(const PlotCommandOptions& o, const Invocation& inv) {
    const auto rows = htex::read_csv(fs::path(o.csv));
    htex::PlotOptions opt;
    opt.plane = *htex::parse_plane(o.plane);
    if (!o.group_by.empty()) opt.group_by = o.group_by;
    opt.title = o.title;
    const std::string svg = htex::render_svg(rows, opt);
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw htex::io_error("cannot write " + o.out);
    out << svg;
    if (!out) throw htex::io_error("write failed: " + o.out);

    json m = manifest_base(inv, "plot");
    m["inputs"] = json::array({o.csv});
    m["rows"] = rows.size();
    m["output"] = o.out;
    write_json(manifest_path(o.out), m);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hilbert-curve ordinal-pattern texture analysis"};
    app.set_version_flag("--version", htex::kVersion);
    app.set_config("--config", "", "key=value option file, one [generate]/[analyze]/... section per verb");
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* generate = app.add_subcommand("generate", "synthesize a cascade or fractional Brownian surface");
    generate->fallthrough();
    generate->add_option("kind", gen.kind, "cascade | fbs")->required()->check(CLI::IsMember({"cascade", "fbs"}));
    generate->add_option("--probs", gen.probs, "cascade quadrant probabilities TL,TR,BL,BR")
        ->delimiter(',')
        ->capture_default_str();
    generate->add_option("--steps", gen.steps, "cascade subdivision steps")->capture_default_str();
    generate->add_option("--variant", gen.variant, "plain | ordered | randomized")
        ->check(CLI::IsMember({"plain", "ordered", "randomized"}))
        ->capture_default_str();
    generate->add_option("--hurst", gen.hurst, "Hurst exponent in (0, 1)")->capture_default_str();
    generate->add_option("--level", gen.level, "fBs grid side is 2^level")->capture_default_str();
    generate->add_option("--seed", gen.seed, "random seed (fbs, randomized cascade)")->capture_default_str();
    generate->add_option("--out", gen.out, "output PGM; .json sidecar and .f64 raw values go beside it")
        ->required();

    AnalyzeOptions ana;
    auto* analyze = app.add_subcommand("analyze", "Hilbert-path ordinal analysis of images");
    analyze->fallthrough();
    analyze->add_option("inputs", ana.inputs, "image files or directories")->required();
    analyze->add_option("--dim", ana.dim, "embedding dimension D (default 6 cascade, 5 fbs, 8 images)")
        ->check(CLI::Range(htex::kMinOrder, htex::kMaxOrder));
    analyze->add_option("--delay", ana.delay, "embedding delay tau")->check(CLI::PositiveNumber)->capture_default_str();
    analyze->add_option("--transforms", ana.transforms, "comma list of id, rot90, rot180, rot270, mirror, rotate:<deg>")
        ->delimiter(',')
        ->capture_default_str();
    analyze->add_option("--jobs", ana.jobs, "worker threads")->check(CLI::PositiveNumber);
    analyze->add_option("--out", ana.out, "output CSV (stdout when omitted)");

    CompareOptions cmp;
    auto* compare = app.add_subcommand("compare", "Hilbert path versus row-wise 2D patches");
    compare->fallthrough();
    compare->add_option("inputs", cmp.inputs, "image files or directories")->required();
    compare->add_option("--dim", cmp.dim, "embedding dimension D")
        ->check(CLI::Range(htex::kMinOrder, htex::kMaxOrder))
        ->capture_default_str();
    compare->add_option("--patch", cmp.patch, "patch shape rows x columns, e.g. 2x4")->capture_default_str();
    compare->add_option("--patch-delay", cmp.patch_delay, "patch delays: row delay,column delay")
        ->delimiter(',')
        ->capture_default_str();
    compare->add_option("--jobs", cmp.jobs, "worker threads")->check(CLI::PositiveNumber);
    compare->add_option("--out", cmp.out, "output CSV (stdout when omitted)");

    PlotCommandOptions plt;
    auto* plot = app.add_subcommand("plot", "SVG scatter plot of an analysis CSV");
    plot->fallthrough();
    plot->add_option("csv", plt.csv, "CSV written by analyze or compare")->required();
    plot->add_option("--plane", plt.plane, "cecp | fecp")
        ->check(CLI::IsMember({"cecp", "fecp"}))
        ->capture_default_str();
    plot->add_option("--group-by", plt.group_by, "column name or label:<regex>; adds mean +- std per group");
    plot->add_option("--title", plt.title, "plot title");
    plot->add_option("--out", plt.out, "output SVG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitInput;
    }

    Invocation inv;
    for (int i = 1; i < argc; ++i) inv.arguments.emplace_back(argv[i]);
    try {
        if (*generate) {
            inv.effective_config = generate->config_to_str(true, false);
            return run_generate(gen, inv);
        }
        if (*analyze) {
            inv.effective_config = analyze->config_to_str(true, false);
            return run_analyze(ana, inv);
        }
        if (*compare) {
            inv.effective_config = compare->config_to_str(true, false);
            return run_compare(cmp, inv);
        }
        inv.effective_config = plot->config_to_str(true, false);
        return run_plot(plt, inv);
    } catch (...) {
        const auto ep = std::current_exception();
        std::cerr << "error: " << describe(ep) << '\n';
        return exit_code_for(ep);
    }
}
