// diffpad: adversarial patch decontamination CLI.
//
// Subcommands:
//   defend        restore a patched image end to end
//   localize      detect the patch region without inpainting
//   verify-bound  Monte-Carlo check of the restoration-error bound
//   bench         synthetic patch suite over a directory of images

#include "diffpad/denoiser.hpp"
#include "diffpad/errors.hpp"
#include "diffpad/io.hpp"
#include "diffpad/metrics.hpp"
#include "diffpad/pipeline.hpp"
#include "diffpad/rng.hpp"
#include "diffpad/theory.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <thread>
#include <vector>

namespace {

using namespace diffpad;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct CommonOpts {
    std::string config_path;
    uint64_t seed = 0;
    int scale = 0;
    int nfe = 0;
    double sigma = 0.0;
    std::string gallery_dir;
    std::string model_path;
    bool timing = false;

    bool seed_set = false, scale_set = false, nfe_set = false, sigma_set = false;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--seed", o.seed, "base RNG seed")->each([&](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--scale", o.scale, "down-sampling factor s")->each([&](const std::string&) {
        o.scale_set = true;
    });
    cmd->add_option("--nfe", o.nfe, "denoiser evaluations per restoration")
        ->each([&](const std::string&) { o.nfe_set = true; });
    cmd->add_option("--sigma", o.sigma, "observation noise level")
        ->each([&](const std::string&) { o.sigma_set = true; });
    cmd->add_option("--gallery-dir", o.gallery_dir, "directory of prior gallery images");
    cmd->add_option("--model-path", o.model_path, "JSON model file for the denoiser");
    cmd->add_flag("--timing", o.timing, "include measured runtime in reports");
}

// flag > config file > built-in default
DiffPadConfig resolve_config(const CommonOpts& o) {
    DiffPadConfig cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path);
    if (o.seed_set) cfg.seed = o.seed;
    if (o.scale_set) cfg.scale = o.scale;
    if (o.nfe_set) cfg.nfe = o.nfe;
    if (o.sigma_set) cfg.sigma = o.sigma;
    if (!o.gallery_dir.empty()) cfg.gallery_dir = o.gallery_dir;
    if (!o.model_path.empty()) cfg.model_path = o.model_path;
    cfg.validate();
    return cfg;
}

std::unique_ptr<Denoiser> build_denoiser(const DiffPadConfig& cfg) {
    NoiseSchedule sched = cfg.make_schedule();
    if (!cfg.model_path.empty()) return load_mlp_denoiser(cfg.model_path, std::move(sched));
    if (!cfg.gallery_dir.empty()) {
        auto entries = load_image_dir(cfg.gallery_dir);
        if (entries.empty())
            throw std::invalid_argument("gallery directory has no decodable images: " +
                                        cfg.gallery_dir);
        std::vector<ImageTensor> gallery;
        gallery.reserve(entries.size());
        for (auto& e : entries) gallery.push_back(std::move(e.second));
        return std::make_unique<GalleryDenoiser>(std::move(gallery), std::move(sched));
    }
    throw std::invalid_argument("no denoiser source: set --gallery-dir or --model-path");
}

void copy_file_bytes(const std::string& from, const std::string& to) {
    std::ifstream in(from, std::ios::binary);
    std::ofstream out(to, std::ios::binary);
    if (!in || !out) throw std::invalid_argument("cannot copy " + from + " to " + to);
    out << in.rdbuf();
}

std::string format_double(double v, int precision = 6) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(precision);
    os << v;
    return os.str();
}

int worker_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DIFFPAD_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(std::min<long>(v, hw));
    }
    return static_cast<int>(hw);
}

// ------------------------------------------------------------- defend ----

int run_defend(const CommonOpts& opts, const std::string& input, const std::string& output,
               const std::string& diag_path) {
    DiffPadConfig cfg = resolve_config(opts);
    ImageTensor x = load_image(input);
    auto den = build_denoiser(cfg);

    DecontaminationResult result = defend(x, cfg, *den);
    if (result.clean_flag) {
        copy_file_bytes(input, output);  // untouched input, byte for byte
    } else {
        save_image(result.output, output);
    }

    nlohmann::json diag = diagnostics_to_json(result, opts.timing);
    std::string sidecar = diag_path.empty() ? output + ".json" : diag_path;
    std::ofstream out(sidecar);
    if (!out) throw std::invalid_argument("cannot write " + sidecar);
    out << diag.dump(2) << "\n";
    std::cout << diag.dump(2) << std::endl;
    return kExitOk;
}

// ----------------------------------------------------------- localize ----

int run_localize(const CommonOpts& opts, const std::string& input, const std::string& out_json,
                 const std::string& truth_box) {
    DiffPadConfig cfg = resolve_config(opts);

    PatchBox truth;
    bool have_truth = false;
    if (!truth_box.empty()) {
        char comma1 = 0, comma2 = 0;
        std::istringstream is(truth_box);
        if (!(is >> truth.top >> comma1 >> truth.left >> comma2 >> truth.side) ||
            comma1 != ',' || comma2 != ',' || truth.side < 1)
            throw std::invalid_argument("malformed --truth-box, want top,left,side");
        have_truth = true;
    }

    ImageTensor x = load_image(input);
    if (have_truth && !truth.inside(x.height, x.width))
        throw std::invalid_argument("--truth-box outside image bounds");
    auto den = build_denoiser(cfg);

    DecontaminationResult result = detect(x, cfg, *den);
    nlohmann::json diag = diagnostics_to_json(result, opts.timing);
    if (have_truth) {
        double iou = 0.0;
        if (result.detected) iou = miou(*result.detected, truth);
        else if (truth.side == 0) iou = 1.0;
        diag["miou"] = iou;
    }
    std::cout << diag.dump(2) << std::endl;
    if (!out_json.empty()) {
        std::ofstream out(out_json);
        if (!out) throw std::invalid_argument("cannot write " + out_json);
        out << diag.dump(2) << "\n";
    }
    return kExitOk;
}

// -------------------------------------------------------- verify-bound ----

int run_verify_bound(int dim, double xi, int trials, double epsilon, int area, uint64_t seed,
                     int steps, int schedule_T, double beta_start, double beta_end) {
    NoiseSchedule sched = make_linear_schedule(schedule_T, beta_start, beta_end);
    GaussianPrior prior{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
    BoundReport report =
        empirical_bound_check(prior, epsilon, area, dim, xi, trials, sched, seed, steps);

    nlohmann::json j;
    j["gamma"] = report.gamma;
    j["c_eps"] = report.c_eps;
    j["c_xi"] = report.c_xi;
    j["xi"] = report.xi;
    j["bound_value"] = report.bound_value;
    j["trials"] = report.trials;
    j["violation_rate"] = report.violation_rate;
    std::cout << j.dump(2) << std::endl;
    return kExitOk;
}

// -------------------------------------------------------------- bench ----

int run_bench(const CommonOpts& opts, const std::string& input_dir,
              const std::string& output_csv) {
    DiffPadConfig cfg = resolve_config(opts);
    auto entries = load_image_dir(input_dir);

    std::ofstream csv(output_csv);
    if (!csv) throw std::invalid_argument("cannot write " + output_csv);
    csv << "image_id,clean_flag,mse,tau,area,box_top,box_left,box_side,miou,psnr,runtime_ms\n";
    if (entries.empty()) return kExitOk;

    // gallery prior: explicit directory, else the bench images themselves
    DiffPadConfig den_cfg = cfg;
    if (den_cfg.gallery_dir.empty() && den_cfg.model_path.empty())
        den_cfg.gallery_dir = input_dir;
    auto den = build_denoiser(den_cfg);

    const double size_pcts[] = {0.03, 0.05, 0.07};
    const PatchKind kinds[] = {PatchKind::uniform_noise, PatchKind::checker,
                               PatchKind::high_contrast};

    struct Row {
        std::string id;
        const ImageTensor* clean;
        double pct;
        PatchKind kind;
        uint64_t seed;
        std::string text;
    };
    std::vector<Row> rows;
    for (const auto& [stem, img] : entries)
        for (double pct : size_pcts)
            for (PatchKind kind : kinds) {
                Row r;
                r.id = stem + "_a" + std::to_string(static_cast<int>(pct * 100 + 0.5)) + "_" +
                       patch_kind_name(kind);
                r.clean = &img;
                r.pct = pct;
                r.kind = kind;
                r.seed = derive_seed(cfg.seed, rows.size());
                rows.push_back(std::move(r));
            }

    auto process_row = [&](Row& r) {
        const ImageTensor& clean = *r.clean;
        int side = std::max(1, static_cast<int>(std::lround(
                                   std::sqrt(r.pct * clean.height * clean.width))));
        side = std::min({side, clean.height, clean.width});

        Rng pos_rng(derive_seed(r.seed, 100));
        PatchBox truth;
        truth.side = side;
        truth.top = static_cast<int>(pos_rng.below(clean.height - side + 1));
        truth.left = static_cast<int>(pos_rng.below(clean.width - side + 1));

        ImageTensor patch = make_synthetic_patch(r.kind, side, derive_seed(r.seed, 300),
                                                 clean.channels);
        ImageTensor delta = clean;
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x)
                for (int c = 0; c < clean.channels; ++c)
                    delta.at(truth.top + y, truth.left + x, c) = patch.at(y, x, c);
        ImageTensor x_a = apply_patch(clean, delta, truth);

        DiffPadConfig run_cfg = cfg;
        run_cfg.seed = derive_seed(r.seed, 200);
        DecontaminationResult res = defend(x_a, run_cfg, *den);

        double iou = res.detected ? miou(*res.detected, truth) : 0.0;
        double quality = psnr(res.output, clean);

        std::ostringstream os;
        os << r.id << "," << (res.clean_flag ? "true" : "false") << ","
           << format_double(res.diagnostics.restoration_mse) << ","
           << format_double(res.diagnostics.tau) << "," << res.diagnostics.estimated_area << ",";
        if (res.detected)
            os << res.detected->top << "," << res.detected->left << "," << res.detected->side;
        else
            os << "-1,-1,-1";
        os << "," << format_double(iou) << "," << format_double(quality) << ","
           << format_double(opts.timing ? res.diagnostics.runtime_ms : 0.0, 3);
        r.text = os.str();
    };

    int workers = std::min<int>(worker_cap(), static_cast<int>(rows.size()));
    if (workers <= 1) {
        for (auto& r : rows) process_row(r);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                for (size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
                    process_row(rows[i]);
            });
        for (auto& th : pool) th.join();
    }

    for (const auto& r : rows) csv << r.text << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DiffPAD adversarial patch decontamination"};
    app.require_subcommand(1);

    // defend
    auto* defend_cmd = app.add_subcommand("defend", "decontaminate one image");
    CommonOpts defend_opts;
    std::string defend_in, defend_out, defend_diag;
    defend_cmd->add_option("--input", defend_in, "input image (png/ppm/pgm)")->required();
    defend_cmd->add_option("--output", defend_out, "output image path")->required();
    defend_cmd->add_option("--diagnostics", defend_diag, "diagnostics JSON path");
    add_common_flags(defend_cmd, defend_opts);

    // localize
    auto* loc_cmd = app.add_subcommand("localize", "detect the patch region only");
    CommonOpts loc_opts;
    std::string loc_in, loc_json, loc_truth;
    loc_cmd->add_option("--input", loc_in, "input image")->required();
    loc_cmd->add_option("--out-json", loc_json, "write diagnostics JSON here");
    loc_cmd->add_option("--truth-box", loc_truth, "ground truth as top,left,side");
    add_common_flags(loc_cmd, loc_opts);

    // verify-bound
    auto* vb_cmd = app.add_subcommand("verify-bound", "empirical restoration-error bound check");
    int vb_dim = 16, vb_trials = 1000, vb_area = 0, vb_steps = 1000, vb_T = 1000;
    double vb_xi = 0.05, vb_eps = 0.0, vb_bstart = 1e-4, vb_bend = 0.02;
    uint64_t vb_seed = 0;
    vb_cmd->add_option("--dim", vb_dim, "data dimension");
    vb_cmd->add_option("--xi", vb_xi, "tail probability");
    vb_cmd->add_option("--trials", vb_trials, "Monte-Carlo trials");
    vb_cmd->add_option("--epsilon", vb_eps, "per-coordinate patch magnitude");
    vb_cmd->add_option("--area", vb_area, "perturbed coordinate count");
    vb_cmd->add_option("--seed", vb_seed, "RNG seed");
    vb_cmd->add_option("--steps", vb_steps, "Euler-Maruyama steps");
    vb_cmd->add_option("--schedule-T", vb_T, "schedule length");
    vb_cmd->add_option("--beta-start", vb_bstart, "schedule start");
    vb_cmd->add_option("--beta-end", vb_bend, "schedule end");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "synthetic patch suite over a directory");
    CommonOpts bench_opts;
    std::string bench_dir, bench_csv;
    bench_cmd->add_option("--input-dir", bench_dir, "directory of clean images")->required();
    bench_cmd->add_option("--output-csv", bench_csv, "CSV report path")->required();
    add_common_flags(bench_cmd, bench_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << std::endl;
        return kExitUsage;
    }

    try {
        if (defend_cmd->parsed())
            return run_defend(defend_opts, defend_in, defend_out, defend_diag);
        if (loc_cmd->parsed()) return run_localize(loc_opts, loc_in, loc_json, loc_truth);
        if (vb_cmd->parsed())
            return run_verify_bound(vb_dim, vb_xi, vb_trials, vb_eps, vb_area, vb_seed, vb_steps,
                                    vb_T, vb_bstart, vb_bend);
        if (bench_cmd->parsed()) return run_bench(bench_opts, bench_dir, bench_csv);
    } catch (const diffpad::numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << std::endl;
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << std::endl;
        return kExitNumeric;
    }
    return kExitUsage;
}
