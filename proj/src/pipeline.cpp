#include "diffpad/pipeline.hpp"

#include "diffpad/fft_solvers.hpp"
#include "diffpad/localizer.hpp"
#include "diffpad/rng.hpp"
#include "diffpad/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace diffpad {

void DiffPadConfig::validate() const {
    if (scale < 1) throw std::invalid_argument("config: scale must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("config: sigma must be > 0");
    if (nfe < 1) throw std::invalid_argument("config: nfe must be >= 1");
    if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("config: rho must be in [0,1]");
    if (clean_gate < 0.0) throw std::invalid_argument("config: clean_gate must be >= 0");
}

NoiseSchedule DiffPadConfig::make_schedule() const {
    return make_linear_schedule(schedule_T, beta_start, beta_end);
}

namespace {

template <typename T>
void read_key(const nlohmann::json& j, const char* section, const char* key, T& out) {
    if (j.contains(section) && j[section].contains(key)) out = j[section][key].get<T>();
}

}  // namespace

DiffPadConfig config_from_json(const nlohmann::json& j) {
    DiffPadConfig c;
    read_key(j, "schedule", "T", c.schedule_T);
    read_key(j, "schedule", "beta_start", c.beta_start);
    read_key(j, "schedule", "beta_end", c.beta_end);
    read_key(j, "sampler", "nfe", c.nfe);
    read_key(j, "sampler", "rho", c.rho);
    read_key(j, "sampler", "sigma", c.sigma);
    read_key(j, "localizer", "mu", c.mu);
    read_key(j, "localizer", "nu", c.nu);
    read_key(j, "localizer", "tau_prime", c.tau_prime);
    read_key(j, "localizer", "clean_gate", c.clean_gate);
    read_key(j, "denoiser", "gallery_dir", c.gallery_dir);
    read_key(j, "denoiser", "model_path", c.model_path);
    read_key(j, "pipeline", "scale", c.scale);
    read_key(j, "pipeline", "seed", c.seed);
    c.validate();
    return c;
}

DiffPadConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

nlohmann::json diagnostics_to_json(const DecontaminationResult& result, bool with_timing) {
    nlohmann::json j;
    j["clean_flag"] = result.clean_flag;
    if (result.detected) {
        j["detected"] = {{"top", result.detected->top},
                         {"left", result.detected->left},
                         {"side", result.detected->side}};
    } else {
        j["detected"] = nullptr;
    }
    j["restoration_mse"] = result.diagnostics.restoration_mse;
    j["tau"] = result.diagnostics.tau;
    j["estimated_area"] = result.diagnostics.estimated_area;
    j["runtime_ms"] = with_timing ? result.diagnostics.runtime_ms : 0.0;
    return j;
}

ImageTensor apply_patch(const ImageTensor& x_c, const ImageTensor& delta, const PatchBox& box) {
    if (!x_c.same_shape(delta)) throw std::invalid_argument("apply_patch: shape mismatch");
    if (!box.inside(x_c.height, x_c.width))
        throw std::invalid_argument("apply_patch: box out of bounds");
    ImageTensor out = x_c;
    for (int y = box.top; y < box.top + box.side; ++y)
        for (int x = box.left; x < box.left + box.side; ++x)
            for (int c = 0; c < out.channels; ++c)
                out.at(y, x, c) = delta.at(y, x, c);
    return out;
}

ImageTensor make_synthetic_patch(PatchKind kind, int side, uint64_t seed, int channels) {
    if (side < 1) throw std::invalid_argument("make_synthetic_patch: side must be >= 1");
    ImageTensor patch(side, side, channels);
    Rng rng(derive_seed(seed, 0xAD5EED));
    switch (kind) {
        case PatchKind::uniform_noise:
            for (double& v : patch.data) v = rng.uniform(0.0, 255.0);
            break;
        case PatchKind::checker:
            for (int y = 0; y < side; ++y)
                for (int x = 0; x < side; ++x) {
                    double v = ((y + x) % 2) ? 255.0 : 0.0;
                    for (int c = 0; c < channels; ++c) patch.at(y, x, c) = v;
                }
            break;
        case PatchKind::high_contrast: {
            // diagonal stripes of one saturated color and its complement
            std::vector<double> c1(channels), c2(channels);
            for (int c = 0; c < channels; ++c) {
                c1[c] = rng.uniform() < 0.5 ? 0.0 : 255.0;
                c2[c] = 255.0 - c1[c];
            }
            int period = 2 + static_cast<int>(rng.below(3));
            int phase = static_cast<int>(rng.below(static_cast<uint64_t>(period)));
            for (int y = 0; y < side; ++y)
                for (int x = 0; x < side; ++x) {
                    bool first = ((y + x + phase) / period) % 2 == 0;
                    for (int c = 0; c < channels; ++c)
                        patch.at(y, x, c) = first ? c1[c] : c2[c];
                }
            break;
        }
    }
    return patch;
}

ImageTensor reflect_pad_to_multiple(const ImageTensor& x, int s) {
    if (s < 1) throw std::invalid_argument("reflect_pad_to_multiple: scale must be >= 1");
    int ph = (s - x.height % s) % s;
    int pw = (s - x.width % s) % s;
    if (ph == 0 && pw == 0) return x;
    if (ph >= x.height || pw >= x.width)
        throw std::invalid_argument("reflect_pad_to_multiple: image too small for scale");
    ImageTensor out(x.height + ph, x.width + pw, x.channels);
    for (int y = 0; y < out.height; ++y) {
        int sy = y < x.height ? y : 2 * x.height - 2 - y;
        for (int xx = 0; xx < out.width; ++xx) {
            int sx = xx < x.width ? xx : 2 * x.width - 2 - xx;
            for (int c = 0; c < x.channels; ++c) out.at(y, xx, c) = x.at(sy, sx, c);
        }
    }
    return out;
}

ImageTensor crop(const ImageTensor& x, int height, int width) {
    if (height > x.height || width > x.width)
        throw std::invalid_argument("crop: target exceeds source");
    ImageTensor out(height, width, x.channels);
    for (int y = 0; y < height; ++y)
        for (int xx = 0; xx < width; ++xx)
            for (int c = 0; c < x.channels; ++c) out.at(y, xx, c) = x.at(y, xx, c);
    return out;
}

ImageTensor bicubic_downsample(const ImageTensor& x, int s) {
    if (s < 1) throw std::invalid_argument("bicubic_downsample: scale must be >= 1");
    if (s == 1) return x;
    ImageTensor img = reflect_pad_to_multiple(x, s);
    ConvKernel k = make_bicubic_kernel(s);

    int lh = img.height / s, lw = img.width / s;
    ImageTensor out(lh, lw, img.channels);
    for (int r = 0; r < lh; ++r) {
        for (int q = 0; q < lw; ++q) {
            for (int c = 0; c < img.channels; ++c) {
                double acc = 0.0;
                for (int i = 0; i < k.rows; ++i) {
                    int sy = ((r * s - (i - k.anchor_row)) % img.height + img.height) % img.height;
                    for (int j = 0; j < k.cols; ++j) {
                        int sx = ((q * s - (j - k.anchor_col)) % img.width + img.width) % img.width;
                        acc += k.at(i, j) * img.at(sy, sx, c);
                    }
                }
                out.at(r, q, c) = acc;
            }
        }
    }
    return out;
}

namespace {

double elapsed_ms_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

// Evaluates the wrapped denoiser on the unpadded raster and mirrors the
// prediction into the padded border, so priors built for the original image
// geometry keep working after reflective padding.
class PaddedDenoiser : public Denoiser {
public:
    PaddedDenoiser(const Denoiser& inner, int orig_h, int orig_w)
        : Denoiser(inner.schedule()), inner_(inner), orig_h_(orig_h), orig_w_(orig_w) {}

    ImageTensor predict(const ImageTensor& xt, int t) const override {
        ImageTensor eps = predict_noise(inner_, crop(xt, orig_h_, orig_w_), t);
        ImageTensor out(xt.height, xt.width, xt.channels);
        for (int y = 0; y < xt.height; ++y) {
            int sy = y < orig_h_ ? y : 2 * orig_h_ - 2 - y;
            for (int x = 0; x < xt.width; ++x) {
                int sx = x < orig_w_ ? x : 2 * orig_w_ - 2 - x;
                for (int c = 0; c < xt.channels; ++c) out.at(y, x, c) = eps.at(sy, sx, c);
            }
        }
        return out;
    }
    int expected_channels() const override { return inner_.expected_channels(); }
    ValueRange value_range() const override { return inner_.value_range(); }

private:
    const Denoiser& inner_;
    int orig_h_, orig_w_;
};

}  // namespace

DecontaminationResult detect(const ImageTensor& x, const DiffPadConfig& cfg, const Denoiser& den) {
    cfg.validate();
    auto t_start = std::chrono::steady_clock::now();
    const NoiseSchedule& sched = den.schedule();

    // 1: resolution degradation
    ImageTensor x_pad = reflect_pad_to_multiple(x, cfg.scale);
    ImageTensor y_s = bicubic_downsample(x_pad, cfg.scale);

    // 2: conditional super-resolution restoration (in padded space)
    RestorationTask sr_task{SuperResolutionTask{cfg.scale, make_bicubic_kernel(cfg.scale)},
                            y_s, cfg.sigma};
    const bool padded = x_pad.height != x.height || x_pad.width != x.width;
    PaddedDenoiser pad_den(den, x.height, x.width);
    const Denoiser& sr_den = padded ? static_cast<const Denoiser&>(pad_den) : den;
    ImageTensor x_hat_pad =
        restore(sr_task, sr_den, sched, cfg.nfe, derive_seed(cfg.seed, 1), cfg.rho);
    ImageTensor x_hat = crop(x_hat_pad, x.height, x.width);

    // 3: residual and the clean gate
    ResidualMap res = residual_map(x, x_hat);
    double mse = restoration_mse(x, x_hat);

    DecontaminationResult result;
    result.output = x;
    result.diagnostics.restoration_mse = mse;
    result.diagnostics.tau = dynamic_threshold(mse, cfg.mu, cfg.nu);

    if (is_clean(mse, cfg.clean_gate)) {
        result.clean_flag = true;
        result.diagnostics.estimated_area = 0;
        result.diagnostics.runtime_ms = elapsed_ms_since(t_start);
        return result;
    }

    // 4: dynamic threshold, area and side estimate
    int area = estimate_patch_area(res, result.diagnostics.tau);
    int side = estimate_side(area, x.height, x.width);
    result.diagnostics.estimated_area = area;

    // 5: fixed-threshold binarization and sliding-window localization
    BinaryMask hot = binarize(res, cfg.tau_prime);
    result.detected = locate_patch(hot, side);
    result.clean_flag = false;
    result.diagnostics.runtime_ms = elapsed_ms_since(t_start);
    return result;
}

DecontaminationResult defend(const ImageTensor& x, const DiffPadConfig& cfg, const Denoiser& den) {
    auto t_start = std::chrono::steady_clock::now();
    DecontaminationResult result = detect(x, cfg, den);
    if (result.clean_flag) return result;

    // 6: mask the localized region on the original input
    const PatchBox& box = *result.detected;
    BinaryMask keep(x.height, x.width, 1);
    ImageTensor y_i = x;
    for (int y = box.top; y < box.top + box.side; ++y)
        for (int xx = box.left; xx < box.left + box.side; ++xx) {
            keep.at(y, xx) = 0;
            for (int c = 0; c < x.channels; ++c) y_i.at(y, xx, c) = 0.0;
        }

    // 7: conditional inpainting restoration
    RestorationTask inp_task{InpaintingTask{std::move(keep)}, std::move(y_i), cfg.sigma};
    result.output =
        restore(inp_task, den, den.schedule(), cfg.nfe, derive_seed(cfg.seed, 2), cfg.rho);
    result.diagnostics.runtime_ms = elapsed_ms_since(t_start);
    return result;
}

PatchKind patch_kind_from_name(const std::string& name) {
    if (name == "uniform_noise") return PatchKind::uniform_noise;
    if (name == "checker") return PatchKind::checker;
    if (name == "high_contrast") return PatchKind::high_contrast;
    throw std::invalid_argument("unknown patch kind: " + name);
}

std::string patch_kind_name(PatchKind kind) {
    switch (kind) {
        case PatchKind::uniform_noise: return "uniform_noise";
        case PatchKind::checker: return "checker";
        case PatchKind::high_contrast: return "high_contrast";
    }
    return "?";
}

}  // namespace diffpad
