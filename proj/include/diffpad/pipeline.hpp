#pragma once

#include "diffpad/denoiser.hpp"
#include "diffpad/image.hpp"
#include "diffpad/schedule.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace diffpad {

/// All pipeline hyperparameters. Defaults follow the shipped calibration
/// (threshold line mu/nu, fixed binarization threshold, clean gate, scale,
/// observation noise, NFE budget).
struct DiffPadConfig {
    double mu = 0.066;
    double nu = 14.90;
    double tau_prime = 9.0;
    double clean_gate = 62.0;
    int scale = 4;
    double sigma = 0.001;
    int nfe = 20;
    double rho = 0.5;
    int schedule_T = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    uint64_t seed = 0;

    // optional denoiser sources, used by the CLI
    std::string gallery_dir;
    std::string model_path;

    void validate() const;
    NoiseSchedule make_schedule() const;
};

/// Merge JSON keys (schedule/sampler/localizer/denoiser/pipeline sections)
/// over the built-in defaults.
DiffPadConfig config_from_json(const nlohmann::json& j);
DiffPadConfig load_config(const std::string& path);

struct DecontaminationResult {
    ImageTensor output;
    bool clean_flag = false;
    std::optional<PatchBox> detected;
    struct Diagnostics {
        double restoration_mse = 0.0;
        double tau = 0.0;
        int estimated_area = 0;
        double runtime_ms = 0.0;
    } diagnostics;
};

/// Diagnostics as JSON. runtime_ms is included only when with_timing is
/// set, keeping the default serialization reproducible run to run.
nlohmann::json diagnostics_to_json(const DecontaminationResult& result,
                                   bool with_timing = false);

/// (1-A) x_c + A delta with A = 1 inside the box.
ImageTensor apply_patch(const ImageTensor& x_c, const ImageTensor& delta, const PatchBox& box);

enum class PatchKind { uniform_noise, checker, high_contrast };

/// Deterministic synthetic patch content (stand-in for trained attacks).
ImageTensor make_synthetic_patch(PatchKind kind, int side, uint64_t seed, int channels = 3);

/// Pad with mirrored rows/columns on the bottom/right so both dimensions
/// become multiples of s.
ImageTensor reflect_pad_to_multiple(const ImageTensor& x, int s);
ImageTensor crop(const ImageTensor& x, int height, int width);

/// Circular bicubic filtering followed by s-fold decimation. Pads
/// reflectively first when the dimensions are not divisible by s.
ImageTensor bicubic_downsample(const ImageTensor& x, int s);

/// Localization only (degrade, SR-restore, gate, threshold, slide window);
/// the output image is the unmodified input.
DecontaminationResult detect(const ImageTensor& x, const DiffPadConfig& cfg, const Denoiser& den);

/// Full decontamination: degrade, SR-restore, gate, localize, inpaint.
DecontaminationResult defend(const ImageTensor& x, const DiffPadConfig& cfg, const Denoiser& den);

PatchKind patch_kind_from_name(const std::string& name);
std::string patch_kind_name(PatchKind kind);

}  // namespace diffpad
