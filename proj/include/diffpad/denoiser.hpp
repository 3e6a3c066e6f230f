#pragma once

#include "diffpad/image.hpp"
#include "diffpad/schedule.hpp"

#include <memory>
#include <string>
#include <vector>

namespace diffpad {

struct ValueRange {
    double lo = 0.0;
    double hi = 255.0;
    bool canonical() const { return lo == 0.0 && hi == 255.0; }
};

/// Pluggable noise predictor. Implementations are immutable after
/// construction and safe for concurrent evaluation.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    /// Predicted total noise between x_t and x_0; same shape as the input.
    virtual ImageTensor predict(const ImageTensor& xt, int t) const = 0;

    /// Channel count the predictor expects; -1 accepts any.
    virtual int expected_channels() const { return -1; }

    /// Value range the predictor operates on; the sampler adapts at the
    /// boundary when this differs from the canonical [0,255].
    virtual ValueRange value_range() const { return {}; }

    const NoiseSchedule& schedule() const { return sched_; }

protected:
    explicit Denoiser(NoiseSchedule sched) : sched_(std::move(sched)) {}
    NoiseSchedule sched_;
};

/// Contract-checked evaluation (step validity, shape of the result).
ImageTensor predict_noise(const Denoiser& d, const ImageTensor& xt, int t);

/// Predicts zero noise everywhere.
class ZeroDenoiser : public Denoiser {
public:
    explicit ZeroDenoiser(NoiseSchedule sched) : Denoiser(std::move(sched)) {}
    ImageTensor predict(const ImageTensor& xt, int t) const override;
};

/// Diagonal Gaussian data distribution N(mean, diag(variance)) used as an
/// analytic prior for theory checks.
struct GaussianPrior {
    std::vector<double> mean;
    std::vector<double> variance;
};

/// Score of the VP-diffused marginal N(sqrt(abar_t) mu0, abar_t S0 + (1-abar_t) I):
/// -(x - sqrt(abar_t) mu0) / (abar_t s0_i + (1 - abar_t)) per coordinate.
std::vector<double> gaussian_score(const GaussianPrior& prior, const std::vector<double>& x,
                                   int t, const NoiseSchedule& sched);

/// Noise predictor with the exact score of a Gaussian prior,
/// eps_hat = -sqrt(1 - abar_t) * score. Treats the raster as a flat vector.
class GaussianAnalyticDenoiser : public Denoiser {
public:
    GaussianAnalyticDenoiser(GaussianPrior prior, NoiseSchedule sched)
        : Denoiser(std::move(sched)), prior_(std::move(prior)) {}
    ImageTensor predict(const ImageTensor& xt, int t) const override;

private:
    GaussianPrior prior_;
};

/// Softmax-weighted combination of gallery images, weights proportional to
/// exp(-|xt - sqrt(abar_t) g|^2 / (2 (1 - abar_t) temperature)).
ImageTensor gallery_x0(const std::vector<ImageTensor>& gallery, const ImageTensor& xt,
                       int t, const NoiseSchedule& sched, double temperature);

/// Desk-scale stand-in prior: soft nearest-neighbor over a fixed gallery,
/// with the noise prediction recovered by inverting the x0 estimate.
class GalleryDenoiser : public Denoiser {
public:
    GalleryDenoiser(std::vector<ImageTensor> gallery, NoiseSchedule sched,
                    double temperature = 1.0);
    ImageTensor predict(const ImageTensor& xt, int t) const override;
    int expected_channels() const override;

private:
    std::vector<ImageTensor> gallery_;
    double temperature_;
};

/// Loads a small fully-connected noise predictor from a JSON model file
/// (keys: "layers" with "weights"/"bias" matrices, optional "value_range").
/// Input features are the flattened raster plus the normalized timestep.
std::unique_ptr<Denoiser> load_mlp_denoiser(const std::string& path, NoiseSchedule sched);

}  // namespace diffpad
