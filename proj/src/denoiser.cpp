#include "diffpad/denoiser.hpp"

#include "diffpad/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace diffpad {

ImageTensor predict_noise(const Denoiser& d, const ImageTensor& xt, int t) {
    if (!d.schedule().valid_step(t))
        throw std::invalid_argument("predict_noise: step index out of range");
    if (d.expected_channels() >= 0 && xt.channels != d.expected_channels())
        throw std::invalid_argument("predict_noise: channel count mismatch");
    ImageTensor out = d.predict(xt, t);
    if (!out.same_shape(xt))
        throw numeric_error("predict_noise: implementation broke the shape contract");
    return out;
}

ImageTensor ZeroDenoiser::predict(const ImageTensor& xt, int) const {
    return ImageTensor(xt.height, xt.width, xt.channels, 0.0);
}

std::vector<double> gaussian_score(const GaussianPrior& prior, const std::vector<double>& x,
                                   int t, const NoiseSchedule& sched) {
    if (prior.mean.size() != x.size() || prior.variance.size() != x.size())
        throw std::invalid_argument("gaussian_score: dimension mismatch");
    if (!sched.valid_step(t))
        throw std::invalid_argument("gaussian_score: step index out of range");
    for (double v : prior.variance)
        if (!(v > 0.0)) throw std::invalid_argument("gaussian_score: variances must be > 0");
    double ab = sched.alpha_bar(t);
    double sa = std::sqrt(ab);
    std::vector<double> s(x.size());
    for (size_t i = 0; i < x.size(); ++i)
        s[i] = -(x[i] - sa * prior.mean[i]) / (ab * prior.variance[i] + (1.0 - ab));
    return s;
}

ImageTensor GaussianAnalyticDenoiser::predict(const ImageTensor& xt, int t) const {
    auto s = gaussian_score(prior_, xt.data, t, sched_);
    double sb = std::sqrt(1.0 - sched_.alpha_bar(t));
    ImageTensor out(xt.height, xt.width, xt.channels);
    for (size_t i = 0; i < s.size(); ++i) out.data[i] = -sb * s[i];
    return out;
}

ImageTensor gallery_x0(const std::vector<ImageTensor>& gallery, const ImageTensor& xt,
                       int t, const NoiseSchedule& sched, double temperature) {
    if (gallery.empty()) throw std::invalid_argument("gallery_x0: empty gallery");
    for (const auto& g : gallery)
        if (!g.same_shape(xt)) throw std::invalid_argument("gallery_x0: gallery shape mismatch");
    if (!sched.valid_step(t)) throw std::invalid_argument("gallery_x0: step out of range");

    double ab = sched.alpha_bar(t);
    double sa = std::sqrt(ab);
    double denom = 2.0 * (1.0 - ab) * std::max(temperature, 0.0);

    std::vector<double> d2(gallery.size());
    for (size_t gi = 0; gi < gallery.size(); ++gi) {
        double acc = 0.0;
        for (size_t i = 0; i < xt.size(); ++i) {
            double diff = xt.data[i] - sa * gallery[gi].data[i];
            acc += diff * diff;
        }
        d2[gi] = acc;
    }

    // softmax over -d2/denom; the zero-temperature limit is a hard argmin
    // (ties share the weight)
    std::vector<double> w(gallery.size(), 0.0);
    double z = 0.0;
    if (denom > 0.0) {
        double best = *std::min_element(d2.begin(), d2.end());
        for (size_t gi = 0; gi < gallery.size(); ++gi) {
            w[gi] = std::exp(-(d2[gi] - best) / denom);
            z += w[gi];
        }
    } else {
        double best = *std::min_element(d2.begin(), d2.end());
        for (size_t gi = 0; gi < gallery.size(); ++gi) {
            w[gi] = d2[gi] == best ? 1.0 : 0.0;
            z += w[gi];
        }
    }

    ImageTensor out(xt.height, xt.width, xt.channels, 0.0);
    for (size_t gi = 0; gi < gallery.size(); ++gi) {
        double wi = w[gi] / z;
        if (wi == 0.0) continue;
        for (size_t i = 0; i < out.size(); ++i)
            out.data[i] += wi * gallery[gi].data[i];
    }
    return out;
}

GalleryDenoiser::GalleryDenoiser(std::vector<ImageTensor> gallery, NoiseSchedule sched,
                                 double temperature)
    : Denoiser(std::move(sched)), gallery_(std::move(gallery)), temperature_(temperature) {
    if (gallery_.empty()) throw std::invalid_argument("GalleryDenoiser: empty gallery");
    for (const auto& g : gallery_)
        if (!g.same_shape(gallery_.front()))
            throw std::invalid_argument("GalleryDenoiser: inconsistent gallery shapes");
}

int GalleryDenoiser::expected_channels() const { return gallery_.front().channels; }

ImageTensor GalleryDenoiser::predict(const ImageTensor& xt, int t) const {
    ImageTensor x0 = gallery_x0(gallery_, xt, t, sched_, temperature_);
    double ab = sched_.alpha_bar(t);
    double sa = std::sqrt(ab);
    double sb = std::sqrt(1.0 - ab);
    if (sb == 0.0) throw numeric_error("GalleryDenoiser: alpha_bar = 1 has no noise axis");
    ImageTensor eps(xt.height, xt.width, xt.channels);
    for (size_t i = 0; i < eps.size(); ++i)
        eps.data[i] = (xt.data[i] - sa * x0.data[i]) / sb;
    return eps;
}

namespace {

/// Fully-connected eps predictor loaded from a portable JSON description.
class MlpDenoiser : public Denoiser {
public:
    struct Layer {
        std::vector<std::vector<double>> weights;  // out x in
        std::vector<double> bias;
    };

    MlpDenoiser(std::vector<Layer> layers, ValueRange range, NoiseSchedule sched)
        : Denoiser(std::move(sched)), layers_(std::move(layers)), range_(range) {}

    ValueRange value_range() const override { return range_; }

    ImageTensor predict(const ImageTensor& xt, int t) const override {
        std::vector<double> v = xt.data;
        v.push_back(static_cast<double>(t) / sched_.steps);  // time feature
        for (size_t li = 0; li < layers_.size(); ++li) {
            const Layer& L = layers_[li];
            if (!L.weights.empty() && L.weights[0].size() != v.size())
                throw std::invalid_argument("MlpDenoiser: input size does not match model");
            std::vector<double> next(L.weights.size());
            for (size_t o = 0; o < L.weights.size(); ++o) {
                double acc = L.bias[o];
                for (size_t i = 0; i < v.size(); ++i) acc += L.weights[o][i] * v[i];
                next[o] = (li + 1 < layers_.size()) ? std::tanh(acc) : acc;
            }
            v = std::move(next);
        }
        if (v.size() != xt.size())
            throw std::invalid_argument("MlpDenoiser: output size does not match raster");
        ImageTensor out(xt.height, xt.width, xt.channels);
        out.data = std::move(v);
        return out;
    }

private:
    std::vector<Layer> layers_;
    ValueRange range_;
};

}  // namespace

std::unique_ptr<Denoiser> load_mlp_denoiser(const std::string& path, NoiseSchedule sched) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_mlp_denoiser: cannot open " + path);
    nlohmann::json j;
    in >> j;

    std::vector<MlpDenoiser::Layer> layers;
    for (const auto& lj : j.at("layers")) {
        MlpDenoiser::Layer L;
        L.weights = lj.at("weights").get<std::vector<std::vector<double>>>();
        L.bias = lj.at("bias").get<std::vector<double>>();
        if (L.weights.size() != L.bias.size())
            throw std::invalid_argument("load_mlp_denoiser: weight/bias row mismatch");
        layers.push_back(std::move(L));
    }
    if (layers.empty()) throw std::invalid_argument("load_mlp_denoiser: no layers");

    ValueRange range;
    if (j.contains("value_range")) {
        range.lo = j["value_range"].at(0).get<double>();
        range.hi = j["value_range"].at(1).get<double>();
        if (!(range.hi > range.lo))
            throw std::invalid_argument("load_mlp_denoiser: bad value_range");
    }
    return std::make_unique<MlpDenoiser>(std::move(layers), range, std::move(sched));
}

}  // namespace diffpad
