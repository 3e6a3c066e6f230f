#include "diffpad/sampler.hpp"

#include "diffpad/errors.hpp"
#include "diffpad/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace diffpad {

namespace {

ImageTensor nearest_upsample(const ImageTensor& lr, int s) {
    ImageTensor out(lr.height * s, lr.width * s, lr.channels);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            for (int c = 0; c < out.channels; ++c)
                out.at(y, x, c) = lr.at(y / s, x / s, c);
    return out;
}

void affine_inplace(ImageTensor& img, double scale, double shift) {
    for (double& v : img.data) v = scale * v + shift;
}

}  // namespace

std::vector<int> sampler_timesteps(int T, int nfe) {
    if (nfe < 1) throw std::invalid_argument("restore: nfe must be >= 1");
    if (nfe > T) throw std::invalid_argument("restore: nfe exceeds schedule length");
    std::vector<int> steps(nfe);
    for (int i = 0; i < nfe; ++i) {
        double pos = (nfe == 1) ? 1.0
                                : T - static_cast<double>(i) * (T - 1) / (nfe - 1);
        int t = static_cast<int>(std::llround(pos));
        t = std::clamp(t, 1, T);
        if (i > 0 && t >= steps[i - 1]) t = steps[i - 1] - 1;  // keep strictly decreasing
        steps[i] = t;
    }
    steps.back() = 1;
    return steps;
}

ImageTensor restore(const RestorationTask& task, const Denoiser& den,
                    const NoiseSchedule& sched, int nfe, uint64_t rng_seed, double rho) {
    if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("restore: rho must be in [0,1]");
    const std::vector<int> steps = sampler_timesteps(sched.steps, nfe);
    Rng rng(rng_seed);

    // The loop runs in the denoiser's declared range; observations and the
    // final output are mapped at the boundary.
    const ValueRange range = den.value_range();
    const double scale = (range.hi - range.lo) / 255.0;
    const double shift = range.lo;
    const double sigma_eff = task.sigma * scale;

    ImageTensor obs = task.observation;
    if (!range.canonical()) affine_inplace(obs, scale, shift);

    // Coarse initial estimate from the observation.
    ImageTensor init;
    const SuperResolutionTask* sr = std::get_if<SuperResolutionTask>(&task.op);
    const InpaintingTask* inp = std::get_if<InpaintingTask>(&task.op);
    SrSolveContext sr_ctx;
    if (sr) {
        init = nearest_upsample(obs, sr->scale);
        sr_ctx = make_sr_context(obs, sr->scale, sr->kernel, init.height, init.width);
    } else {
        if (inp->mask.height != obs.height || inp->mask.width != obs.width)
            throw std::invalid_argument("restore: inpainting mask shape mismatch");
        double mid = 127.5 * scale + shift;
        init = obs;
        for (int y = 0; y < init.height; ++y)
            for (int x = 0; x < init.width; ++x)
                if (!inp->mask.at(y, x))
                    for (int c = 0; c < init.channels; ++c) init.at(y, x, c) = mid;
    }

    auto gaussian_like = [&](const ImageTensor& ref) {
        ImageTensor z(ref.height, ref.width, ref.channels);
        for (double& v : z.data) v = rng.normal();
        return z;
    };

    // x at the largest timestep: forward-sample the coarse estimate.
    ImageTensor x = forward_sample(init, steps.front(), gaussian_like(init), sched);

    ImageTensor x_tilde;
    for (size_t i = 0; i < steps.size(); ++i) {
        int t = steps[i];
        double ab = sched.alpha_bar(t);
        double sa = std::sqrt(ab);
        double sb = std::sqrt(1.0 - ab);

        ImageTensor eps_hat = predict_noise(den, x, t);
        ImageTensor x0_hat = estimate_x0(x, t, eps_hat, sched);
        double eta_t = eta(t, sigma_eff, sched);
        x_tilde = sr ? sr_data_solution(sr_ctx, x0_hat, eta_t)
                     : inpaint_data_solution(x0_hat, obs, inp->mask, eta_t);

        for (double v : x_tilde.data)
            if (!std::isfinite(v)) throw numeric_error("restore: non-finite state");

        if (i + 1 == steps.size()) break;

        int t_prev = steps[i + 1];
        double ab_prev = sched.alpha_bar(t_prev);
        double sa_prev = std::sqrt(ab_prev);
        double sb_prev = std::sqrt(1.0 - ab_prev);
        double w_eps = std::sqrt(1.0 - rho);
        double w_z = std::sqrt(rho);

        ImageTensor z = gaussian_like(x);
        for (size_t k = 0; k < x.size(); ++k) {
            double eps_eff = (x.data[k] - sa * x_tilde.data[k]) / sb;
            x.data[k] = sa_prev * x_tilde.data[k] +
                        sb_prev * (w_eps * eps_eff + w_z * z.data[k]);
        }
    }

    if (!range.canonical()) affine_inplace(x_tilde, 1.0 / scale, -shift / scale);
    clamp_image(x_tilde);
    return x_tilde;
}

}  // namespace diffpad
