#pragma once

#include "diffpad/image.hpp"

#include <vector>

namespace diffpad {

/// Discrete variance-preserving noise schedule. Steps are 1-based;
/// t=0 denotes clean data. The continuous span is normalized to [0,1]
/// with dt = 1/T.
struct NoiseSchedule {
    int steps = 0;                    // T
    std::vector<double> betas;        // beta_t, t = 1..T
    std::vector<double> alpha_bars;   // running product of (1 - beta_s)

    double beta(int t) const { return betas[static_cast<size_t>(t) - 1]; }
    double alpha_bar(int t) const { return alpha_bars[static_cast<size_t>(t) - 1]; }
    bool valid_step(int t) const { return t >= 1 && t <= steps; }
};

/// Linear beta ramp from beta_start to beta_end over T steps.
/// Requires T >= 1 and 0 < beta_start <= beta_end < 1.
NoiseSchedule make_linear_schedule(int T, double beta_start, double beta_end);

/// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps, elementwise.
ImageTensor forward_sample(const ImageTensor& x0, int t, const ImageTensor& eps,
                           const NoiseSchedule& sched);

/// x0 estimate (x_t - sqrt(1 - abar_t) eps_hat) / sqrt(abar_t).
ImageTensor estimate_x0(const ImageTensor& xt, int t, const ImageTensor& eps_hat,
                        const NoiseSchedule& sched);

/// Data-fidelity weight abar_t sigma^2 / (1 - abar_t). Rejects abar_t = 1.
double eta(int t, double sigma, const NoiseSchedule& sched);

/// gamma = -log(abar_T). The discrete product form of exp(-integral of beta),
/// so the value is internally consistent with the schedule tables.
double gamma(const NoiseSchedule& sched);

/// Riemann-sum form sum(beta_t); cross-check only. Agrees with gamma()
/// within 2% for the default schedule at T >= 1000.
double gamma_riemann(const NoiseSchedule& sched);

}  // namespace diffpad
