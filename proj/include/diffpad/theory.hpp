#pragma once

#include "diffpad/denoiser.hpp"
#include "diffpad/schedule.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace diffpad {

/// Outcome of an empirical bound verification run.
struct BoundReport {
    double gamma = 0.0;
    double c_eps = 0.0;        // measured sup of |eps_hat| / sqrt(1 - abar_t)
    double c_xi = 0.0;
    double xi = 0.0;
    double bound_value = 0.0;
    int trials = 0;
    double violation_rate = 0.0;
};

/// Terminal forward sample sqrt(abar_T) x_a + sqrt(1 - abar_T) eps with
/// eps drawn standard normal (or injected explicitly).
std::vector<double> forward_terminal(const std::vector<double>& x_a,
                                     const NoiseSchedule& sched, uint64_t rng_seed);
std::vector<double> forward_terminal(const std::vector<double>& x_a,
                                     const NoiseSchedule& sched,
                                     const std::vector<double>& eps);

/// Score callback: (state, schedule step index) -> score vector.
using ScoreFn = std::function<std::vector<double>(const std::vector<double>&, int)>;

/// Euler-Maruyama integration of the reverse-time VP SDE with drift
/// -1/2 beta_t [x + 2 s(x,t)] and diffusion sqrt(beta_t), from normalized
/// time 1 down to 0. Deterministic given the seed. max_score_norm, when
/// given, receives the largest |s(x,t)| seen along the trajectory.
std::vector<double> reverse_sde_euler(const std::vector<double>& x_T, const ScoreFn& score_fn,
                                      const NoiseSchedule& sched, int steps,
                                      uint64_t rng_seed, double* max_score_norm = nullptr);

/// Chi-square concentration constant sqrt(2d + 4 sqrt(d log(1/xi)) + 4 log(1/xi)).
double c_xi(int d, double xi);

/// High-probability bound on the l2 gap between the diffusion-restored
/// patched input and the underlying clean data:
/// eps*|A| + gamma*C_eps + sqrt(e^gamma - 1)*C_xi.
double purification_bound(double epsilon, int area, double gamma, double c_eps,
                          double c_xi_val);

/// Bound on the gap between the restored image and the patched input
/// itself; the patch term doubles. Linear in the patch area, which is what
/// the dynamic threshold exploits.
double restoration_error_bound(double epsilon, int area, double gamma, double c_eps,
                               double c_xi_val);

/// Monte-Carlo check of the restoration-error bound on an analytic-score
/// diffusion: per trial, perturb `area` coordinates of a prior draw by
/// magnitude epsilon, diffuse forward, integrate the reverse SDE with the
/// prior's exact score, and compare |restored - clean| to the bound.
BoundReport empirical_bound_check(const GaussianPrior& prior, double epsilon, int area,
                                  int d, double xi, int trials, const NoiseSchedule& sched,
                                  uint64_t seed, int em_steps = 1000);

/// KL_t = abar_t |x_c - x_a|^2 / (2 (1 - abar_t)) for t = 1..T, the closed
/// form for two point masses diffused by the VP process. Entries with
/// abar_t = 1 are skipped.
std::vector<double> kl_monotonicity_series(const std::vector<double>& x_c,
                                           const std::vector<double>& x_a,
                                           const NoiseSchedule& sched);

}  // namespace diffpad
