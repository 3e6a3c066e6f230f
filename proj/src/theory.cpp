#include "diffpad/theory.hpp"

#include "diffpad/errors.hpp"
#include "diffpad/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace diffpad {

std::vector<double> forward_terminal(const std::vector<double>& x_a,
                                     const NoiseSchedule& sched,
                                     const std::vector<double>& eps) {
    if (eps.size() != x_a.size())
        throw std::invalid_argument("forward_terminal: noise dimension mismatch");
    double ab = sched.alpha_bars.back();
    double sa = std::sqrt(ab);
    double sb = std::sqrt(1.0 - ab);
    std::vector<double> out(x_a.size());
    for (size_t i = 0; i < x_a.size(); ++i) out[i] = sa * x_a[i] + sb * eps[i];
    return out;
}

std::vector<double> forward_terminal(const std::vector<double>& x_a,
                                     const NoiseSchedule& sched, uint64_t rng_seed) {
    Rng rng(rng_seed);
    std::vector<double> eps(x_a.size());
    for (double& v : eps) v = rng.normal();
    return forward_terminal(x_a, sched, eps);
}

std::vector<double> reverse_sde_euler(const std::vector<double>& x_T, const ScoreFn& score_fn,
                                      const NoiseSchedule& sched, int steps,
                                      uint64_t rng_seed, double* max_score_norm) {
    if (steps < 1) throw std::invalid_argument("reverse_sde_euler: steps must be >= 1");
    Rng rng(rng_seed);
    std::vector<double> x = x_T;
    const double du = 1.0 / steps;
    const int T = sched.steps;
    double sup_score = 0.0;

    for (int k = 0; k < steps; ++k) {
        double tau = 1.0 - k * du;  // reverse time, in (0, 1]
        int idx = std::clamp(static_cast<int>(std::ceil(tau * T)), 1, T);
        double rate = sched.beta(idx) * T;  // continuous-time rate on [0,1]

        std::vector<double> s = score_fn(x, idx);
        if (s.size() != x.size())
            throw std::invalid_argument("reverse_sde_euler: score dimension mismatch");

        double s2 = 0.0;
        for (double v : s) s2 += v * v;
        sup_score = std::max(sup_score, std::sqrt(s2));

        double noise_scale = std::sqrt(rate * du);
        for (size_t i = 0; i < x.size(); ++i) {
            x[i] += du * 0.5 * rate * (x[i] + 2.0 * s[i]) + noise_scale * rng.normal();
            if (!std::isfinite(x[i]))
                throw numeric_error("reverse_sde_euler: state diverged to non-finite values");
        }
    }
    if (max_score_norm) *max_score_norm = sup_score;
    return x;
}

double c_xi(int d, double xi) {
    if (d < 1) throw std::invalid_argument("c_xi: d must be >= 1");
    if (!(xi > 0.0) || xi > 1.0) throw std::invalid_argument("c_xi: xi must be in (0, 1]");
    double lg = std::log(1.0 / xi);
    return std::sqrt(2.0 * d + 4.0 * std::sqrt(d * lg) + 4.0 * lg);
}

double purification_bound(double epsilon, int area, double gamma, double c_eps, double c_xi_val) {
    if (epsilon < 0.0 || area < 0 || gamma < 0.0 || c_eps < 0.0 || c_xi_val < 0.0)
        throw std::invalid_argument("purification_bound: inputs must be non-negative");
    return epsilon * area + gamma * c_eps + std::sqrt(std::expm1(gamma)) * c_xi_val;
}

double restoration_error_bound(double epsilon, int area, double gamma, double c_eps, double c_xi_val) {
    return epsilon * area + purification_bound(epsilon, area, gamma, c_eps, c_xi_val);
}

BoundReport empirical_bound_check(const GaussianPrior& prior, double epsilon, int area,
                                  int d, double xi, int trials, const NoiseSchedule& sched,
                                  uint64_t seed, int em_steps) {
    if (static_cast<int>(prior.mean.size()) != d)
        throw std::invalid_argument("empirical_bound_check: prior dimension mismatch");
    if (area < 0 || area > d)
        throw std::invalid_argument("empirical_bound_check: area must be in [0, d]");
    if (trials < 100)
        throw std::invalid_argument("empirical_bound_check: need at least 100 trials");

    ScoreFn score = [&prior, &sched](const std::vector<double>& x, int t) {
        return gaussian_score(prior, x, t, sched);
    };

    std::vector<double> distances(trials);
    double c_eps_measured = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(derive_seed(seed, trial));

        std::vector<double> x_c(d);
        for (int i = 0; i < d; ++i)
            x_c[i] = prior.mean[i] + std::sqrt(prior.variance[i]) * rng.normal();

        // Patch analogue: `area` random coordinates each shifted by epsilon,
        // so |x_a - x_c| = epsilon * sqrt(area) <= epsilon * area.
        std::vector<double> x_a = x_c;
        std::vector<int> coords(d);
        for (int i = 0; i < d; ++i) coords[i] = i;
        for (int i = 0; i < area; ++i) {
            int j = i + static_cast<int>(rng.below(d - i));
            std::swap(coords[i], coords[j]);
            double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            x_a[coords[i]] += sign * epsilon;
        }

        std::vector<double> x_T = forward_terminal(x_a, sched, rng.next_u64());
        double sup_score = 0.0;
        std::vector<double> x_hat =
            reverse_sde_euler(x_T, score, sched, em_steps, rng.next_u64(), &sup_score);

        // |eps_hat| / sqrt(1 - abar_t) equals the score norm
        c_eps_measured = std::max(c_eps_measured, sup_score);

        double d2 = 0.0;
        for (int i = 0; i < d; ++i) {
            double diff = x_hat[i] - x_c[i];
            d2 += diff * diff;
        }
        distances[trial] = std::sqrt(d2);
    }

    BoundReport report;
    report.gamma = gamma(sched);
    report.c_eps = c_eps_measured;
    report.c_xi = c_xi(d, xi);
    report.xi = xi;
    report.trials = trials;
    report.bound_value = purification_bound(epsilon, area, report.gamma, report.c_eps, report.c_xi);
    int violations = 0;
    for (double dist : distances)
        if (dist > report.bound_value) ++violations;
    report.violation_rate = static_cast<double>(violations) / trials;
    return report;
}

std::vector<double> kl_monotonicity_series(const std::vector<double>& x_c,
                                           const std::vector<double>& x_a,
                                           const NoiseSchedule& sched) {
    if (x_c.size() != x_a.size())
        throw std::invalid_argument("kl_monotonicity_series: dimension mismatch");
    double d2 = 0.0;
    for (size_t i = 0; i < x_c.size(); ++i) {
        double diff = x_c[i] - x_a[i];
        d2 += diff * diff;
    }
    std::vector<double> series;
    series.reserve(sched.steps);
    for (int t = 1; t <= sched.steps; ++t) {
        double ab = sched.alpha_bar(t);
        if (ab >= 1.0) continue;  // degenerate entry carries no divergence
        series.push_back(ab * d2 / (2.0 * (1.0 - ab)));
    }
    return series;
}

}  // namespace diffpad
