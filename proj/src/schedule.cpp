#include "diffpad/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace diffpad {

NoiseSchedule make_linear_schedule(int T, double beta_start, double beta_end) {
    if (T < 1) throw std::invalid_argument("schedule: T must be >= 1");
    if (!std::isfinite(beta_start) || !std::isfinite(beta_end))
        throw std::invalid_argument("schedule: beta bounds must be finite");
    if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0))
        throw std::invalid_argument("schedule: need 0 < beta_start <= beta_end < 1");

    NoiseSchedule s;
    s.steps = T;
    s.betas.resize(T);
    s.alpha_bars.resize(T);
    double running = 1.0;
    for (int i = 0; i < T; ++i) {
        double frac = (T == 1) ? 0.0 : static_cast<double>(i) / (T - 1);
        s.betas[i] = beta_start + frac * (beta_end - beta_start);
        running *= 1.0 - s.betas[i];
        s.alpha_bars[i] = running;
    }
    return s;
}

namespace {

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* op) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

void require_step(int t, const NoiseSchedule& sched, const char* op) {
    if (!sched.valid_step(t))
        throw std::invalid_argument(std::string(op) + ": step index out of range");
}

}  // namespace

ImageTensor forward_sample(const ImageTensor& x0, int t, const ImageTensor& eps,
                           const NoiseSchedule& sched) {
    require_same_shape(x0, eps, "forward_sample");
    require_step(t, sched, "forward_sample");
    double ab = sched.alpha_bar(t);
    double sa = std::sqrt(ab);
    double sb = std::sqrt(1.0 - ab);
    ImageTensor out(x0.height, x0.width, x0.channels);
    for (size_t i = 0; i < x0.size(); ++i)
        out.data[i] = sa * x0.data[i] + sb * eps.data[i];
    return out;
}

ImageTensor estimate_x0(const ImageTensor& xt, int t, const ImageTensor& eps_hat,
                        const NoiseSchedule& sched) {
    require_same_shape(xt, eps_hat, "estimate_x0");
    require_step(t, sched, "estimate_x0");
    double ab = sched.alpha_bar(t);
    if (!(ab > 0.0)) throw std::invalid_argument("estimate_x0: alpha_bar must be positive");
    double sa = std::sqrt(ab);
    double sb = std::sqrt(1.0 - ab);
    ImageTensor out(xt.height, xt.width, xt.channels);
    for (size_t i = 0; i < xt.size(); ++i)
        out.data[i] = (xt.data[i] - sb * eps_hat.data[i]) / sa;
    return out;
}

double eta(int t, double sigma, const NoiseSchedule& sched) {
    require_step(t, sched, "eta");
    if (sigma < 0.0) throw std::invalid_argument("eta: sigma must be >= 0");
    double ab = sched.alpha_bar(t);
    if (ab >= 1.0)
        throw std::invalid_argument("eta: alpha_bar = 1 (degenerate schedule)");
    return ab * sigma * sigma / (1.0 - ab);
}

double gamma(const NoiseSchedule& sched) {
    if (sched.steps < 1) throw std::invalid_argument("gamma: empty schedule");
    return -std::log(sched.alpha_bars.back());
}

double gamma_riemann(const NoiseSchedule& sched) {
    double sum = 0.0;
    for (double b : sched.betas) sum += b;
    return sum;  // sum(beta_t * dt) over [0,1] with rates beta_t * T
}

}  // namespace diffpad
