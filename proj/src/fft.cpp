#include "diffpad/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace diffpad {

namespace {

// FFTW plan creation is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void run_dft(std::vector<std::complex<double>>& buf, int rows, int cols, int sign) {
    auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_2d(rows, cols, ptr, ptr, sign, FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fft: planner failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
}

}  // namespace

Spectrum fft2(const std::vector<double>& plane, int rows, int cols) {
    if (static_cast<size_t>(rows) * cols != plane.size())
        throw std::invalid_argument("fft2: plane size does not match rows*cols");
    Spectrum out(rows, cols);
    for (size_t i = 0; i < plane.size(); ++i) out.data[i] = plane[i];
    run_dft(out.data, rows, cols, FFTW_FORWARD);
    return out;
}

Spectrum fft2(const Spectrum& spec) {
    Spectrum out = spec;
    run_dft(out.data, out.rows, out.cols, FFTW_FORWARD);
    return out;
}

std::vector<double> ifft2_real(const Spectrum& spec) {
    Spectrum tmp = spec;
    run_dft(tmp.data, tmp.rows, tmp.cols, FFTW_BACKWARD);
    double scale = 1.0 / (static_cast<double>(tmp.rows) * tmp.cols);
    std::vector<double> out(tmp.data.size());
    for (size_t i = 0; i < tmp.data.size(); ++i) out[i] = tmp.data[i].real() * scale;
    return out;
}

}  // namespace diffpad
