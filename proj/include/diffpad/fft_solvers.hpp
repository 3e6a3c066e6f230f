#pragma once

#include "diffpad/fft.hpp"
#include "diffpad/image.hpp"

#include <vector>

namespace diffpad {

/// 2-D convolution kernel anchored for circular convolution.
/// Tap (i,j) acts at spatial offset (i - anchor_row, j - anchor_col).
/// Taps sum to 1.
struct ConvKernel {
    int rows = 0;
    int cols = 0;
    int anchor_row = 0;
    int anchor_col = 0;
    std::vector<double> taps;

    double at(int r, int c) const { return taps[static_cast<size_t>(r) * cols + c]; }
    double& at(int r, int c) { return taps[static_cast<size_t>(r) * cols + c]; }
};

/// Discretized Keys bicubic interpolation kernel (a = -0.5) for integer
/// scale s, sampled on the integer grid and normalized to unit sum.
/// s = 1 degenerates to the discrete delta.
ConvKernel make_bicubic_kernel(int s);

/// DFT of the kernel zero-padded to rows x cols with its anchor circularly
/// shifted to index (0,0).
Spectrum kernel_spectrum(const ConvKernel& k, int rows, int cols);

/// Average of the s x s grid of contiguous (rows/s) x (cols/s) blocks.
Spectrum block_average(const Spectrum& spec, int s);

/// Multiply every (rows/s) x (cols/s) block of spec elementwise by factor.
Spectrum block_multiply(const Spectrum& spec, const Spectrum& factor, int s);

/// Zero-filling s-fold upsample of one channel plane.
std::vector<double> zero_upsample(const std::vector<double>& plane, int rows, int cols, int s);

/// Exact minimizer of |y_s - (k (*) x) downsampled by s|^2 + eta_t |x - x0_hat|^2
/// under circular convolution, solved per channel in the frequency domain.
ImageTensor sr_data_solution(const ImageTensor& x0_hat, const ImageTensor& y_s, int s,
                             const ConvKernel& k, double eta_t);

/// Frequency-domain state reused across sampler steps: the kernel spectra
/// and the observation term of the right-hand side are step-independent.
struct SrSolveContext {
    int scale = 1;
    int rows = 0, cols = 0, channels = 0;
    Spectrum kernel;                      // F(k)
    Spectrum kernel_sq_lr;                // block_average(|F(k)|^2, s)
    std::vector<Spectrum> obs_term;       // conj(F(k)) * F(y_s upsampled), per channel
};

SrSolveContext make_sr_context(const ImageTensor& y_s, int s, const ConvKernel& k,
                               int out_rows, int out_cols);

/// Same solution as sr_data_solution but reusing precomputed spectra.
ImageTensor sr_data_solution(const SrSolveContext& ctx, const ImageTensor& x0_hat,
                             double eta_t);

/// Per-pixel closed form (M*y + eta_t*x0_hat) / (M + eta_t); the mask is
/// shared across channels.
ImageTensor inpaint_data_solution(const ImageTensor& x0_hat, const ImageTensor& y_i,
                                  const BinaryMask& M, double eta_t);

}  // namespace diffpad
