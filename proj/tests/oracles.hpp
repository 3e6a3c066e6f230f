#pragma once

// Independent verification paths. Everything here is written against the
// problem definitions directly (dense matrices, exhaustive scans, spatial
// sums) and stays clear of the library's FFT / prefix-sum implementations.

#include "diffpad/fft_solvers.hpp"
#include "diffpad/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracles {

using diffpad::BinaryMask;
using diffpad::ConvKernel;
using diffpad::ImageTensor;
using diffpad::PatchBox;

/// Direct spatial circular convolution of one channel.
inline std::vector<double> circular_convolve(const std::vector<double>& plane, int h, int w,
                                             const ConvKernel& k) {
    std::vector<double> out(plane.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = 0; i < k.rows; ++i) {
                int sy = ((y - (i - k.anchor_row)) % h + h) % h;
                for (int j = 0; j < k.cols; ++j) {
                    int sx = ((x - (j - k.anchor_col)) % w + w) % w;
                    acc += k.at(i, j) * plane[static_cast<size_t>(sy) * w + sx];
                }
            }
            out[static_cast<size_t>(y) * w + x] = acc;
        }
    return out;
}

/// Degradation matrix rows: decimate(circular_convolve(x)) as an explicit
/// (h/s * w/s) x (h * w) dense operator.
inline std::vector<std::vector<double>> degradation_matrix(int h, int w, int s,
                                                           const ConvKernel& k) {
    int lh = h / s, lw = w / s;
    std::vector<std::vector<double>> A(static_cast<size_t>(lh) * lw,
                                       std::vector<double>(static_cast<size_t>(h) * w, 0.0));
    for (int r = 0; r < lh; ++r)
        for (int q = 0; q < lw; ++q) {
            auto& row = A[static_cast<size_t>(r) * lw + q];
            for (int i = 0; i < k.rows; ++i) {
                int sy = ((r * s - (i - k.anchor_row)) % h + h) % h;
                for (int j = 0; j < k.cols; ++j) {
                    int sx = ((q * s - (j - k.anchor_col)) % w + w) % w;
                    row[static_cast<size_t>(sy) * w + sx] += k.at(i, j);
                }
            }
        }
    return A;
}

/// Gaussian elimination with partial pivoting; solves M x = b in place.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> M,
                                       std::vector<double> b) {
    size_t n = M.size();
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(M[r][col]) > std::abs(M[pivot][col])) pivot = r;
        if (M[pivot][col] == 0.0) throw std::runtime_error("solve_dense: singular matrix");
        std::swap(M[col], M[pivot]);
        std::swap(b[col], b[pivot]);
        for (size_t r = col + 1; r < n; ++r) {
            double f = M[r][col] / M[col][col];
            if (f == 0.0) continue;
            for (size_t cc = col; cc < n; ++cc) M[r][cc] -= f * M[col][cc];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (size_t cc = r + 1; cc < n; ++cc) acc -= M[r][cc] * x[cc];
        x[r] = acc / M[r][r];
    }
    return x;
}

/// Exact minimizer of |y - A x|^2 + eta |x - x0|^2 through the normal
/// equations (A^T A + eta I) x = A^T y + eta x0, solved densely per channel.
inline ImageTensor dense_sr_oracle(const ImageTensor& x0_hat, const ImageTensor& y_s, int s,
                                   const ConvKernel& k, double eta) {
    int h = x0_hat.height, w = x0_hat.width;
    auto A = degradation_matrix(h, w, s, k);
    size_t n = static_cast<size_t>(h) * w;
    size_t m = A.size();

    std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
    for (size_t r = 0; r < m; ++r)
        for (size_t i = 0; i < n; ++i) {
            if (A[r][i] == 0.0) continue;
            for (size_t j = 0; j < n; ++j) M[i][j] += A[r][i] * A[r][j];
        }
    for (size_t i = 0; i < n; ++i) M[i][i] += eta;

    ImageTensor out(h, w, x0_hat.channels);
    for (int ch = 0; ch < x0_hat.channels; ++ch) {
        std::vector<double> rhs(n, 0.0);
        for (size_t r = 0; r < m; ++r) {
            double yv = y_s.data[r * y_s.channels + ch];
            for (size_t i = 0; i < n; ++i) rhs[i] += A[r][i] * yv;
        }
        for (size_t i = 0; i < n; ++i)
            rhs[i] += eta * x0_hat.data[i * x0_hat.channels + ch];
        std::vector<double> x = solve_dense(M, rhs);
        for (size_t i = 0; i < n; ++i) out.data[i * out.channels + ch] = x[i];
    }
    return out;
}

/// Value of the data-consistency objective |y - deg(x)|^2 + eta |x - x0|^2.
inline double sr_objective(const ImageTensor& x, const ImageTensor& x0_hat,
                           const ImageTensor& y_s, int s, const ConvKernel& k, double eta) {
    int h = x.height, w = x.width;
    double obj = 0.0;
    for (int ch = 0; ch < x.channels; ++ch) {
        std::vector<double> plane(static_cast<size_t>(h) * w);
        for (size_t i = 0; i < plane.size(); ++i) plane[i] = x.data[i * x.channels + ch];
        auto blurred = circular_convolve(plane, h, w, k);
        for (int r = 0; r < y_s.height; ++r)
            for (int q = 0; q < y_s.width; ++q) {
                double d = y_s.at(r, q, ch) - blurred[static_cast<size_t>(r) * s * w + q * s];
                obj += d * d;
            }
    }
    for (size_t i = 0; i < x.size(); ++i) {
        double d = x.data[i] - x0_hat.data[i];
        obj += eta * d * d;
    }
    return obj;
}

/// Exhaustive sliding-window maximum with the smallest-top, smallest-left
/// tie rule.
inline PatchBox brute_force_locate(const BinaryMask& mask, int side) {
    PatchBox best{0, 0, side};
    int best_count = -1;
    for (int top = 0; top + side <= mask.height; ++top)
        for (int left = 0; left + side <= mask.width; ++left) {
            int count = 0;
            for (int y = top; y < top + side; ++y)
                for (int x = left; x < left + side; ++x) count += mask.at(y, x) ? 1 : 0;
            if (count > best_count) {
                best_count = count;
                best = {top, left, side};
            }
        }
    return best;
}

/// Average ranks with ties sharing the mean rank.
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        double mean_rank = (static_cast<double>(i) + j) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) r[order[k]] = mean_rank;
        i = j + 1;
    }
    return r;
}

/// Spearman rank correlation with tie-averaged ranks.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    auto rx = ranks(x), ry = ranks(y);
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= rx.size();
    my /= ry.size();
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracles
