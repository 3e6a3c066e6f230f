#pragma once

#include "diffpad/image.hpp"
#include "diffpad/rng.hpp"

#include <cmath>
#include <vector>

namespace testsupport {

using diffpad::ImageTensor;
using diffpad::Rng;

/// Procedural photo-like fixture: smooth gradients, sinusoids and blobs,
/// deterministic in the index. Values stay well inside [0,255].
inline ImageTensor make_gallery_image(int index, int h, int w, int channels = 3) {
    Rng rng(diffpad::derive_seed(0xD1FFBAD, index));
    double gx = rng.uniform(-0.8, 0.8), gy = rng.uniform(-0.8, 0.8);
    double f1 = rng.uniform(1.0, 3.0), f2 = rng.uniform(2.0, 5.0);
    double p1 = rng.uniform(0.0, 6.28), p2 = rng.uniform(0.0, 6.28);
    double bx = rng.uniform(0.2, 0.8) * w, by = rng.uniform(0.2, 0.8) * h;
    double br = rng.uniform(0.15, 0.35) * std::min(h, w);
    double chan_shift[3] = {0.0, rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};

    ImageTensor img(h, w, channels);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double u = static_cast<double>(x) / w, v = static_cast<double>(y) / h;
            double blob = std::exp(-((x - bx) * (x - bx) + (y - by) * (y - by)) / (2 * br * br));
            for (int c = 0; c < channels; ++c) {
                double val = 128.0 + 55.0 * (gx * (u - 0.5) + gy * (v - 0.5)) +
                             30.0 * std::sin(6.2831853 * f1 * u + p1 + chan_shift[c % 3]) +
                             20.0 * std::sin(6.2831853 * f2 * v + p2 - chan_shift[c % 3]) +
                             45.0 * blob * (c == index % 3 ? 1.0 : -0.6);
                img.at(y, x, c) = std::min(245.0, std::max(10.0, val));
            }
        }
    }
    return img;
}

inline ImageTensor random_image(Rng& rng, int h, int w, int c, double lo = 0.0,
                                double hi = 255.0) {
    ImageTensor img(h, w, c);
    for (double& v : img.data) v = rng.uniform(lo, hi);
    return img;
}

inline double max_abs_diff(const ImageTensor& a, const ImageTensor& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

inline double rel_l2_error(const std::vector<double>& got, const std::vector<double>& want) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < got.size(); ++i) {
        double d = got[i] - want[i];
        num += d * d;
        den += want[i] * want[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

inline double rel_l2_error(const ImageTensor& got, const ImageTensor& want) {
    return rel_l2_error(got.data, want.data);
}

}  // namespace testsupport
