#include "diffpad/localizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace diffpad {

ResidualMap residual_map(const ImageTensor& x_a, const ImageTensor& x_hat) {
    if (!x_a.same_shape(x_hat))
        throw std::invalid_argument("residual_map: shape mismatch");
    ResidualMap m;
    m.height = x_a.height;
    m.width = x_a.width;
    m.data.resize(static_cast<size_t>(m.height) * m.width);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            double acc = 0.0;
            for (int c = 0; c < x_a.channels; ++c)
                acc += std::abs(x_a.at(y, x, c) - x_hat.at(y, x, c));
            m.at(y, x) = acc / x_a.channels;
        }
    }
    return m;
}

double restoration_mse(const ImageTensor& x_a, const ImageTensor& x_hat) {
    if (!x_a.same_shape(x_hat))
        throw std::invalid_argument("restoration_mse: shape mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < x_a.size(); ++i) {
        double d = x_a.data[i] - x_hat.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(x_a.size());
}

double dynamic_threshold(double mse, double mu, double nu) { return mu * mse + nu; }

BinaryMask binarize(const ResidualMap& map, double tau) {
    BinaryMask out(map.height, map.width, 0);
    for (size_t i = 0; i < map.data.size(); ++i)
        out.data[i] = map.data[i] > tau ? 1 : 0;
    return out;
}

int estimate_patch_area(const ResidualMap& xdelta, double tau) {
    int count = 0;
    for (double v : xdelta.data)
        if (v > tau) ++count;
    return count;
}

PatchBox locate_patch(const BinaryMask& mask, int side) {
    int h = mask.height, w = mask.width;
    if (side < 1 || side > std::min(h, w))
        throw std::invalid_argument("locate_patch: side out of range");

    // prefix[y][x] = ones in mask[0..y) x [0..x)
    std::vector<int> prefix(static_cast<size_t>(h + 1) * (w + 1), 0);
    auto P = [&](int y, int x) -> int& { return prefix[static_cast<size_t>(y) * (w + 1) + x]; };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            P(y + 1, x + 1) = P(y, x + 1) + P(y + 1, x) - P(y, x) + (mask.at(y, x) ? 1 : 0);

    PatchBox best{0, 0, side};
    int best_count = -1;
    for (int top = 0; top + side <= h; ++top) {
        for (int left = 0; left + side <= w; ++left) {
            int count = P(top + side, left + side) - P(top, left + side) -
                        P(top + side, left) + P(top, left);
            if (count > best_count) {
                best_count = count;
                best = {top, left, side};
            }
        }
    }
    return best;
}

int estimate_side(int area, int height, int width) {
    if (area < 0) throw std::invalid_argument("estimate_side: negative area");
    int side = static_cast<int>(std::llround(std::sqrt(static_cast<double>(area))));
    return std::clamp(side, 1, std::min(height, width));
}

bool is_clean(double mse, double gate) { return mse < gate; }

}  // namespace diffpad
