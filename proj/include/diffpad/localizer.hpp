#pragma once

#include "diffpad/image.hpp"

#include <vector>

namespace diffpad {

/// Per-pixel mean over channels of |x_a - x_hat| on the [0,255] scale.
struct ResidualMap {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    double& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }
};

ResidualMap residual_map(const ImageTensor& x_a, const ImageTensor& x_hat);

/// Mean over all H*W*C entries of the squared difference.
double restoration_mse(const ImageTensor& x_a, const ImageTensor& x_hat);

/// tau = mu * mse + nu.
double dynamic_threshold(double mse, double mu, double nu);

/// 1 where map > tau (strict), else 0.
BinaryMask binarize(const ResidualMap& map, double tau);

/// Count of residual entries strictly above tau.
int estimate_patch_area(const ResidualMap& xdelta, double tau);

/// side x side window with the highest ones-count, found with a 2-D prefix
/// sum in O(HW). Ties break toward the smallest top, then smallest left.
PatchBox locate_patch(const BinaryMask& mask, int side);

/// round(sqrt(area)) clamped to [1, min(H, W)].
int estimate_side(int area, int height, int width);

/// true iff mse < gate (strict).
bool is_clean(double mse, double gate);

}  // namespace diffpad
