#pragma once

#include "diffpad/image.hpp"

namespace diffpad {

/// 10*log10(max_value^2 / MSE); +infinity when the images are identical.
double psnr(const ImageTensor& a, const ImageTensor& b, double max_value = 255.0);

/// Intersection-over-union of two regions. Empty vs empty is defined as 1.0
/// (no patch, no detection); empty vs non-empty is 0.0.
double miou(const BinaryMask& pred, const BinaryMask& truth);
double miou(const PatchBox& pred, const PatchBox& truth);

}  // namespace diffpad
