#include "diffpad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace diffpad {

double psnr(const ImageTensor& a, const ImageTensor& b, double max_value) {
    if (!a.same_shape(b)) throw std::invalid_argument("psnr: shape mismatch");
    double mse = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a.data[i] - b.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(max_value * max_value / mse);
}

double miou(const BinaryMask& pred, const BinaryMask& truth) {
    if (pred.height != truth.height || pred.width != truth.width)
        throw std::invalid_argument("miou: dimension mismatch");
    long inter = 0, uni = 0;
    for (size_t i = 0; i < pred.data.size(); ++i) {
        bool p = pred.data[i] != 0, t = truth.data[i] != 0;
        inter += (p && t) ? 1 : 0;
        uni += (p || t) ? 1 : 0;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double miou(const PatchBox& pred, const PatchBox& truth) {
    long py0 = pred.top, py1 = pred.top + pred.side;
    long px0 = pred.left, px1 = pred.left + pred.side;
    long ty0 = truth.top, ty1 = truth.top + truth.side;
    long tx0 = truth.left, tx1 = truth.left + truth.side;

    long ih = std::max(0L, std::min(py1, ty1) - std::max(py0, ty0));
    long iw = std::max(0L, std::min(px1, tx1) - std::max(px0, tx0));
    long inter = ih * iw;
    long uni = static_cast<long>(pred.side) * pred.side +
               static_cast<long>(truth.side) * truth.side - inter;
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace diffpad
