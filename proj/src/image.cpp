#include "diffpad/image.hpp"

#include <algorithm>
#include <stdexcept>

namespace diffpad {

BinaryMask mask_from_box(const PatchBox& box, int height, int width) {
    if (!box.inside(height, width))
        throw std::invalid_argument("mask_from_box: box out of bounds");
    BinaryMask m(height, width, 0);
    for (int y = box.top; y < box.top + box.side; ++y)
        for (int x = box.left; x < box.left + box.side; ++x)
            m.at(y, x) = 1;
    return m;
}

void clamp_image(ImageTensor& img, double lo, double hi) {
    for (double& v : img.data) v = std::clamp(v, lo, hi);
}

}  // namespace diffpad
