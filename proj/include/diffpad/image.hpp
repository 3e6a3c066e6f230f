#pragma once

#include <cstdint>
#include <vector>

namespace diffpad {

/// H x W x C raster of real values on the canonical [0,255] scale.
/// Data is row-major with interleaved channels: index = (y*width + x)*channels + c.
struct ImageTensor {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    ImageTensor() = default;
    ImageTensor(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<size_t>(h) * w * c, fill) {}

    double& at(int y, int x, int c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    size_t size() const { return data.size(); }
    bool same_shape(const ImageTensor& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
    bool operator==(const ImageTensor& o) const {
        return same_shape(o) && data == o.data;
    }
};

/// Square patch geometry: rows [top, top+side), cols [left, left+side).
struct PatchBox {
    int top = 0;
    int left = 0;
    int side = 1;

    bool operator==(const PatchBox& o) const {
        return top == o.top && left == o.left && side == o.side;
    }
    bool inside(int h, int w) const {
        return top >= 0 && left >= 0 && side >= 1 && top + side <= h && left + side <= w;
    }
};

/// H x W array over {0,1}.
struct BinaryMask {
    int height = 0;
    int width = 0;
    std::vector<uint8_t> data;

    BinaryMask() = default;
    BinaryMask(int h, int w, uint8_t fill = 0)
        : height(h), width(w), data(static_cast<size_t>(h) * w, fill) {}

    uint8_t& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }

    bool operator==(const BinaryMask& o) const {
        return height == o.height && width == o.width && data == o.data;
    }
};

/// Mask with ones inside the box, zeros elsewhere.
BinaryMask mask_from_box(const PatchBox& box, int height, int width);

/// Clamp every entry to [lo, hi].
void clamp_image(ImageTensor& img, double lo = 0.0, double hi = 255.0);

}  // namespace diffpad
