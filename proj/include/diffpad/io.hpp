#pragma once

#include "diffpad/image.hpp"

#include <string>
#include <vector>

namespace diffpad {

/// Decode an 8-bit PNG (gray/RGB, alpha stripped) or binary PPM/PGM file
/// into the canonical [0,255] float raster. Format is detected from the
/// file's magic bytes.
ImageTensor load_image(const std::string& path);

/// Encode by extension: .png, .ppm (3 channel), .pgm (1 channel).
/// Values are rounded and clamped to 8 bits.
void save_image(const ImageTensor& img, const std::string& path);

/// All decodable images in a directory, sorted by filename.
/// Returns pairs of (filename stem, image).
std::vector<std::pair<std::string, ImageTensor>> load_image_dir(const std::string& dir);

}  // namespace diffpad
