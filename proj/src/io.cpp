#include "diffpad/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace diffpad {

namespace {

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("io: cannot open " + path);
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                                std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("io: cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::invalid_argument("io: short write to " + path);
}

uint8_t quantize(double v) {
    return static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// ---------------------------------------------------------------- PNG ----

constexpr uint8_t kPngSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

uint32_t read_be32(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | p[3];
}

void append_be32(std::vector<uint8_t>& v, uint32_t x) {
    v.push_back(uint8_t(x >> 24));
    v.push_back(uint8_t(x >> 16));
    v.push_back(uint8_t(x >> 8));
    v.push_back(uint8_t(x));
}

void append_chunk(std::vector<uint8_t>& out, const char type[4],
                  const std::vector<uint8_t>& payload) {
    append_be32(out, static_cast<uint32_t>(payload.size()));
    size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    uLong crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    append_be32(out, static_cast<uint32_t>(crc));
}

int paeth(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

ImageTensor decode_png(const std::vector<uint8_t>& bytes, const std::string& path) {
    if (bytes.size() < 8 + 25 || std::memcmp(bytes.data(), kPngSignature, 8) != 0)
        throw std::invalid_argument("png: bad signature in " + path);

    uint32_t width = 0, height = 0;
    int color_type = -1, bit_depth = 0;
    std::vector<uint8_t> idat;

    size_t pos = 8;
    while (pos + 8 <= bytes.size()) {
        uint32_t len = read_be32(&bytes[pos]);
        if (pos + 12 + len > bytes.size())
            throw std::invalid_argument("png: truncated chunk in " + path);
        const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
        const uint8_t* payload = &bytes[pos + 8];
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw std::invalid_argument("png: bad IHDR in " + path);
            width = read_be32(payload);
            height = read_be32(payload + 4);
            bit_depth = payload[8];
            color_type = payload[9];
            if (payload[12] != 0)
                throw std::invalid_argument("png: interlaced images unsupported: " + path);
            if (bit_depth != 8)
                throw std::invalid_argument("png: only 8-bit depth supported: " + path);
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + len;
    }
    if (width == 0 || height == 0 || idat.empty())
        throw std::invalid_argument("png: missing image data in " + path);

    int src_channels;
    switch (color_type) {
        case 0: src_channels = 1; break;  // gray
        case 2: src_channels = 3; break;  // rgb
        case 4: src_channels = 2; break;  // gray + alpha
        case 6: src_channels = 4; break;  // rgba
        default:
            throw std::invalid_argument("png: palette images unsupported: " + path);
    }

    size_t stride = static_cast<size_t>(width) * src_channels;
    std::vector<uint8_t> raw((stride + 1) * height);
    uLongf raw_len = static_cast<uLongf>(raw.size());
    int zrc = uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size()));
    if (zrc != Z_OK || raw_len != raw.size())
        throw std::invalid_argument("png: inflate failed for " + path);

    // undo per-row filters in place
    std::vector<uint8_t> pixels(stride * height);
    int bpp = src_channels;
    for (uint32_t y = 0; y < height; ++y) {
        uint8_t filter = raw[y * (stride + 1)];
        const uint8_t* src = &raw[y * (stride + 1) + 1];
        uint8_t* dst = &pixels[y * stride];
        const uint8_t* up = y > 0 ? &pixels[(y - 1) * stride] : nullptr;
        for (size_t i = 0; i < stride; ++i) {
            int a = i >= static_cast<size_t>(bpp) ? dst[i - bpp] : 0;
            int b = up ? up[i] : 0;
            int c = (up && i >= static_cast<size_t>(bpp)) ? up[i - bpp] : 0;
            int x = src[i];
            switch (filter) {
                case 0: break;
                case 1: x += a; break;
                case 2: x += b; break;
                case 3: x += (a + b) / 2; break;
                case 4: x += paeth(a, b, c); break;
                default:
                    throw std::invalid_argument("png: unknown filter type in " + path);
            }
            dst[i] = static_cast<uint8_t>(x & 0xff);
        }
    }

    int out_channels = (src_channels >= 3) ? 3 : 1;
    ImageTensor img(static_cast<int>(height), static_cast<int>(width), out_channels);
    for (uint32_t y = 0; y < height; ++y)
        for (uint32_t x = 0; x < width; ++x) {
            const uint8_t* px = &pixels[y * stride + x * src_channels];
            for (int c = 0; c < out_channels; ++c)
                img.at(static_cast<int>(y), static_cast<int>(x), c) = px[c];
        }
    return img;
}

std::vector<uint8_t> encode_png(const ImageTensor& img) {
    if (img.channels != 1 && img.channels != 3)
        throw std::invalid_argument("png: only 1 or 3 channel rasters can be encoded");

    size_t stride = static_cast<size_t>(img.width) * img.channels;
    std::vector<uint8_t> raw((stride + 1) * img.height);
    for (int y = 0; y < img.height; ++y) {
        raw[y * (stride + 1)] = 0;  // filter: none
        uint8_t* dst = &raw[y * (stride + 1) + 1];
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c)
                dst[x * img.channels + c] = quantize(img.at(y, x, c));
    }

    uLongf comp_cap = compressBound(static_cast<uLong>(raw.size()));
    std::vector<uint8_t> comp(comp_cap);
    if (compress2(comp.data(), &comp_cap, raw.data(), static_cast<uLong>(raw.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK)
        throw std::runtime_error("png: deflate failed");
    comp.resize(comp_cap);

    std::vector<uint8_t> out(kPngSignature, kPngSignature + 8);
    std::vector<uint8_t> ihdr;
    append_be32(ihdr, static_cast<uint32_t>(img.width));
    append_be32(ihdr, static_cast<uint32_t>(img.height));
    ihdr.push_back(8);                                  // bit depth
    ihdr.push_back(img.channels == 3 ? 2 : 0);          // color type
    ihdr.push_back(0);                                  // compression
    ihdr.push_back(0);                                  // filter
    ihdr.push_back(0);                                  // interlace
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", comp);
    append_chunk(out, "IEND", {});
    return out;
}

// ----------------------------------------------------------- PPM / PGM ----

ImageTensor decode_pnm(const std::vector<uint8_t>& bytes, const std::string& path) {
    size_t pos = 0;
    auto next_token = [&]() -> std::string {
        while (pos < bytes.size()) {
            if (std::isspace(bytes[pos])) {
                ++pos;
            } else if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
        std::string tok;
        while (pos < bytes.size() && !std::isspace(bytes[pos])) tok.push_back(bytes[pos++]);
        return tok;
    };

    std::string magic = next_token();
    int channels;
    if (magic == "P5") channels = 1;
    else if (magic == "P6") channels = 3;
    else throw std::invalid_argument("pnm: unsupported magic in " + path);

    int width = std::stoi(next_token());
    int height = std::stoi(next_token());
    int maxval = std::stoi(next_token());
    if (width < 1 || height < 1 || maxval != 255)
        throw std::invalid_argument("pnm: want 8-bit image, got bad header in " + path);
    ++pos;  // single whitespace after maxval

    size_t need = static_cast<size_t>(width) * height * channels;
    if (bytes.size() - pos < need)
        throw std::invalid_argument("pnm: truncated pixel data in " + path);

    ImageTensor img(height, width, channels);
    for (size_t i = 0; i < need; ++i) img.data[i] = bytes[pos + i];
    return img;
}

std::vector<uint8_t> encode_pnm(const ImageTensor& img) {
    if (img.channels != 1 && img.channels != 3)
        throw std::invalid_argument("pnm: only 1 or 3 channel rasters can be encoded");
    std::string header = (img.channels == 3 ? "P6\n" : "P5\n") + std::to_string(img.width) +
                         " " + std::to_string(img.height) + "\n255\n";
    std::vector<uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + img.size());
    for (double v : img.data) out.push_back(quantize(v));
    return out;
}

}  // namespace

ImageTensor load_image(const std::string& path) {
    std::vector<uint8_t> bytes = read_file(path);
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0)
        return decode_png(bytes, path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'))
        return decode_pnm(bytes, path);
    throw std::invalid_argument("io: unsupported image format: " + path);
}

void save_image(const ImageTensor& img, const std::string& path) {
    auto ext_pos = path.find_last_of('.');
    std::string ext = ext_pos == std::string::npos ? "" : path.substr(ext_pos);
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".png") {
        write_file(path, encode_png(img));
    } else if (ext == ".ppm" || ext == ".pgm") {
        if (ext == ".pgm" && img.channels != 1)
            throw std::invalid_argument("io: .pgm requires a single channel");
        if (ext == ".ppm" && img.channels != 3)
            throw std::invalid_argument("io: .ppm requires three channels");
        write_file(path, encode_pnm(img));
    } else {
        throw std::invalid_argument("io: unsupported output extension: " + path);
    }
}

std::vector<std::pair<std::string, ImageTensor>> load_image_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw std::invalid_argument("io: not a directory: " + dir);
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
        if (ext == ".png" || ext == ".ppm" || ext == ".pgm") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<std::pair<std::string, ImageTensor>> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.emplace_back(p.stem().string(), load_image(p.string()));
    return out;
}

}  // namespace diffpad
