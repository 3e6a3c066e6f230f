#pragma once

#include <complex>
#include <vector>

namespace diffpad {

/// 2-D DFT of one channel plane (or zero-padded kernel). Row-major,
/// unnormalized forward transform; the inverse applies the 1/(rows*cols)
/// factor so a round trip is the identity.
struct Spectrum {
    int rows = 0;
    int cols = 0;
    std::vector<std::complex<double>> data;

    Spectrum() = default;
    Spectrum(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c) {}

    std::complex<double>& at(int r, int c) {
        return data[static_cast<size_t>(r) * cols + c];
    }
    std::complex<double> at(int r, int c) const {
        return data[static_cast<size_t>(r) * cols + c];
    }
};

Spectrum fft2(const std::vector<double>& plane, int rows, int cols);
Spectrum fft2(const Spectrum& spec);           // complex input, forward
std::vector<double> ifft2_real(const Spectrum& spec);

}  // namespace diffpad
