#pragma once

#include "array.hpp"

#include <cstddef>
#include <vector>

namespace patla {

// Image sampling: rows run perpendicular to the sensor line (row 0 touches it),
// columns run along the sensor.
struct ImageGrid {
    std::size_t n_perp = 0;
    std::size_t n_s = 0;
    double h_x = 1.0;

    void validate() const;
};

// Time series recorded at each sensor element. The operators work in
// normalized time c*t, sampled with step c*h_t.
struct DataGrid {
    std::size_t n_t = 0;
    std::size_t n_s = 0;
    double h_t = 1.0;
    double c = 1.0;

    double normalized_step() const { return c * h_t; }
    void validate() const;
};

// Grid-matched time sampling: c*h_t = h_x and n_t = ceil(sqrt(2) * n_perp),
// enough for the far corner of the image to reach the sensor.
DataGrid matched_data_grid(const ImageGrid& img, double c = 1500.0);

// Signed frequency index of FFT bin i on an n-point axis, in [-n/2, (n-1)/2].
inline long signed_freq(std::size_t i, std::size_t n) {
    const long li = static_cast<long>(i);
    return li < static_cast<long>((n + 1) / 2) ? li : li - static_cast<long>(n);
}

// FFT bin holding signed frequency k on an n-point axis (k taken modulo n).
inline std::size_t fft_index(long k, std::size_t n) {
    const long ln = static_cast<long>(n);
    long r = k % ln;
    if (r < 0) r += ln;
    return static_cast<std::size_t>(r);
}

// Angular frequencies 2*pi*f/(n*h) in FFT order.
std::vector<double> frequency_axis(std::size_t n, double spacing);

// Even extension to length 2n along an axis: ext[k] = orig[2n-1-k] for k >= n.
Image mirror_extend(const Image& img, int axis);

// In-place 2D FFT. sign = -1 forward, +1 backward; scaled by 1/sqrt(rows*cols)
// when unitary is set.
void fft2_inplace(CArray& a, int sign, bool unitary);

CArray fft2_unitary(const Image& img);
CArray fft2_unitary(CArray a);
CArray ifft2_unitary(CArray a);
Image ifft2_unitary_real(CArray a);

// In-place 1D FFT along every column (axis 0) of a 2D array, unitary along that axis.
void fft_axis0_inplace(CArray& a, int sign);

// Even spectrum of an image along axis 0. The image is zero padded to
// padded_len rows, mirror extended to 2*padded_len rows, transformed with the
// unitary FFT, divided by sqrt(2) and phase aligned so the result is real-even
// along axis 0 for real input. The map is an isometry.
CArray even_spectrum(const Image& img, std::size_t padded_len);

// Adjoint of even_spectrum (real part taken). On spectra of real images it is
// also the inverse. Returns the first n rows.
Image even_adjoint(const CArray& spec, std::size_t n);

// Phase factor applied by even_spectrum to bin k of a 2n-point axis; it moves
// the symmetry point to the half sample before index 0, i.e. the sensor line.
cplx half_sample_phase(long k, std::size_t two_n);

}  // namespace patla
