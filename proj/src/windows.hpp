#pragma once

#include "array.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace patla {

// Smooth transition pair on [0, 1]: wl rises 0 -> 1, wr falls 1 -> 0 and
// wl^2 + wr^2 = 1. Outside the interval wl is 0 (x <= 0) or 1 (x >= 1).
double window_left(double x);
double window_right(double x);

// 1D radial low-pass: 1 for |k| <= m, smooth fall for m < |k| < 2m, 0 beyond.
double lowpass_1d(double k, double m);

// Radial scale structure shared by the curvelet system and the coronae
// filter bank. Scales are numbered 0 (coarse) .. n_scales-1 (finest).
// Frequencies are given in bins of the image's own DFT; along axis 0 the
// transforms work on the mirror-extended spectrum, whose bins are half as wide.
// Low-pass Lo_s (s = 1 .. n_scales-1) is the separable product of lowpass_1d
// with per-axis cutoff M_s = N_i / (3 * 2^(n_scales - s)); Lo_{n_scales} = 1.
// Band s >= 1 has window Lo_{s+1} * Hi_s with Hi_s = sqrt(1 - Lo_s^2), the
// coarse scale has window Lo_1.
class ScaleBands {
public:
    ScaleBands(std::size_t rows, std::size_t cols, std::size_t n_scales);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t n_scales() const { return n_scales_; }

    // Per-axis cutoff M_s, s in [1, n_scales).
    double cutoff(std::size_t s, int axis) const;
    // Half width floor(2 M_s) of the support of Lo_s along an axis.
    std::size_t support_radius(std::size_t s, int axis) const;
    // Smallest image holding the support of Lo_s: floor(4 M_s) + 1 rows (the
    // mirror-extended axis) by 2*floor(2 M_s) + 1 columns.
    std::pair<std::size_t, std::size_t> support_dims(std::size_t s) const;

    // Window values at frequencies (k1, k2) measured in image DFT bins.
    double lo(std::size_t s, double k1, double k2) const;
    double hi(std::size_t s, double k1, double k2) const;
    double band(std::size_t s, double k1, double k2) const;

private:
    std::size_t rows_, cols_, n_scales_;
};

}  // namespace patla
