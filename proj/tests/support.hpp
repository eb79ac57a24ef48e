#pragma once

#include "array.hpp"
#include "pat_fourier.hpp"
#include "spectral.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace patla::test {

inline Image random_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> nd;
    Image x(rows, cols);
    for (double& v : x) v = nd(eng);
    return x;
}

inline CArray random_spectrum(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> nd;
    CArray x(rows, cols);
    for (cplx& v : x) v = {nd(eng), nd(eng)};
    return x;
}

// Image spectrum of p0 multiplied by a raised-cosine taper that vanishes
// within `margin` k_s-bins of the cone boundary and of the Nyquist radius and
// reaches 1 `ramp` bins further in.
inline CArray tapered_visible_spectrum(const PatOperator& op, const Image& p0, double margin = 2, double ramp = 4) {
    CArray s = op.image_spectrum(p0);
    const auto& kp = op.k_perp();
    const auto& ks = op.k_s();
    const double dks = ks[1];
    const double kmax = std::numbers::pi / op.image_grid().h_x;
    const double st = std::sin(op.wedge().theta_max());
    auto rise = [](double x) {
        if (x <= 0) return 0.0;
        if (x >= 1) return 1.0;
        return 0.5 - 0.5 * std::cos(std::numbers::pi * x);
    };
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = 0; j < s.cols(); ++j) {
            const double kk = std::hypot(kp[i], ks[j]);
            const double da = (st * kk - std::abs(ks[j])) / dks - margin;
            const double dr = (kmax - kk) / dks - margin;
            s(i, j) *= rise(da / ramp) * rise(dr / ramp);
        }
    return s;
}

inline PatOperator make_operator(std::size_t n, double theta, std::size_t oversample = 1) {
    const ImageGrid g{n, n, 1e-4};
    OperatorOptions opts;
    opts.oversample = oversample;
    return PatOperator(g, matched_data_grid(g), SensitivityWedge(theta), opts);
}

}  // namespace patla::test
