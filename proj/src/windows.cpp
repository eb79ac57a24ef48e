#include "windows.hpp"

#include <algorithm>
#include <cmath>

namespace patla {

namespace {

// Unnormalized falling edge exp(1 - 1/(1 - exp(1 - 1/x))) on (0, 1).
double raw_fall(double x) {
    if (x <= 0) return 1.0;
    if (x >= 1) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - std::exp(1.0 - 1.0 / x)));
}

}  // namespace

double window_right(double x) {
    if (x <= 0) return 1.0;
    if (x >= 1) return 0.0;
    const double r = raw_fall(x), l = raw_fall(1.0 - x);
    return r / std::sqrt(r * r + l * l);
}

double window_left(double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    const double r = raw_fall(x), l = raw_fall(1.0 - x);
    return l / std::sqrt(r * r + l * l);
}

double lowpass_1d(double k, double m) {
    const double a = std::abs(k);
    if (a <= m) return 1.0;
    if (a >= 2 * m) return 0.0;
    return window_right((a - m) / m);
}

ScaleBands::ScaleBands(std::size_t rows, std::size_t cols, std::size_t n_scales)
    : rows_(rows), cols_(cols), n_scales_(n_scales) {
    require(n_scales >= 2, ErrorCode::invalid_argument, "at least two scales are required");
    require(rows >= 8 && cols >= 8, ErrorCode::invalid_argument, "image must be at least 8 x 8");
    const auto [r, c] = support_dims(n_scales - 1);
    require(r <= rows && c <= cols && cutoff(1, 0) >= 1.0 && cutoff(1, 1) >= 1.0, ErrorCode::invalid_argument,
            "too many scales for this image size");
}

double ScaleBands::cutoff(std::size_t s, int axis) const {
    const double n = static_cast<double>(axis == 0 ? rows_ : cols_);
    return n / (3.0 * std::ldexp(1.0, static_cast<int>(n_scales_ - s)));
}

std::size_t ScaleBands::support_radius(std::size_t s, int axis) const {
    return static_cast<std::size_t>(std::floor(2.0 * cutoff(s, axis)));
}

std::pair<std::size_t, std::size_t> ScaleBands::support_dims(std::size_t s) const {
    return {static_cast<std::size_t>(std::floor(4.0 * cutoff(s, 0))) + 1, 2 * support_radius(s, 1) + 1};
}

double ScaleBands::lo(std::size_t s, double k1, double k2) const {
    if (s >= n_scales_) return 1.0;
    return lowpass_1d(k1, cutoff(s, 0)) * lowpass_1d(k2, cutoff(s, 1));
}

double ScaleBands::hi(std::size_t s, double k1, double k2) const {
    const double l = lo(s, k1, k2);
    return std::sqrt(std::max(0.0, 1.0 - l * l));
}

double ScaleBands::band(std::size_t s, double k1, double k2) const {
    if (s == 0) return lo(1, k1, k2);
    return lo(s + 1, k1, k2) * hi(s, k1, k2);
}

}  // namespace patla
