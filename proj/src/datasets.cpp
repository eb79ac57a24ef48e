#include "datasets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace patla {

double Rng::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::size_t Rng::index(std::size_t n) {
    require(n >= 1, ErrorCode::invalid_argument, "Rng::index: empty range");
    return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

void normalize_min_max(Image& img) {
    if (img.empty()) return;
    const auto [lo, hi] = std::minmax_element(img.begin(), img.end());
    const double a = *lo, b = *hi;
    if (b - a <= 0) {
        std::fill(img.begin(), img.end(), 0.0);
        return;
    }
    for (double& v : img) v = (v - a) / (b - a);
}

EllipseImage gen_ellipse_image(std::uint64_t seed, std::size_t rows, std::size_t cols, const EllipseConfig& cfg) {
    require(rows >= 32 && cols >= 32, ErrorCode::invalid_argument, "ellipse images need at least 32 x 32 pixels");
    require(cfg.min_count >= 1 && cfg.min_count <= cfg.max_count, ErrorCode::invalid_argument, "invalid ellipse count range");
    require(cfg.semi_axis_min > 0 && cfg.semi_axis_min <= cfg.semi_axis_max, ErrorCode::invalid_argument,
            "invalid semi-axis range");
    require(cfg.contrast_min > 0 && cfg.contrast_min <= cfg.contrast_max, ErrorCode::invalid_argument,
            "invalid contrast range");
    Rng rng(seed);
    const double scale = static_cast<double>(std::min(rows, cols)) / 192.0;
    EllipseImage out;
    out.image = Image(rows, cols);
    const std::size_t count = cfg.min_count + rng.index(cfg.max_count - cfg.min_count + 1);
    for (std::size_t e = 0; e < count; ++e) {
        EllipseSpec s;
        s.row = rng.uniform(0.0, static_cast<double>(rows) / 2.0);
        s.col = rng.uniform(0.0, static_cast<double>(cols));
        s.semi_a = rng.uniform(cfg.semi_axis_min, cfg.semi_axis_max) * scale;
        s.semi_b = rng.uniform(cfg.semi_axis_min, cfg.semi_axis_max) * scale;
        s.angle = rng.uniform(0.0, std::numbers::pi);
        s.contrast = rng.uniform(cfg.contrast_min, cfg.contrast_max);
        out.ellipses.push_back(s);
        const double ca = std::cos(s.angle), sa = std::sin(s.angle);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                const double dy = static_cast<double>(i) - s.row, dx = static_cast<double>(j) - s.col;
                const double p = (dy * ca + dx * sa) / s.semi_a;
                const double q = (-dy * sa + dx * ca) / s.semi_b;
                if (p * p + q * q <= 1.0) out.image(i, j) += s.contrast;
            }
    }
    normalize_min_max(out.image);
    return out;
}

std::vector<DiskSpec> disk_specs(std::size_t n) {
    const double fn = static_cast<double>(n);
    const double table[4][4] = {{0.15, 0.5, 0.05, 1.0}, {0.3, 0.4, 0.04, 0.8}, {0.32, 0.6, 0.035, 0.6}, {0.2, 0.7, 0.03, 0.4}};
    std::vector<DiskSpec> d;
    for (const auto& t : table) d.push_back({t[0] * fn, t[1] * fn, t[2] * fn, t[3]});
    return d;
}

Image gen_disks_phantom(std::size_t n) {
    require(n >= 32, ErrorCode::invalid_argument, "disk phantom needs at least 32 x 32 pixels");
    Image img(n, n);
    for (const DiskSpec& d : disk_specs(n))
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double dy = static_cast<double>(i) - d.row, dx = static_cast<double>(j) - d.col;
                if (dy * dy + dx * dx <= d.radius * d.radius) img(i, j) = std::max(img(i, j), d.contrast);
            }
    return img;
}

bool disk_in_north_cone(const DiskSpec& d, std::size_t n) {
    const double c = static_cast<double>(n) / 2.0;
    if (d.row + d.radius >= c) return false;
    // distance from the centre to each cone edge (lines at +-45 degrees)
    const double up = c - d.row, side = std::abs(d.col - c);
    return (up - side) / std::numbers::sqrt2 >= d.radius;
}

Image add_white_noise(const Image& data, double sigma, std::uint64_t seed) {
    require(sigma >= 0 && std::isfinite(sigma), ErrorCode::invalid_argument, "noise level must be non-negative");
    Image out = data;
    if (sigma == 0) return out;
    Rng rng(seed);
    for (double& v : out) v += sigma * rng.normal();
    return out;
}

double mse(const Image& rec, const Image& ref) {
    require(rec.same_shape(ref) && !ref.empty(), ErrorCode::shape_mismatch, "metrics: shape mismatch");
    const double d = diff_norm2(rec.span(), ref.span());
    return d * d / static_cast<double>(ref.size());
}

double psnr(const Image& rec, const Image& ref, double peak) {
    const double m = mse(rec, ref);
    return 10.0 * std::log10(peak * peak / m);
}

namespace {

// Valid-mode separable filtering with a normalized 1D kernel.
Image filter_valid(const Image& a, const std::vector<double>& k) {
    const std::size_t w = k.size();
    const std::size_t r = a.rows() - w + 1, c = a.cols() - w + 1;
    Image tmp(a.rows(), c);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < c; ++j) {
            double s = 0;
            for (std::size_t t = 0; t < w; ++t) s += k[t] * a(i, j + t);
            tmp(i, j) = s;
        }
    Image out(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            double s = 0;
            for (std::size_t t = 0; t < w; ++t) s += k[t] * tmp(i + t, j);
            out(i, j) = s;
        }
    return out;
}

}  // namespace

double ssim(const Image& rec, const Image& ref, double data_range) {
    require(rec.same_shape(ref), ErrorCode::shape_mismatch, "metrics: shape mismatch");
    constexpr std::size_t win = 11;
    constexpr double sigma = 1.5;
    require(ref.rows() >= win && ref.cols() >= win, ErrorCode::invalid_argument, "ssim needs at least 11 x 11 pixels");
    std::vector<double> k(win);
    double ks = 0;
    for (std::size_t t = 0; t < win; ++t) {
        const double x = static_cast<double>(t) - 5.0;
        k[t] = std::exp(-x * x / (2 * sigma * sigma));
        ks += k[t];
    }
    for (double& v : k) v /= ks;
    Image xx(ref.rows(), ref.cols()), yy = xx, xy = xx;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        xx[i] = rec[i] * rec[i];
        yy[i] = ref[i] * ref[i];
        xy[i] = rec[i] * ref[i];
    }
    const Image mx = filter_valid(rec, k), my = filter_valid(ref, k);
    const Image sxx = filter_valid(xx, k), syy = filter_valid(yy, k), sxy = filter_valid(xy, k);
    const double c1 = (0.01 * data_range) * (0.01 * data_range);
    const double c2 = (0.03 * data_range) * (0.03 * data_range);
    double acc = 0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = sxx[i] - mx[i] * mx[i], vy = syy[i] - my[i] * my[i], cxy = sxy[i] - mx[i] * my[i];
        acc += ((2 * mx[i] * my[i] + c1) * (2 * cxy + c2)) / ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    return acc / static_cast<double>(mx.size());
}

Metrics compute_metrics(const Image& rec, const Image& ref) {
    Metrics m;
    m.mse = mse(rec, ref);
    m.psnr = 10.0 * std::log10(1.0 / m.mse);
    m.ssim = ssim(rec, ref);
    return m;
}

SplitCounts split_counts(std::size_t total) {
    SplitCounts s;
    s.train = total * 5 / 6;
    s.val = total / 12;
    s.test = total - s.train - s.val;
    return s;
}

}  // namespace patla
