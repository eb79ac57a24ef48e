#pragma once

#include "array.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace patla {

// Seeded generator with platform-independent uniform and normal draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform();                       // [0, 1), 53 random bits
    double uniform(double lo, double hi);   // [lo, hi)
    std::size_t index(std::size_t n);       // [0, n)
    double normal();                        // standard normal (Box-Muller)

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0;
};

struct EllipseSpec {
    double row, col;      // center, pixels
    double semi_a, semi_b;  // semi-axes, pixels (a along the rotated row axis)
    double angle;         // radians
    double contrast;
};

struct EllipseConfig {
    std::size_t min_count = 15;
    std::size_t max_count = 20;
    double semi_axis_min = 8.0;   // pixels at 192 x 192, scaled with the image size
    double semi_axis_max = 48.0;
    double contrast_min = 0.1;
    double contrast_max = 1.0;
};

struct EllipseImage {
    Image image;
    std::vector<EllipseSpec> ellipses;
};

// Sum of 15..20 random ellipses centred in the upper half (rows < n/2), then
// min-max normalized to [0, 1].
EllipseImage gen_ellipse_image(std::uint64_t seed, std::size_t rows, std::size_t cols, const EllipseConfig& cfg = {});

struct DiskSpec {
    double row, col, radius, contrast;  // pixels
};

// Four disks of distinct contrast inside the north sector of a square image.
std::vector<DiskSpec> disk_specs(std::size_t n);
Image gen_disks_phantom(std::size_t n);

// True when every pixel of the disk lies in rows < n/2 and inside the 90
// degree cone opening from the image centre towards row 0.
bool disk_in_north_cone(const DiskSpec& d, std::size_t n);

Image add_white_noise(const Image& data, double sigma, std::uint64_t seed);

struct Metrics {
    double mse = 0, psnr = 0, ssim = 0;
};

double mse(const Image& rec, const Image& ref);
double psnr(const Image& rec, const Image& ref, double peak = 1.0);
// Gaussian-window SSIM (11 taps, sigma 1.5, K1 = 0.01, K2 = 0.03), averaged
// over the window positions fully inside the image.
double ssim(const Image& rec, const Image& ref, double data_range = 1.0);
Metrics compute_metrics(const Image& rec, const Image& ref);

// Min-max scaling to [0, 1]; constant images map to zero.
void normalize_min_max(Image& img);

struct SplitCounts {
    std::size_t train, val, test;
};
// 5/6 train, 1/12 validation, remainder test.
SplitCounts split_counts(std::size_t total);

struct VesselConfig {
    std::size_t out_size = 192;    // output is out_size x out_size
    std::size_t min_crop_rows = 96;
};

// Random crops of width twice their height from the green channel of the
// images in source_dir, resampled (bicubic) to (n/2) x n, min-max normalized
// and placed in the top half of an n x n image. Item i uses seed + i.
std::vector<Image> crop_vessel_images(const std::string& source_dir, std::size_t count, std::uint64_t seed,
                                      const VesselConfig& cfg = {});

}  // namespace patla
