#pragma once

#include "array.hpp"
#include "windows.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace patla {

enum class Channel { plain, visible, invisible };

const char* channel_name(Channel c);

// Low-pass / high-pass filter bank built on the curvelet radial windows.
// Level l (1 .. n_scales-1) splits the band of Lo_{S-l+1} into the high-pass
// part Hi_{S-l} (kept on the current grid) and the low-pass part Lo_{S-l},
// restricted to the grid that holds its support. All filtering acts on the
// spectrum of the image mirror-extended along axis 0.
class CoronaeFilters {
public:
    CoronaeFilters(std::size_t rows, std::size_t cols, std::size_t n_scales);

    const ScaleBands& bands() const { return bands_; }
    std::size_t rows() const { return bands_.rows(); }
    std::size_t cols() const { return bands_.cols(); }
    std::size_t max_levels() const { return bands_.n_scales() - 1; }

    // Grid of the band of scale s: the image grid for the finest scale, the
    // support grid of Lo_{s+1} otherwise. Scale 0 is the coarse low-pass.
    std::pair<std::size_t, std::size_t> scale_dims(std::size_t s) const;

    // Pyramid entry dimensions for a decomposition with the given levels,
    // coarse low-pass first.
    std::vector<std::pair<std::size_t, std::size_t>> pyramid_dims(std::size_t levels) const;

private:
    ScaleBands bands_;
};

// Side length n_J/(3*2^(J-j-1)) + 2*floor(n_J/(3*2^(J-j))) + 1 of the entry
// that lies J - j levels below the finest grid n_J (d = J - j >= 1).
std::size_t coronae_size_formula(std::size_t n_finest, std::size_t depth);

// Ordered coarse to fine: entry 0 is the low-pass image, the rest are
// high-pass bands ending with the finest one. Entries are real images.
struct CoronaePyramid {
    std::vector<Image> bands;
    Channel channel = Channel::plain;

    std::size_t levels() const { return bands.empty() ? 0 : bands.size() - 1; }
};

CoronaePyramid coronae_decompose(const Image& img, const CoronaeFilters& f, std::size_t levels);
Image coronae_reconstruct(const CoronaePyramid& pyr, const CoronaeFilters& f);

// Pyramid of the visible (inside the image-domain bow-tie of half angle
// theta_max) or invisible part of an image.
CoronaePyramid coronae_of_component(const Image& img, const CoronaeFilters& f, double theta_max, Channel which,
                                    std::size_t levels);

// Zero padding / cropping of the mirror-extended spectrum between grid sizes.
Image spectral_resize(const Image& img, std::size_t rows, std::size_t cols);

CoronaePyramid upsample_to_finest(const CoronaePyramid& pyr);
CoronaePyramid downsample_from_finest(const CoronaePyramid& pyr, const CoronaeFilters& f);

}  // namespace patla
