#pragma once

#include "array.hpp"
#include "windows.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace patla {

// One real coefficient array: the coarse block (scale 0, wedge 0) or one
// directional wedge. Wedges l and l + n/2 of a scale are the real and
// imaginary parts of the same complex wedge and have opposite orientations.
struct WedgeBlock {
    std::size_t scale = 0;
    std::size_t wedge = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t offset = 0;
    double angle = 0;  // orientation of the frequency support, radians from the k_perp axis
};

class CurveletLayout {
public:
    std::size_t n_scales() const { return scale_begin_.size() - 1; }
    std::size_t wedge_count(std::size_t scale) const { return scale_begin_.at(scale + 1) - scale_begin_.at(scale); }
    const WedgeBlock& block(std::size_t scale, std::size_t wedge) const;
    const std::vector<WedgeBlock>& blocks() const { return blocks_; }
    std::size_t total_size() const { return total_; }
    std::size_t image_rows() const { return rows_; }
    std::size_t image_cols() const { return cols_; }

private:
    friend class CurveletSystem;
    std::vector<WedgeBlock> blocks_;
    std::vector<std::size_t> scale_begin_;
    std::size_t total_ = 0;
    std::size_t rows_ = 0, cols_ = 0;
};

// Curvelet coefficients stored contiguously in layout order.
class CurveletCoeffs {
public:
    CurveletCoeffs() = default;
    explicit CurveletCoeffs(std::shared_ptr<const CurveletLayout> layout);

    const CurveletLayout& layout() const { return *layout_; }
    const std::shared_ptr<const CurveletLayout>& layout_ptr() const { return layout_; }
    std::span<double> block(std::size_t scale, std::size_t wedge);
    std::span<const double> block(std::size_t scale, std::size_t wedge) const;
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }
    bool compatible(const CurveletCoeffs& o) const;

private:
    std::shared_ptr<const CurveletLayout> layout_;
    std::vector<double> data_;
};

struct CurveletConfig {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t n_scales = 3;      // coarse scale plus n_scales - 1 directional scales
    std::size_t n_angles = 32;     // wedges at the second coarsest scale, multiple of 4
    std::vector<std::size_t> angles_per_scale;  // optional override, one entry per directional scale
};

// Number of wedges at directional scale s >= 1: L * 2^ceil((s-1)/2).
std::size_t default_angle_count(std::size_t n_angles, std::size_t scale);

// Real-valued fast discrete curvelet transform via wrapping, computed on the
// spectrum of the image mirror-extended along axis 0 (the same representation
// the photoacoustic operators use). The transform is a tight frame:
// inverse(forward(x)) = x and ||forward(x)|| = ||x||.
class CurveletSystem {
public:
    explicit CurveletSystem(const CurveletConfig& cfg);

    const CurveletConfig& config() const { return cfg_; }
    const ScaleBands& bands() const { return bands_; }
    std::shared_ptr<const CurveletLayout> layout() const { return layout_; }
    std::size_t n_scales() const { return cfg_.n_scales; }
    std::size_t angles(std::size_t scale) const;
    std::size_t coarse_rows() const { return coarse_r_; }
    std::size_t coarse_cols() const { return coarse_c_; }

    CurveletCoeffs zeros() const { return CurveletCoeffs(layout_); }

    // Forward transform. When keep is given (one flag per layout block), the
    // wedges whose flag is zero are skipped and left at zero.
    CurveletCoeffs forward(const Image& img, const std::vector<unsigned char>* keep = nullptr) const;
    Image inverse(const CurveletCoeffs& c) const;

    // Synthesis from the blocks of a single scale only.
    Image synthesize_scale(const CurveletCoeffs& c, std::size_t scale) const;

    // Sum of squared window values over all windows at every bin of the
    // mirror-extended spectrum (2*rows x cols, FFT order). Equals 1 except on
    // the mirrored Nyquist row, where every image spectrum vanishes.
    Image window_energy() const;

private:
    struct Tap {
        std::uint32_t src;  // index into the mirror-extended spectrum (FFT order)
        std::uint32_t dst;  // index into the wrapped rectangle
        double w;
    };
    struct ComplexWedge {
        std::size_t scale;
        std::size_t re_block, im_block;  // indices into layout blocks
        std::size_t rows, cols;
        std::vector<Tap> taps;
    };

    void analyze_into(const CArray& spec, CurveletCoeffs& out, const std::vector<unsigned char>* keep) const;
    void synthesize_into(const CurveletCoeffs& c, CArray& spec, long only_scale) const;

    CurveletConfig cfg_;
    ScaleBands bands_;
    std::shared_ptr<CurveletLayout> layout_;
    std::vector<ComplexWedge> wedges_;
    std::size_t coarse_r_ = 0, coarse_c_ = 0;
    std::vector<std::pair<std::size_t, double>> coarse_taps_;  // spectrum bin and Lo_1 per coarse bin
    std::vector<std::size_t> coarse_dst_;
};

enum class RestrictMode { wedge_only, fully };

// Projection onto the curvelets whose orientation lies in
// [-theta_max, theta_max] or [pi - theta_max, pi + theta_max]. In fully mode
// the coarse block is filtered with the binary image-domain bow-tie in its
// mirror-extended spectrum; in wedge_only mode it is kept.
class WedgeProjector {
public:
    WedgeProjector(const CurveletSystem& sys, double theta_max, RestrictMode mode = RestrictMode::fully);

    double theta_max() const { return theta_; }
    RestrictMode mode() const { return mode_; }
    bool visible(std::size_t scale, std::size_t wedge) const;
    std::size_t kept_count(std::size_t scale) const;
    const std::vector<unsigned char>& keep_flags() const { return keep_; }
    const Mask& coarse_mask() const { return coarse_mask_; }

    // P_W c and (I - P_W) c.
    CurveletCoeffs apply(const CurveletCoeffs& c) const;
    CurveletCoeffs complement(const CurveletCoeffs& c) const;

    // Restricted analysis P_W Psi x, computing visible wedges only.
    CurveletCoeffs analyze(const Image& img) const;
    // Restricted synthesis Psi^T P_W c.
    Image synthesize(const CurveletCoeffs& c) const;

    const CurveletSystem& system() const { return *sys_; }

private:
    void filter_coarse(CurveletCoeffs& c, bool keep_inside) const;

    const CurveletSystem* sys_;
    double theta_;
    RestrictMode mode_;
    std::vector<unsigned char> keep_;
    Mask coarse_mask_;
};

// Visible and invisible coefficients of an image.
std::pair<CurveletCoeffs, CurveletCoeffs> visible_invisible_split(const Image& img, const WedgeProjector& proj);

// Orientation test shared by projector and tooling.
bool orientation_visible(double angle, double theta_max);

}  // namespace patla
