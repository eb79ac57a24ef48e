#pragma once

#include "array.hpp"
#include "spectral.hpp"

#include <cstddef>
#include <vector>

namespace patla {

// Sensor sensitivity cone: wavefronts are recorded when their normal makes an
// angle of at most theta_max with the sensor normal.
class SensitivityWedge {
public:
    explicit SensitivityWedge(double theta_max);

    // Nearly full view, with factor bound 1/cos(theta_max) = bound.
    static SensitivityWedge full_angle(double bound = 1e3);

    double theta_max() const { return theta_; }
    double beta_max() const;
    double factor_bound() const;

private:
    double theta_;
};

// Data-domain wavefront angle for an image-domain wavefront angle theta.
double wavefront_map(double theta);

// Membership in the image-domain cone |a_s| <= sin(theta)*|a|, with a = (a_perp, a_s).
// Rays on the boundary belong to the cone.
bool in_ambient_cone(double a_perp, double a_s, double theta_max);

// Membership in the data-domain cone |k_s| <= tan(beta_max)*|w|.
bool in_data_cone(double w, double k_s, double tan_beta);

enum class MaskDomain { ambient, data };

// Binary bow-tie over a frequency grid given its axis-0 and axis-1 frequencies.
Mask bowtie_mask(const std::vector<double>& axis0, const std::vector<double>& axis1,
                 const SensitivityWedge& wedge, MaskDomain domain);

// Kernel for the k_perp <-> w change of variables: 2-point linear, 4-point
// Keys cubic convolution, or 6-point Lagrange.
enum class Interpolation { linear, cubic, quintic };

struct OperatorOptions {
    bool limited = true;          // false selects the nearly full view wedge
    std::size_t oversample = 1;   // zero padding factor along axis 0 of image and data
    bool scale_inverse_c = false; // multiply data spectra by 1/c
    Interpolation interpolation = Interpolation::quintic;
};

// Fourier-domain photoacoustic operators for a line sensor at row 0.
//
// Image spectra live on a (2*q*n_perp) x n_s grid and data spectra on a
// (2*q*n_t) x n_s grid (q = oversample), both in FFT order and produced by
// even_spectrum. The change of variables between k_perp and w = omega/c
// interpolates along axis 0, separately in every k_s column. The adjoint is the
// exact transpose of the forward map.
class PatOperator {
public:
    PatOperator(const ImageGrid& img, const DataGrid& data, const SensitivityWedge& wedge,
                const OperatorOptions& opts = {});

    const ImageGrid& image_grid() const { return img_; }
    const DataGrid& data_grid() const { return data_; }
    const SensitivityWedge& wedge() const { return wedge_; }
    std::size_t oversample() const { return q_; }
    Interpolation interpolation() const { return interp_; }

    std::size_t image_spec_rows() const { return 2 * q_ * img_.n_perp; }
    std::size_t data_spec_rows() const { return 2 * q_ * data_.n_t; }
    std::size_t cols() const { return img_.n_s; }

    const std::vector<double>& k_perp() const { return k_perp_; }
    const std::vector<double>& omega() const { return omega_; }
    const std::vector<double>& k_s() const { return k_s_; }

    // Ratio of unitary-DFT sample values to continuous Fourier values between
    // the two grids; forward spectra carry this factor.
    double grid_scale() const { return grid_scale_; }

    Mask ambient_mask() const;
    Mask data_mask() const;

    // Largest weighting factor w/sqrt(w^2 - k_s^2) used over the data mask.
    double max_factor() const;

    CArray forward(const CArray& p0_spec) const;
    CArray inverse(const CArray& g_spec) const;
    CArray adjoint(const CArray& g_spec) const;

    CArray image_spectrum(const Image& p0) const;
    Image image_from_spectrum(const CArray& spec) const;
    CArray data_spectrum(const Image& g) const;
    Image data_from_spectrum(const CArray& spec) const;

    // Time-space conveniences: image -> data and back.
    Image forward_image(const Image& p0) const;
    Image adjoint_data(const Image& g) const;
    Image invert_data(const Image& g) const;

private:
    struct Stencil {
        std::size_t idx[6];
        double w[6];
        int taps = 0;
    };
    Stencil make_stencil(double u, std::size_t nrows) const;
    Stencil forward_stencil(std::size_t row, std::size_t col, double& factor) const;

    ImageGrid img_;
    DataGrid data_;
    SensitivityWedge wedge_;
    std::size_t q_;
    bool scale_inverse_c_;
    Interpolation interp_;
    std::vector<double> k_perp_, omega_, k_s_;
    Mask amb_mask_, dat_mask_;
    double dk_perp_, domega_, grid_scale_, tan_beta_;
};

}  // namespace patla
