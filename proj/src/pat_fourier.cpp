#include "pat_fourier.hpp"

#include <cmath>
#include <numbers>

namespace patla {

namespace {
constexpr double kConeTol = 1e-13;
}

SensitivityWedge::SensitivityWedge(double theta_max) : theta_(theta_max) {
    require(std::isfinite(theta_max) && theta_max > 0 && theta_max < std::numbers::pi / 2, ErrorCode::invalid_argument,
            "theta_max must lie in (0, pi/2)");
}

SensitivityWedge SensitivityWedge::full_angle(double bound) {
    require(bound > 1 && std::isfinite(bound), ErrorCode::invalid_argument, "factor bound must exceed 1");
    return SensitivityWedge(std::acos(1.0 / bound));
}

double SensitivityWedge::beta_max() const { return std::atan(std::sin(theta_)); }

double SensitivityWedge::factor_bound() const { return 1.0 / std::cos(theta_); }

double wavefront_map(double theta) {
    require(std::isfinite(theta) && std::abs(theta) < std::numbers::pi / 2, ErrorCode::invalid_argument,
            "wavefront_map: |theta| must be below pi/2");
    return std::atan(std::sin(theta));
}

bool in_ambient_cone(double a_perp, double a_s, double theta_max) {
    const double r = std::hypot(a_perp, a_s);
    if (r == 0) return true;
    return std::abs(a_s) * std::cos(theta_max) <= std::sin(theta_max) * std::abs(a_perp) + kConeTol * r;
}

bool in_data_cone(double w, double k_s, double tan_beta) {
    if (w == 0 && k_s == 0) return true;
    return std::abs(k_s) <= tan_beta * std::abs(w) * (1.0 + 1e-15);
}

Mask bowtie_mask(const std::vector<double>& axis0, const std::vector<double>& axis1, const SensitivityWedge& wedge,
                 MaskDomain domain) {
    Mask m(axis0.size(), axis1.size());
    const double tb = std::sin(wedge.theta_max());
    for (std::size_t i = 0; i < axis0.size(); ++i)
        for (std::size_t j = 0; j < axis1.size(); ++j) {
            const bool in = domain == MaskDomain::ambient ? in_ambient_cone(axis0[i], axis1[j], wedge.theta_max())
                                                          : in_data_cone(axis0[i], axis1[j], tb);
            m(i, j) = in ? 1 : 0;
        }
    return m;
}

PatOperator::PatOperator(const ImageGrid& img, const DataGrid& data, const SensitivityWedge& wedge,
                         const OperatorOptions& opts)
    : img_(img), data_(data), wedge_(opts.limited ? wedge : SensitivityWedge::full_angle()), q_(opts.oversample),
      scale_inverse_c_(opts.scale_inverse_c), interp_(opts.interpolation) {
    img_.validate();
    data_.validate();
    require(img_.n_s == data_.n_s, ErrorCode::shape_mismatch, "image and data grids disagree on sensor count");
    require(q_ >= 1 && q_ <= 64, ErrorCode::invalid_argument, "oversample must be in [1, 64]");
    k_perp_ = frequency_axis(image_spec_rows(), img_.h_x);
    omega_ = frequency_axis(data_spec_rows(), data_.normalized_step());
    k_s_ = frequency_axis(img_.n_s, img_.h_x);
    dk_perp_ = std::numbers::pi / (static_cast<double>(q_ * img_.n_perp) * img_.h_x);
    domega_ = std::numbers::pi / (static_cast<double>(q_ * data_.n_t) * data_.normalized_step());
    grid_scale_ = img_.h_x * std::sqrt(static_cast<double>(img_.n_perp)) /
                  (data_.normalized_step() * std::sqrt(static_cast<double>(data_.n_t)));
    if (scale_inverse_c_) grid_scale_ /= data_.c;
    tan_beta_ = std::sin(wedge_.theta_max());
    amb_mask_ = bowtie_mask(k_perp_, k_s_, wedge_, MaskDomain::ambient);
    dat_mask_ = bowtie_mask(omega_, k_s_, wedge_, MaskDomain::data);
}

Mask PatOperator::ambient_mask() const { return amb_mask_; }
Mask PatOperator::data_mask() const { return dat_mask_; }

PatOperator::Stencil PatOperator::make_stencil(double u, std::size_t nrows) const {
    Stencil st;
    const double fl = std::floor(u);
    const double a = u - fl;
    const long i0 = static_cast<long>(fl);
    if (interp_ == Interpolation::linear) {
        st.taps = 2;
        st.idx[0] = fft_index(i0, nrows);
        st.idx[1] = fft_index(i0 + 1, nrows);
        st.w[0] = 1.0 - a;
        st.w[1] = a;
        return st;
    }
    if (interp_ == Interpolation::quintic) {
        // Six-point Lagrange interpolation on nodes i0-2 .. i0+3.
        st.taps = 6;
        for (int t = 0; t < 6; ++t) {
            const double xt = static_cast<double>(t - 2);
            double wt = 1;
            for (int m = 0; m < 6; ++m)
                if (m != t) wt *= (a - static_cast<double>(m - 2)) / (xt - static_cast<double>(m - 2));
            st.idx[t] = fft_index(i0 - 2 + t, nrows);
            st.w[t] = wt;
        }
        return st;
    }
    // Keys cubic convolution, a = -1/2.
    auto keys = [](double x) {
        x = std::abs(x);
        if (x < 1) return (1.5 * x - 2.5) * x * x + 1.0;
        if (x < 2) return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
        return 0.0;
    };
    st.taps = 4;
    for (int t = 0; t < 4; ++t) {
        st.idx[t] = fft_index(i0 - 1 + t, nrows);
        st.w[t] = keys(a - static_cast<double>(t - 1));
    }
    return st;
}

PatOperator::Stencil PatOperator::forward_stencil(std::size_t row, std::size_t col, double& factor) const {
    factor = 0;
    if (!dat_mask_(row, col)) return {};
    const double w = omega_[row];
    const double ks = k_s_[col];
    const double rad = w * w - ks * ks;
    double kp = 0;
    if (w == 0 && ks == 0) {
        factor = 1;
    } else {
        const double root = std::sqrt(std::max(rad, 0.0));
        if (root == 0) return {};
        factor = std::abs(w) / root;
        kp = std::copysign(root, w);
    }
    const double half = static_cast<double>(q_ * img_.n_perp);
    const double u = kp / dk_perp_;
    if (std::abs(u) > half * (1 + 1e-12)) return {};
    return make_stencil(u, image_spec_rows());
}

double PatOperator::max_factor() const {
    double mx = 0;
    for (std::size_t r = 0; r < data_spec_rows(); ++r)
        for (std::size_t c = 0; c < cols(); ++c) {
            double f = 0;
            forward_stencil(r, c, f);
            mx = std::max(mx, f);
        }
    return mx;
}

CArray PatOperator::forward(const CArray& p0) const {
    require(p0.rows() == image_spec_rows() && p0.cols() == cols(), ErrorCode::shape_mismatch,
            "forward: image spectrum shape does not match the operator grid");
    const double bound = wedge_.factor_bound();
    CArray out(data_spec_rows(), cols());
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c) {
            double f = 0;
            const Stencil st = forward_stencil(r, c, f);
            if (st.taps == 0) continue;
            if (f > bound * (1 + 1e-12)) fail(ErrorCode::internal, "forward: weighting factor exceeds its bound");
            cplx acc{};
            for (int t = 0; t < st.taps; ++t)
                if (amb_mask_(st.idx[t], c)) acc += st.w[t] * p0(st.idx[t], c);
            out(r, c) = grid_scale_ * f * acc;
        }
    return out;
}

CArray PatOperator::adjoint(const CArray& g) const {
    require(g.rows() == data_spec_rows() && g.cols() == cols(), ErrorCode::shape_mismatch,
            "adjoint: data spectrum shape does not match the operator grid");
    CArray out(image_spec_rows(), cols());
    for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) {
            double f = 0;
            const Stencil st = forward_stencil(r, c, f);
            if (st.taps == 0) continue;
            const cplx v = grid_scale_ * f * g(r, c);
            for (int t = 0; t < st.taps; ++t) out(st.idx[t], c) += st.w[t] * v;
        }
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!amb_mask_[i]) out[i] = 0;
    return out;
}

CArray PatOperator::inverse(const CArray& g) const {
    require(g.rows() == data_spec_rows() && g.cols() == cols(), ErrorCode::shape_mismatch,
            "inverse: data spectrum shape does not match the operator grid");
    const std::size_t nrows = data_spec_rows();
    const double half = static_cast<double>(q_ * data_.n_t);
    CArray out(image_spec_rows(), cols());
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c) {
            if (!amb_mask_(r, c)) continue;
            const double kp = k_perp_[r];
            const double ks = k_s_[c];
            const double kk = std::hypot(kp, ks);
            const double w = kk == 0 ? 0.0 : std::copysign(kk, kp);
            const double ratio = kk == 0 ? 1.0 : std::abs(kp) / kk;
            const double v = w / domega_;
            if (std::abs(v) > half * (1 + 1e-12)) continue;
            const Stencil st = make_stencil(v, nrows);
            cplx acc{};
            for (int t = 0; t < st.taps; ++t)
                if (dat_mask_(st.idx[t], c)) acc += st.w[t] * g(st.idx[t], c);
            out(r, c) = ratio / grid_scale_ * acc;
        }
    return out;
}

CArray PatOperator::image_spectrum(const Image& p0) const {
    require(p0.rows() == img_.n_perp && p0.cols() == img_.n_s, ErrorCode::shape_mismatch,
            "image shape does not match the operator grid");
    return even_spectrum(p0, q_ * img_.n_perp);
}

Image PatOperator::image_from_spectrum(const CArray& spec) const {
    require(spec.rows() == image_spec_rows() && spec.cols() == cols(), ErrorCode::shape_mismatch,
            "image spectrum shape does not match the operator grid");
    return even_adjoint(spec, img_.n_perp);
}

CArray PatOperator::data_spectrum(const Image& g) const {
    require(g.rows() == data_.n_t && g.cols() == data_.n_s, ErrorCode::shape_mismatch,
            "data shape does not match the operator grid");
    return even_spectrum(g, q_ * data_.n_t);
}

Image PatOperator::data_from_spectrum(const CArray& spec) const {
    require(spec.rows() == data_spec_rows() && spec.cols() == cols(), ErrorCode::shape_mismatch,
            "data spectrum shape does not match the operator grid");
    return even_adjoint(spec, data_.n_t);
}

Image PatOperator::forward_image(const Image& p0) const { return data_from_spectrum(forward(image_spectrum(p0))); }

Image PatOperator::adjoint_data(const Image& g) const { return image_from_spectrum(adjoint(data_spectrum(g))); }

Image PatOperator::invert_data(const Image& g) const { return image_from_spectrum(inverse(data_spectrum(g))); }

}  // namespace patla
