#include "coronae.hpp"

#include "pat_fourier.hpp"
#include "spectral.hpp"

#include <algorithm>
#include <cmath>

namespace patla {

namespace {

// Copy the bins shared by two mirror-extended spectra (2*rows x cols, FFT
// order) of images with rows and cols samples. Along axis 0 the shared bins
// are |j| < min(rows); along axis 1 the signed bins common to both grids.
CArray resize_even(const CArray& a, std::size_t rows, std::size_t cols) {
    CArray out(2 * rows, cols);
    const long ar = static_cast<long>(a.rows() / 2), ac = static_cast<long>(a.cols());
    const long br = static_cast<long>(rows), bc = static_cast<long>(cols);
    auto lo_of = [](long n) { return -(n / 2); };
    auto hi_of = [](long n) { return (n - 1) / 2; };
    const long r1 = std::min(ar, br) - 1;
    const long c0 = std::max(lo_of(ac), lo_of(bc)), c1 = std::min(hi_of(ac), hi_of(bc));
    for (long j = -r1; j <= r1; ++j)
        for (long k2 = c0; k2 <= c1; ++k2)
            out(fft_index(j, 2 * rows), fft_index(k2, cols)) = a(fft_index(j, a.rows()), fft_index(k2, a.cols()));
    return out;
}

// Frequency of a mirror-extended spectrum bin along axis 0, in image DFT bins.
double axis0_freq(std::size_t i, std::size_t spec_rows) { return 0.5 * static_cast<double>(signed_freq(i, spec_rows)); }

void check_levels(const CoronaeFilters& f, std::size_t levels) {
    require(levels >= 1 && levels <= f.max_levels(), ErrorCode::invalid_argument,
            "coronae levels must lie in [1, n_scales - 1]");
}

}  // namespace

const char* channel_name(Channel c) {
    switch (c) {
        case Channel::visible: return "visible";
        case Channel::invisible: return "invisible";
        default: return "plain";
    }
}

CoronaeFilters::CoronaeFilters(std::size_t rows, std::size_t cols, std::size_t n_scales) : bands_(rows, cols, n_scales) {}

std::pair<std::size_t, std::size_t> CoronaeFilters::scale_dims(std::size_t s) const {
    const std::size_t S = bands_.n_scales();
    require(s < S, ErrorCode::invalid_argument, "coronae scale out of range");
    if (s == S - 1) return {rows(), cols()};
    return bands_.support_dims(s + 1);
}

std::vector<std::pair<std::size_t, std::size_t>> CoronaeFilters::pyramid_dims(std::size_t levels) const {
    check_levels(*this, levels);
    const std::size_t S = bands_.n_scales();
    std::vector<std::pair<std::size_t, std::size_t>> d;
    for (std::size_t s = S - 1 - levels; s < S; ++s) d.push_back(scale_dims(s));
    return d;
}

std::size_t coronae_size_formula(std::size_t n_finest, std::size_t depth) {
    require(depth >= 1, ErrorCode::invalid_argument, "depth must be at least 1");
    const std::size_t a = n_finest / (3 * (std::size_t{1} << (depth - 1)));
    const std::size_t b = n_finest / (3 * (std::size_t{1} << depth));
    return a + 2 * b + 1;
}

CoronaePyramid coronae_decompose(const Image& img, const CoronaeFilters& f, std::size_t levels) {
    require(img.rows() == f.rows() && img.cols() == f.cols(), ErrorCode::shape_mismatch,
            "coronae: image shape does not match the filters");
    check_levels(f, levels);
    const ScaleBands& b = f.bands();
    const std::size_t S = b.n_scales();
    CArray cur = even_spectrum(img, img.rows());
    CoronaePyramid pyr;
    pyr.bands.resize(levels + 1);
    for (std::size_t l = 1; l <= levels; ++l) {
        const std::size_t s = S - l;
        CArray hi(cur.rows(), cur.cols());
        for (std::size_t i = 0; i < cur.rows(); ++i) {
            const double k1 = axis0_freq(i, cur.rows());
            for (std::size_t j = 0; j < cur.cols(); ++j) {
                const double k2 = static_cast<double>(signed_freq(j, cur.cols()));
                hi(i, j) = b.hi(s, k1, k2) * cur(i, j);
                cur(i, j) *= b.lo(s, k1, k2);
            }
        }
        pyr.bands[levels + 1 - l] = even_adjoint(hi, hi.rows() / 2);
        const auto [r, c] = f.scale_dims(s - 1);
        cur = resize_even(cur, r, c);
    }
    pyr.bands[0] = even_adjoint(cur, cur.rows() / 2);
    return pyr;
}

Image coronae_reconstruct(const CoronaePyramid& pyr, const CoronaeFilters& f) {
    const std::size_t levels = pyr.levels();
    check_levels(f, levels);
    const auto dims = f.pyramid_dims(levels);
    for (std::size_t i = 0; i <= levels; ++i)
        require(pyr.bands[i].rows() == dims[i].first && pyr.bands[i].cols() == dims[i].second, ErrorCode::shape_mismatch,
                "coronae: pyramid entry sizes are inconsistent with the filters");
    const ScaleBands& b = f.bands();
    const std::size_t S = b.n_scales();
    CArray cur = even_spectrum(pyr.bands[0], pyr.bands[0].rows());
    for (std::size_t l = levels; l >= 1; --l) {
        const std::size_t s = S - l;
        const auto [r, c] = f.scale_dims(s);
        CArray up = resize_even(cur, r, c);
        const CArray q = even_spectrum(pyr.bands[levels + 1 - l], r);
        for (std::size_t i = 0; i < 2 * r; ++i) {
            const double k1 = axis0_freq(i, 2 * r);
            for (std::size_t j = 0; j < c; ++j) {
                const double k2 = static_cast<double>(signed_freq(j, c));
                up(i, j) = b.lo(s, k1, k2) * up(i, j) + b.hi(s, k1, k2) * q(i, j);
            }
        }
        cur = std::move(up);
    }
    return even_adjoint(cur, cur.rows() / 2);
}

CoronaePyramid coronae_of_component(const Image& img, const CoronaeFilters& f, double theta_max, Channel which,
                                    std::size_t levels) {
    require(img.rows() == f.rows() && img.cols() == f.cols(), ErrorCode::shape_mismatch,
            "coronae: image shape does not match the filters");
    require(std::isfinite(theta_max) && theta_max > 0 && theta_max <= std::acos(-1.0) / 2, ErrorCode::invalid_argument,
            "theta_max must lie in (0, pi/2]");
    if (which == Channel::plain) return coronae_decompose(img, f, levels);
    CArray spec = even_spectrum(img, img.rows());
    const double n1 = static_cast<double>(img.rows()), n2 = static_cast<double>(img.cols());
    for (std::size_t i = 0; i < spec.rows(); ++i)
        for (std::size_t j = 0; j < spec.cols(); ++j) {
            const bool in = in_ambient_cone(axis0_freq(i, spec.rows()) / n1,
                                            static_cast<double>(signed_freq(j, spec.cols())) / n2, theta_max);
            if (in != (which == Channel::visible)) spec(i, j) = 0;
        }
    CoronaePyramid pyr = coronae_decompose(even_adjoint(spec, img.rows()), f, levels);
    pyr.channel = which;
    return pyr;
}

Image spectral_resize(const Image& img, std::size_t rows, std::size_t cols) {
    require(rows >= 1 && cols >= 1, ErrorCode::invalid_argument, "spectral_resize: empty target");
    if (img.rows() == rows && img.cols() == cols) return img;
    return even_adjoint(resize_even(even_spectrum(img, img.rows()), rows, cols), rows);
}

CoronaePyramid upsample_to_finest(const CoronaePyramid& pyr) {
    require(!pyr.bands.empty(), ErrorCode::invalid_argument, "empty pyramid");
    const std::size_t r = pyr.bands.back().rows(), c = pyr.bands.back().cols();
    CoronaePyramid out;
    out.channel = pyr.channel;
    for (const Image& q : pyr.bands) out.bands.push_back(spectral_resize(q, r, c));
    return out;
}

CoronaePyramid downsample_from_finest(const CoronaePyramid& pyr, const CoronaeFilters& f) {
    const auto dims = f.pyramid_dims(pyr.levels());
    CoronaePyramid out;
    out.channel = pyr.channel;
    for (std::size_t i = 0; i < pyr.bands.size(); ++i) {
        require(pyr.bands[i].rows() == f.rows() && pyr.bands[i].cols() == f.cols(), ErrorCode::shape_mismatch,
                "downsample: entries must have the finest dimensions");
        out.bands.push_back(spectral_resize(pyr.bands[i], dims[i].first, dims[i].second));
    }
    return out;
}

}  // namespace patla
