#include "spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace patla {

double norm2(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double norm2(std::span<const cplx> v) {
    double s = 0;
    for (const cplx& x : v) s += std::norm(x);
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), ErrorCode::shape_mismatch, "dot: length mismatch");
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
    require(a.size() == b.size(), ErrorCode::shape_mismatch, "dot: length mismatch");
    cplx s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double diff_norm2(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), ErrorCode::shape_mismatch, "diff_norm2: length mismatch");
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double diff_norm2(std::span<const cplx> a, std::span<const cplx> b) {
    require(a.size() == b.size(), ErrorCode::shape_mismatch, "diff_norm2: length mismatch");
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}

void ImageGrid::validate() const {
    require(n_perp >= 2 && n_s >= 2, ErrorCode::invalid_argument, "image grid needs at least 2 samples per axis");
    require(h_x > 0 && std::isfinite(h_x), ErrorCode::invalid_argument, "image spacing must be positive");
}

void DataGrid::validate() const {
    require(n_t >= 2 && n_s >= 2, ErrorCode::invalid_argument, "data grid needs at least 2 samples per axis");
    require(h_t > 0 && std::isfinite(h_t), ErrorCode::invalid_argument, "time step must be positive");
    require(c > 0 && std::isfinite(c), ErrorCode::invalid_argument, "sound speed must be positive");
}

DataGrid matched_data_grid(const ImageGrid& img, double c) {
    img.validate();
    require(c > 0, ErrorCode::invalid_argument, "sound speed must be positive");
    DataGrid d;
    d.n_t = static_cast<std::size_t>(std::ceil(std::numbers::sqrt2 * static_cast<double>(img.n_perp)));
    d.n_s = img.n_s;
    d.c = c;
    d.h_t = img.h_x / c;
    return d;
}

std::vector<double> frequency_axis(std::size_t n, double spacing) {
    std::vector<double> k(n);
    const double step = 2.0 * std::numbers::pi / (static_cast<double>(n) * spacing);
    for (std::size_t i = 0; i < n; ++i) k[i] = step * static_cast<double>(signed_freq(i, n));
    return k;
}

Image mirror_extend(const Image& img, int axis) {
    require(axis == 0 || axis == 1, ErrorCode::invalid_argument, "mirror_extend: axis must be 0 or 1");
    const std::size_t r = img.rows(), c = img.cols();
    if (axis == 0) {
        require(r >= 2, ErrorCode::invalid_argument, "mirror_extend: axis length must be at least 2");
        Image out(2 * r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                out(i, j) = img(i, j);
                out(2 * r - 1 - i, j) = img(i, j);
            }
        return out;
    }
    require(c >= 2, ErrorCode::invalid_argument, "mirror_extend: axis length must be at least 2");
    Image out(r, 2 * c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            out(i, j) = img(i, j);
            out(i, 2 * c - 1 - j) = img(i, j);
        }
    return out;
}

namespace {

struct PlanKey {
    int kind;  // 0: 2D, 1: columns
    std::size_t rows, cols;
    int sign;
    auto tie() const { return std::tie(kind, rows, cols, sign); }
    bool operator<(const PlanKey& o) const { return tie() < o.tie(); }
};

class PlanCache {
public:
    fftw_plan get(const PlanKey& key) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        const std::size_t n = key.rows * key.cols;
        fftw_complex* buf = fftw_alloc_complex(n);
        fftw_plan p = nullptr;
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (key.kind == 0) {
            p = fftw_plan_dft_2d(static_cast<int>(key.rows), static_cast<int>(key.cols), buf, buf, key.sign, flags);
        } else {
            int len = static_cast<int>(key.rows);
            const int howmany = static_cast<int>(key.cols);
            const int stride = static_cast<int>(key.cols);
            p = fftw_plan_many_dft(1, &len, howmany, buf, nullptr, stride, 1, buf, nullptr, stride, 1, key.sign, flags);
        }
        fftw_free(buf);
        if (!p) fail(ErrorCode::internal, "FFT planning failed");
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache* cache = new PlanCache();
    return *cache;
}

void check_finite(std::span<const cplx> v, const char* what) {
    for (const cplx& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) fail(ErrorCode::numeric, std::string(what) + ": non-finite input");
}

}  // namespace

void fft2_inplace(CArray& a, int sign, bool unitary) {
    if (a.empty()) return;
    check_finite(a.span(), "fft2");
    fftw_plan p = plan_cache().get({0, a.rows(), a.cols(), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD});
    auto* ptr = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(p, ptr, ptr);
    if (unitary) {
        const double s = 1.0 / std::sqrt(static_cast<double>(a.size()));
        for (cplx& x : a) x *= s;
    }
}

void fft_axis0_inplace(CArray& a, int sign) {
    if (a.empty()) return;
    fftw_plan p = plan_cache().get({1, a.rows(), a.cols(), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD});
    auto* ptr = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(p, ptr, ptr);
    const double s = 1.0 / std::sqrt(static_cast<double>(a.rows()));
    for (cplx& x : a) x *= s;
}

CArray fft2_unitary(const Image& img) {
    CArray a(img.rows(), img.cols());
    for (std::size_t i = 0; i < img.size(); ++i) a[i] = img[i];
    fft2_inplace(a, -1, true);
    return a;
}

CArray fft2_unitary(CArray a) {
    fft2_inplace(a, -1, true);
    return a;
}

CArray ifft2_unitary(CArray a) {
    fft2_inplace(a, +1, true);
    return a;
}

Image ifft2_unitary_real(CArray a) {
    fft2_inplace(a, +1, true);
    Image out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].real();
    return out;
}

cplx half_sample_phase(long k, std::size_t two_n) {
    return std::polar(1.0, -std::numbers::pi * static_cast<double>(k) / static_cast<double>(two_n));
}

CArray even_spectrum(const Image& img, std::size_t padded_len) {
    const std::size_t n = img.rows(), m = img.cols();
    require(n >= 2 && m >= 1, ErrorCode::invalid_argument, "even_spectrum: image too small");
    require(padded_len >= n, ErrorCode::invalid_argument, "even_spectrum: padded length shorter than image");
    const std::size_t two_p = 2 * padded_len;
    CArray a(two_p, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            a(i, j) = img(i, j);
            a(two_p - 1 - i, j) = img(i, j);
        }
    fft2_inplace(a, -1, true);
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    for (std::size_t i = 0; i < two_p; ++i) {
        const cplx ph = half_sample_phase(signed_freq(i, two_p), two_p) * inv_sqrt2;
        for (std::size_t j = 0; j < m; ++j) a(i, j) *= ph;
    }
    return a;
}

Image even_adjoint(const CArray& spec, std::size_t n) {
    const std::size_t two_p = spec.rows(), m = spec.cols();
    require(two_p % 2 == 0 && two_p >= 2 * n && n >= 1, ErrorCode::shape_mismatch, "even_adjoint: spectrum shape incompatible with output length");
    CArray a = spec;
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    for (std::size_t i = 0; i < two_p; ++i) {
        const cplx ph = std::conj(half_sample_phase(signed_freq(i, two_p), two_p)) * inv_sqrt2;
        for (std::size_t j = 0; j < m; ++j) a(i, j) *= ph;
    }
    fft2_inplace(a, +1, true);
    Image out(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) out(i, j) = a(i, j).real() + a(two_p - 1 - i, j).real();
    return out;
}

}  // namespace patla
