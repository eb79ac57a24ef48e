#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace patla {

using cplx = std::complex<double>;

enum class ErrorCode {
    invalid_argument = 1,
    shape_mismatch = 2,
    io = 3,
    format = 4,
    numeric = 5,
    internal = 6,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, ErrorCode code, const std::string& msg) {
    if (!cond) fail(code, msg);
}

// Dense row-major 2D array.
template <class T>
class Array2 {
public:
    Array2() = default;
    Array2(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), v_(rows * cols, fill) {}
    Array2(std::size_t rows, std::size_t cols, std::vector<T> values)
        : rows_(rows), cols_(cols), v_(std::move(values)) {
        require(v_.size() == rows * cols, ErrorCode::shape_mismatch, "Array2: value count does not match shape");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return v_.size(); }
    bool empty() const noexcept { return v_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }
    T& operator[](std::size_t i) { return v_[i]; }
    const T& operator[](std::size_t i) const { return v_[i]; }

    T* data() noexcept { return v_.data(); }
    const T* data() const noexcept { return v_.data(); }
    std::span<T> span() noexcept { return v_; }
    std::span<const T> span() const noexcept { return v_; }
    std::vector<T>& values() noexcept { return v_; }
    const std::vector<T>& values() const noexcept { return v_; }

    bool same_shape(const Array2& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

    auto begin() noexcept { return v_.begin(); }
    auto end() noexcept { return v_.end(); }
    auto begin() const noexcept { return v_.begin(); }
    auto end() const noexcept { return v_.end(); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> v_;
};

using Image = Array2<double>;
using CArray = Array2<cplx>;
using Mask = Array2<unsigned char>;

double norm2(std::span<const double> v);
double norm2(std::span<const cplx> v);
double dot(std::span<const double> a, std::span<const double> b);
cplx dot(std::span<const cplx> a, std::span<const cplx> b);  // sum conj(a) * b
double diff_norm2(std::span<const double> a, std::span<const double> b);
double diff_norm2(std::span<const cplx> a, std::span<const cplx> b);

inline double norm2(const Image& a) { return norm2(a.span()); }
inline double norm2(const CArray& a) { return norm2(a.span()); }

// Relative L2 difference ||a - b|| / ||b|| (absolute when b is zero).
template <class T>
double rel_error(const Array2<T>& a, const Array2<T>& b) {
    require(a.same_shape(b), ErrorCode::shape_mismatch, "rel_error: shape mismatch");
    const double d = diff_norm2(a.span(), b.span());
    const double n = norm2(b.span());
    return n > 0 ? d / n : d;
}

}  // namespace patla
