#include "spectral.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace patla;

TEST_CASE("mirror_extend doubles the axis with an even reflection") {
    Image col(3, 1, std::vector<double>{1, 2, 3});
    const Image e = mirror_extend(col, 0);
    REQUIRE(e.rows() == 6);
    const double want[] = {1, 2, 3, 3, 2, 1};
    for (std::size_t k = 0; k < 6; ++k) CHECK(e(k, 0) == want[k]);

    Image row(1, 3, std::vector<double>{1, 2, 3});
    const Image r = mirror_extend(row, 1);
    REQUIRE(r.cols() == 6);
    for (std::size_t k = 0; k < 6; ++k) CHECK(r(0, k) == want[k]);
}

TEST_CASE("mirror_extend of a constant is constant and exactly even") {
    const Image c(4, 5, 2.5);
    const Image e = mirror_extend(c, 0);
    CHECK(e.rows() == 8);
    for (double v : e) CHECK(v == 2.5);

    const Image x = test::random_image(7, 5, 11);
    const Image m = mirror_extend(x, 0);
    for (std::size_t k = 0; k < 14; ++k)
        for (std::size_t j = 0; j < 5; ++j) CHECK(m(k, j) == m(13 - k, j));
}

TEST_CASE("mirror_extend rejects bad axes and short axes") {
    const Image x(4, 4);
    CHECK_THROWS_AS(mirror_extend(x, 2), Error);
    CHECK_THROWS_AS(mirror_extend(Image(1, 4), 0), Error);
}

TEST_CASE("DFT of a mirror extension is real after half-sample alignment") {
    const Image v = test::random_image(8, 1, 5);
    const Image e = mirror_extend(v, 0);
    const std::size_t N = 16;
    for (std::size_t k = 0; k < N; ++k) {
        cplx acc{};
        for (std::size_t t = 0; t < N; ++t)
            acc += e(t, 0) * std::polar(1.0, -2 * std::numbers::pi * double(k * t) / double(N));
        acc *= std::polar(1.0, -std::numbers::pi * double(k) / double(N));
        CHECK(std::abs(acc.imag()) < 1e-12);
    }
    const CArray s = even_spectrum(v, 8);
    for (const cplx& z : s) CHECK(std::abs(z.imag()) < 1e-12);
}

TEST_CASE("unitary FFT of zeros and of an impulse") {
    const CArray z = fft2_unitary(Image(5, 6));
    for (const cplx& v : z) CHECK(std::abs(v) == 0.0);

    Image d(4, 4);
    d(0, 0) = 1;
    const CArray s = fft2_unitary(d);
    for (const cplx& v : s) CHECK(std::abs(v - cplx(0.25, 0)) < 1e-15);
}

TEST_CASE("unitary FFT preserves norms and inverts exactly") {
    const Image x = test::random_image(16, 16, 3);
    const CArray s = fft2_unitary(x);
    CHECK(std::abs(norm2(s) - norm2(x)) / norm2(x) < 1e-12);
    CHECK(rel_error(ifft2_unitary_real(s), x) < 1e-12);

    const Image y = test::random_image(13, 21, 4);
    CHECK(rel_error(ifft2_unitary_real(fft2_unitary(y)), y) < 1e-12);
}

TEST_CASE("FFT rejects non-finite input") {
    Image x(4, 4);
    x(1, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fft2_unitary(x), Error);
}

TEST_CASE("even spectrum is an isometry inverted by its adjoint") {
    const Image x = test::random_image(24, 17, 8);
    for (std::size_t pad : {24u, 40u}) {
        const CArray s = even_spectrum(x, pad);
        CHECK(s.rows() == 2 * pad);
        CHECK(std::abs(norm2(s) - norm2(x)) / norm2(x) < 1e-12);
        const Image back = even_adjoint(s, 24);
        CHECK(rel_error(back, x) < 1e-12);
    }
}

TEST_CASE("even spectrum and its adjoint pass the dot test") {
    const Image x = test::random_image(12, 9, 1);
    const CArray y = test::random_spectrum(32, 9, 2);
    const double lhs = dot(even_spectrum(x, 16).span(), y.span()).real();
    const double rhs = dot(x.span(), even_adjoint(y, 12).span());
    CHECK(std::abs(lhs - rhs) / (norm2(x) * norm2(y)) < 1e-13);
}

TEST_CASE("frequency helpers") {
    CHECK(signed_freq(0, 8) == 0);
    CHECK(signed_freq(3, 8) == 3);
    CHECK(signed_freq(4, 8) == -4);
    CHECK(signed_freq(7, 8) == -1);
    CHECK(signed_freq(3, 7) == 3);
    CHECK(signed_freq(4, 7) == -3);
    for (long k = -4; k < 4; ++k) CHECK(signed_freq(fft_index(k, 8), 8) == k);

    const auto f = frequency_axis(4, 0.5);
    CHECK(f[1] == doctest::Approx(std::numbers::pi));
    CHECK(f[2] == doctest::Approx(-2 * std::numbers::pi));
}

TEST_CASE("grid validation and matched data grid") {
    const ImageGrid g{192, 192, 1e-5};
    const DataGrid d = matched_data_grid(g);
    CHECK(d.n_t == 272);
    CHECK(d.n_s == 192);
    CHECK(d.normalized_step() == doctest::Approx(1e-5));
    CHECK_THROWS_AS((ImageGrid{1, 4, 1.0}.validate()), Error);
    CHECK_THROWS_AS((ImageGrid{4, 4, 0.0}.validate()), Error);
    CHECK_THROWS_AS((DataGrid{4, 4, 1.0, -1.0}.validate()), Error);
}
