#include "coronae.hpp"
#include "curvelet.hpp"
#include "datasets.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace patla;
using std::numbers::pi;

namespace {

double pyramid_energy(const CoronaePyramid& p) {
    double e = 0;
    for (const Image& b : p.bands) e += norm2(b) * norm2(b);
    return e;
}

CoronaePyramid add(const CoronaePyramid& a, const CoronaePyramid& b) {
    CoronaePyramid out = a;
    for (std::size_t s = 0; s < a.bands.size(); ++s)
        for (std::size_t i = 0; i < a.bands[s].size(); ++i) out.bands[s][i] += b.bands[s][i];
    return out;
}

}  // namespace

TEST_CASE("size formula") {
    CHECK(coronae_size_formula(192, 1) == 129);
    CHECK(coronae_size_formula(192, 2) == 65);
    CHECK(coronae_size_formula(96, 1) == 65);
    CHECK(coronae_size_formula(96, 2) == 33);
    CHECK_THROWS_AS(coronae_size_formula(192, 0), Error);
}

TEST_CASE("pyramid sizes follow the size formula") {
    for (std::size_t n : {96u, 192u}) {
        const CoronaeFilters f(n, n, 3);
        const auto d = f.pyramid_dims(2);
        REQUIRE(d.size() == 3);
        CHECK(d[2] == std::pair<std::size_t, std::size_t>{n, n});
        CHECK(d[1].first == coronae_size_formula(n, 1));
        CHECK(d[1].second == coronae_size_formula(n, 1));
        CHECK(d[0].first == coronae_size_formula(n, 2));
        CHECK(d[0].second == coronae_size_formula(n, 2));
    }
}

TEST_CASE("perfect reconstruction and energy conservation") {
    for (std::size_t n : {64u, 96u, 192u})
        for (std::size_t levels : {1u, 2u}) {
            const CoronaeFilters f(n, n, 3);
            const Image x = test::random_image(n, n, n + levels);
            const CoronaePyramid p = coronae_decompose(x, f, levels);
            CHECK(p.levels() == levels);
            CHECK(rel_error(coronae_reconstruct(p, f), x) < 1e-12);
            CHECK(std::abs(pyramid_energy(p) / (norm2(x) * norm2(x)) - 1) < 1e-10);
        }
    const CoronaeFilters f4(192, 192, 4);
    const Image y = test::random_image(192, 192, 77);
    CHECK(rel_error(coronae_reconstruct(coronae_decompose(y, f4, 3), f4), y) < 1e-12);
    const CoronaeFilters fr(80, 64, 3);
    const Image z = test::random_image(80, 64, 78);
    CHECK(rel_error(coronae_reconstruct(coronae_decompose(z, fr, 2), fr), z) < 1e-12);
}

TEST_CASE("low-pass and high-pass filters form a partition of unity") {
    const ScaleBands b(96, 96, 4);
    double worst = 0;
    for (std::size_t s = 1; s < 4; ++s)
        for (double k1 = -48; k1 <= 48; k1 += 0.37)
            for (double k2 = -48; k2 <= 48; k2 += 0.53) {
                const double lo = b.lo(s, k1, k2), hi = b.hi(s, k1, k2);
                worst = std::max(worst, std::abs(lo * lo + hi * hi - 1));
            }
    CHECK(worst < 1e-12);
}

TEST_CASE("zero image and zero pyramid") {
    const CoronaeFilters f(64, 64, 3);
    const CoronaePyramid p = coronae_decompose(Image(64, 64), f, 2);
    CHECK(pyramid_energy(p) == 0.0);
    CHECK(norm2(coronae_reconstruct(p, f)) == 0.0);
}

TEST_CASE("inconsistent pyramids and bad levels are rejected") {
    const CoronaeFilters f(64, 64, 3);
    CoronaePyramid p = coronae_decompose(test::random_image(64, 64, 1), f, 2);
    p.bands[0] = Image(5, 5);
    CHECK_THROWS_AS(coronae_reconstruct(p, f), Error);
    CHECK_THROWS_AS(coronae_decompose(Image(64, 64), f, 3), Error);
    CHECK_THROWS_AS(coronae_decompose(Image(64, 63), f, 1), Error);
}

TEST_CASE("full circle visible component equals the plain decomposition") {
    const CoronaeFilters f(64, 64, 3);
    const Image x = test::random_image(64, 64, 2);
    const CoronaePyramid a = coronae_of_component(x, f, pi / 2, Channel::visible, 2);
    const CoronaePyramid b = coronae_decompose(x, f, 2);
    for (std::size_t s = 0; s < 3; ++s) CHECK(rel_error(a.bands[s], b.bands[s]) < 1e-12);
    CHECK(a.channel == Channel::visible);
}

TEST_CASE("visible and invisible pyramids sum to the image") {
    const CoronaeFilters f(96, 96, 3);
    const Image x = test::random_image(96, 96, 3);
    for (double th : {pi / 4, pi / 3}) {
        const CoronaePyramid v = coronae_of_component(x, f, th, Channel::visible, 2);
        const CoronaePyramid i = coronae_of_component(x, f, th, Channel::invisible, 2);
        CHECK(rel_error(coronae_reconstruct(add(v, i), f), x) < 1e-10);
    }
}

TEST_CASE("coronae of the visible part match band-limited curvelet synthesis") {
    const std::size_t n = 96;
    const CoronaeFilters f(n, n, 3);
    CurveletConfig cfg{n, n, 3, 16, {}};
    const CurveletSystem sys(cfg);
    const WedgeProjector p(sys, pi / 4);
    const Image x = test::random_image(n, n, 4);
    const CurveletCoeffs cv = p.analyze(x);
    const CoronaePyramid q = coronae_of_component(x, f, pi / 4, Channel::visible, 2);
    for (std::size_t s = 0; s < 3; ++s) {
        const CArray syn = even_spectrum(sys.synthesize_scale(cv, s), n);
        CArray qs = even_spectrum(spectral_resize(q.bands[s], n, n), n);
        for (std::size_t i = 0; i < 2 * n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                qs(i, j) *= f.bands().band(s, 0.5 * double(signed_freq(i, 2 * n)), double(signed_freq(j, n)));
        CHECK(rel_error(qs, syn) < 1e-8);
    }
}

TEST_CASE("upsampling to the finest grid and back is the identity") {
    const CoronaeFilters f(192, 192, 3);
    const CoronaePyramid p = coronae_decompose(test::random_image(192, 192, 5), f, 2);
    const CoronaePyramid up = upsample_to_finest(p);
    for (const Image& b : up.bands) {
        CHECK(b.rows() == 192);
        CHECK(b.cols() == 192);
    }
    CHECK(rel_error(up.bands[2], p.bands[2]) == 0.0);
    const CoronaePyramid down = downsample_from_finest(up, f);
    for (std::size_t s = 0; s < 3; ++s) CHECK(rel_error(down.bands[s], p.bands[s]) < 1e-12);
}

TEST_CASE("upsampled coarse entry has no spectrum outside its band") {
    const CoronaeFilters f(192, 192, 3);
    const CoronaePyramid p = coronae_decompose(test::random_image(192, 192, 6), f, 2);
    REQUIRE(p.bands[0].rows() == 65);
    const Image up = spectral_resize(p.bands[0], 192, 192);
    const CArray s = even_spectrum(up, 192);
    double outside = 0, total = 0;
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = 0; j < s.cols(); ++j) {
            total += std::norm(s(i, j));
            if (std::abs(signed_freq(i, 384)) > 64 || std::abs(signed_freq(j, 192)) > 32) outside += std::norm(s(i, j));
        }
    CHECK(outside < 1e-24 * total);
    CHECK(std::abs(norm2(up) - norm2(p.bands[0])) < 1e-10 * norm2(p.bands[0]));
}

TEST_CASE("disk phantom: high-pass carries the edges, low-pass the smooth content") {
    const std::size_t n = 96;
    const CoronaeFilters f(n, n, 3);
    const Image x = gen_disks_phantom(n);
    const CoronaePyramid p = coronae_decompose(x, f, 1);
    double mean_lo = 0, mean_hi = 0;
    for (double v : p.bands[0]) mean_lo += v;
    for (double v : p.bands[1]) mean_hi += v;
    mean_lo /= double(p.bands[0].size());
    mean_hi /= double(p.bands[1].size());
    CHECK(std::abs(mean_hi) < 1e-10);
    CHECK(mean_lo > 0);
}
