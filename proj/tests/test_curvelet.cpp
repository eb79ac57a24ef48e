#include "curvelet.hpp"
#include "datasets.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

using namespace patla;
using std::numbers::pi;

namespace {

CurveletSystem make_system(std::size_t n, std::size_t scales = 3, std::size_t angles = 16) {
    CurveletConfig cfg;
    cfg.rows = n;
    cfg.cols = n;
    cfg.n_scales = scales;
    cfg.n_angles = angles;
    return CurveletSystem(cfg);
}

double coeff_norm(const CurveletCoeffs& c) { return norm2(std::span<const double>(c.data())); }

// Angle folded into [0, pi/2] modulo the half-turn symmetry of a wedge pair.
double folded(double a) {
    double r = std::fmod(std::abs(a), pi);
    return std::min(r, pi - r);
}

}  // namespace

TEST_CASE("angle counts double every other directional scale") {
    CHECK(default_angle_count(16, 1) == 16);
    CHECK(default_angle_count(16, 2) == 32);
    CHECK(default_angle_count(16, 3) == 32);
    CHECK(default_angle_count(16, 4) == 64);
    const CurveletSystem sys = make_system(64, 3, 16);
    CHECK(sys.angles(1) == 16);
    CHECK(sys.angles(2) == 32);
    CHECK(sys.layout()->wedge_count(0) == 1);
}

TEST_CASE("invalid configurations are rejected") {
    CHECK_THROWS_AS(make_system(64, 1, 16), Error);
    CHECK_THROWS_AS(make_system(64, 3, 18), Error);
}

TEST_CASE("zero image gives zero coefficients") {
    const CurveletSystem sys = make_system(48);
    const CurveletCoeffs c = sys.forward(Image(48, 48));
    CHECK(coeff_norm(c) == 0.0);
}

TEST_CASE("tight frame on random images") {
    for (std::size_t n : {64u, 65u}) {
        const CurveletSystem sys = make_system(n);
        const Image x = test::random_image(n, n, n);
        const CurveletCoeffs c = sys.forward(x);
        CHECK(std::abs(coeff_norm(c) - norm2(x)) / norm2(x) < 1e-10);
        CHECK(rel_error(sys.inverse(c), x) < 1e-10);
    }
    CurveletConfig cfg{96, 64, 4, 8, {}};
    const CurveletSystem rect(cfg);
    const Image y = test::random_image(96, 64, 7);
    CHECK(rel_error(rect.inverse(rect.forward(y)), y) < 1e-10);
}

TEST_CASE("window energy is one away from the mirrored Nyquist row") {
    const std::size_t n = 48;
    const CurveletSystem sys = make_system(n);
    const Image e = sys.window_energy();
    REQUIRE(e.rows() == 2 * n);
    for (std::size_t i = 0; i < e.rows(); ++i) {
        if (i == n) continue;
        for (std::size_t j = 0; j < e.cols(); ++j) CHECK(std::abs(e(i, j) - 1) < 1e-12);
    }
}

TEST_CASE("a constant image lives in the coarse scale only") {
    const std::size_t n = 64;
    const CurveletSystem sys = make_system(n);
    const CurveletCoeffs c = sys.forward(Image(n, n, 1.0));
    const auto coarse = c.block(0, 0);
    const double ec = norm2(coarse);
    const double et = coeff_norm(c);
    CHECK((et * et - ec * ec) / (et * et) < 1e-10);
}

TEST_CASE("per-scale synthesis sums to the image") {
    const std::size_t n = 64;
    const CurveletSystem sys = make_system(n);
    const Image x = test::random_image(n, n, 2);
    const CurveletCoeffs c = sys.forward(x);
    Image sum(n, n);
    for (std::size_t s = 0; s < sys.n_scales(); ++s) {
        const Image part = sys.synthesize_scale(c, s);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += part[i];
    }
    CHECK(rel_error(sum, x) < 1e-10);
}

TEST_CASE("pi/4 wedge keeps 16 of 32 wedges at the second coarsest scale") {
    const CurveletSystem sys = make_system(192, 3, 32);
    const WedgeProjector p(sys, pi / 4);
    CHECK(p.kept_count(1) == 16);
}

TEST_CASE("kept wedge count equals the number of centres inside the wedge") {
    const CurveletSystem sys = make_system(96, 4, 16);
    for (double th : {pi / 4, 2 * pi / 9, pi / 3, 0.3}) {
        const WedgeProjector p(sys, th);
        for (std::size_t s = 1; s < sys.n_scales(); ++s) {
            std::size_t want = 0;
            for (std::size_t w = 0; w < sys.angles(s); ++w)
                if (folded(sys.layout()->block(s, w).angle) <= th + 1e-12) ++want;
            CHECK(p.kept_count(s) == want);
            CHECK(want % 2 == 0);
        }
    }
}

TEST_CASE("full circle wedge is the identity") {
    const std::size_t n = 64;
    const CurveletSystem sys = make_system(n);
    const WedgeProjector p(sys, pi / 2);
    const Image x = test::random_image(n, n, 4);
    const CurveletCoeffs c = sys.forward(x);
    CHECK(rel_error(p.synthesize(p.apply(c)), x) < 1e-10);
    const CurveletCoeffs pc = p.apply(c);
    CHECK(std::equal(pc.data().begin(), pc.data().end(), c.data().begin(),
                     [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1 + std::abs(b)); }));
}

TEST_CASE("coefficient projection is idempotent for every angle") {
    const std::size_t n = 64;
    const CurveletSystem sys = make_system(n);
    const Image x = test::random_image(n, n, 5);
    const CurveletCoeffs c = sys.forward(x);
    for (double th : {pi / 4, 2 * pi / 9, pi / 3})
        for (RestrictMode mode : {RestrictMode::wedge_only, RestrictMode::fully}) {
            const WedgeProjector p(sys, th, mode);
            const CurveletCoeffs once = p.apply(c);
            const CurveletCoeffs twice = p.apply(once);
            CHECK(diff_norm2(std::span<const double>(once.data()), std::span<const double>(twice.data())) <=
                  1e-12 * coeff_norm(once));
            const CurveletCoeffs comp = p.complement(c);
            for (std::size_t i = 0; i < c.data().size(); ++i)
                CHECK(std::abs(once.data()[i] + comp.data()[i] - c.data()[i]) < 1e-12);
        }
}

TEST_CASE("projection law in the image domain at pi/4") {
    const std::size_t n = 64;
    const CurveletSystem sys = make_system(n);
    const WedgeProjector p(sys, pi / 4);
    const Image x = test::random_image(n, n, 6);
    const Image px = p.synthesize(p.analyze(x));
    const Image ppx = p.synthesize(p.analyze(px));
    CHECK(rel_error(ppx, px) < 1e-10);
    auto [vis, inv] = visible_invisible_split(x, p);
    Image sum = sys.inverse(vis);
    const Image si = sys.inverse(inv);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += si[i];
    CHECK(rel_error(sum, x) < 1e-10);
}

TEST_CASE("restricted analysis matches projecting the full analysis") {
    const std::size_t n = 64;
    const CurveletSystem sys = make_system(n);
    const WedgeProjector p(sys, pi / 3);
    const Image x = test::random_image(n, n, 8);
    const CurveletCoeffs a = p.analyze(x);
    const CurveletCoeffs b = p.apply(sys.forward(x));
    CHECK(diff_norm2(std::span<const double>(a.data()), std::span<const double>(b.data())) < 1e-12 * coeff_norm(b));
}

TEST_CASE("visible-band-limited image has no invisible coefficients") {
    const std::size_t n = 64;
    const CurveletSystem sys = make_system(n);
    const double th = pi / 4;
    CArray s = even_spectrum(test::random_image(n, n, 9), n);
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = 0; j < s.cols(); ++j) {
            const double a = 0.5 * double(signed_freq(i, 2 * n)) / double(n);
            const double b = double(signed_freq(j, n)) / double(n);
            if (std::atan2(std::abs(b), std::abs(a)) > th - 2 * pi / 180) s(i, j) = 0;
        }
    const Image x = even_adjoint(s, n);
    auto [vis, inv] = visible_invisible_split(x, WedgeProjector(sys, th));
    const double e = coeff_norm(inv) / norm2(x);
    CHECK(e * e < 1e-8);
}

TEST_CASE("split of a zero image is zero") {
    const CurveletSystem sys = make_system(32);
    auto [vis, inv] = visible_invisible_split(Image(32, 32), WedgeProjector(sys, pi / 4));
    CHECK(coeff_norm(vis) == 0.0);
    CHECK(coeff_norm(inv) == 0.0);
}

TEST_CASE("visible part of the disk phantom is dominated by near-horizontal edges") {
    const std::size_t n = 96;
    const CurveletSystem sys = make_system(n);
    const Image x = gen_disks_phantom(n);
    auto [vis, inv] = visible_invisible_split(x, WedgeProjector(sys, pi / 4));
    const Image v = sys.inverse(vis), iv = sys.inverse(inv);
    // Vertical differences carry horizontal edges, horizontal differences vertical ones.
    auto grad_ratio = [&](const Image& im) {
        double gr = 0, gc = 0;
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 1; j < n; ++j) {
                gr += std::pow(im(i, j) - im(i - 1, j), 2);
                gc += std::pow(im(i, j) - im(i, j - 1), 2);
            }
        return gr / gc;
    };
    CHECK(grad_ratio(v) > 1);
    CHECK(grad_ratio(iv) < 1);
}

TEST_CASE("best 5 percent term approximation of piecewise smooth phantoms") {
    const std::size_t n = 192;
    const CurveletSystem sys = make_system(n, 3, 32);
    for (const Image& x : {gen_disks_phantom(n), gen_ellipse_image(1, n, n).image}) {
        CurveletCoeffs c = sys.forward(x);
        std::vector<double> mags;
        for (double v : c.data()) mags.push_back(std::abs(v));
        const std::size_t keep = mags.size() / 20;
        std::nth_element(mags.begin(), mags.begin() + long(keep), mags.end(), std::greater<>());
        const double cut = mags[keep];
        for (double& v : c.data())
            if (std::abs(v) <= cut) v = 0;
        CHECK(rel_error(sys.inverse(c), x) < 0.05);
    }
}

TEST_CASE("dimension mismatch is reported") {
    const CurveletSystem sys = make_system(32);
    CHECK_THROWS_AS(sys.forward(Image(32, 31)), Error);
    const CurveletSystem other = make_system(48);
    CHECK_THROWS_AS(sys.inverse(other.zeros()), Error);
}
