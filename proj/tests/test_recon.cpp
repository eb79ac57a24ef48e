#include "datasets.hpp"
#include "recon.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace patla;
using std::numbers::pi;

namespace {

struct Setup {
    std::size_t n;
    PatOperator op;
    CurveletSystem sys;
    WedgeProjector proj;
    VisibleProblem prob;
    explicit Setup(std::size_t n_, double th = pi / 4)
        : n(n_), op(test::make_operator(n_, th)), sys(CurveletConfig{n_, n_, 3, 16, {}}), proj(sys, th),
          prob(op, proj) {}
};

// Minimizer of 0.5 (z - c)^2 + t |z| by golden-section search.
double scalar_prox(double c, double t) {
    auto f = [&](double z) { return 0.5 * (z - c) * (z - c) + t * std::abs(z); };
    double a = -std::abs(c) - 1, b = std::abs(c) + 1;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
        const double x1 = b - g * (b - a), x2 = a + g * (b - a);
        if (f(x1) < f(x2)) b = x2;
        else a = x1;
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("scale weights") {
    CHECK(scale_weight(0) == 0.5);
    CHECK(scale_weight(1) == 1.0);
    CHECK(scale_weight(2) == 2.0);
}

TEST_CASE("power iteration on identity and on a diagonal") {
    auto id = [](const std::vector<double>& x, std::vector<double>& y) { y = x; };
    const PowerResult r1 = power_iteration(id, 10, 50, 1, 1e-10);
    CHECK(std::abs(r1.value - 1) < 1e-6);
    auto diag = [](const std::vector<double>& x, std::vector<double>& y) {
        y = {x[0], 4 * x[1], 9 * x[2]};
    };
    const PowerResult r2 = power_iteration(diag, 3, 500, 2, 1e-12);
    CHECK(std::abs(r2.value - 9) < 1e-6);
    CHECK(r2.converged);
    const PowerResult r3 = power_iteration(diag, 3, 1, 2, 1e-12);
    CHECK_FALSE(r3.converged);
}

TEST_CASE("soft threshold examples") {
    const Setup s(32);
    CurveletCoeffs c = s.sys.zeros();
    c.block(1, 0)[0] = 1.0;
    c.block(1, 0)[1] = -1.0;
    c.block(0, 0)[0] = 1.0;
    c.block(2, 0)[0] = 1.0;
    const CurveletCoeffs t = soft_threshold_scaled(c, 0.3);
    CHECK(t.block(1, 0)[0] == doctest::Approx(0.7));
    CHECK(t.block(1, 0)[1] == doctest::Approx(-0.7));
    CHECK(t.block(0, 0)[0] == doctest::Approx(0.85));
    CHECK(t.block(2, 0)[0] == doctest::Approx(0.4));
    const CurveletCoeffs same = soft_threshold_scaled(c, 0.0);
    CHECK(same.data() == c.data());
    CHECK_THROWS_AS(soft_threshold_scaled(c, -1.0), Error);
}

TEST_CASE("soft threshold equals the scalar proximal minimizer") {
    const Setup s(32);
    CurveletCoeffs c = s.sys.forward(test::random_image(32, 32, 3));
    const double base = 0.2;
    const CurveletCoeffs t = soft_threshold_scaled(c, base);
    for (const WedgeBlock& b : c.layout().blocks()) {
        const auto in = c.block(b.scale, b.wedge);
        const auto out = t.block(b.scale, b.wedge);
        for (std::size_t i = 0; i < in.size(); i += 7) {
            const double t = base * scale_weight(b.scale);
            const double z = scalar_prox(in[i], t);
            auto f = [&](double v) { return 0.5 * (v - in[i]) * (v - in[i]) + t * std::abs(v); };
            // Golden-section search resolves the minimizer to about sqrt(eps).
            CHECK(std::abs(out[i] - z) < 1e-7);
            CHECK(f(out[i]) <= f(z) + 1e-15);
        }
    }
}

TEST_CASE("weighted l1 norm") {
    const Setup s(32);
    CurveletCoeffs c = s.sys.zeros();
    c.block(0, 0)[0] = 2.0;
    c.block(1, 3)[2] = -3.0;
    c.block(2, 1)[0] = 1.0;
    CHECK(weighted_l1(c) == doctest::Approx(0.5 * 2 + 3 + 2 * 1));
}

TEST_CASE("visible problem adjoint and gradient") {
    const Setup s(64);
    std::mt19937_64 eng(1);
    std::normal_distribution<double> nd;
    const CurveletCoeffs f = s.proj.analyze(test::random_image(64, 64, 11));
    const CArray g = s.prob.apply(s.proj.analyze(gen_ellipse_image(2, 64, 64).image));
    const CArray y = test::random_spectrum(s.op.data_spec_rows(), s.op.cols(), 12);
    const double lhs = dot(y.span(), s.prob.apply(f).span()).real();
    const double rhs = dot(std::span<const double>(s.prob.adjoint(y).data()), std::span<const double>(f.data()));
    CHECK(std::abs(lhs - rhs) / (norm2(y) * norm2(std::span<const double>(f.data()))) < 1e-10);

    const CurveletCoeffs grad = s.prob.fidelity_gradient(f, g);
    for (int k = 0; k < 10; ++k) {
        const CurveletCoeffs d = s.proj.analyze(test::random_image(64, 64, 100 + std::uint64_t(k)));
        const double h = 1e-3;
        CurveletCoeffs a = f, b = f;
        for (std::size_t i = 0; i < a.data().size(); ++i) {
            a.data()[i] += h * d.data()[i];
            b.data()[i] -= h * d.data()[i];
        }
        const double fd = (s.prob.fidelity(a, g) - s.prob.fidelity(b, g)) / (2 * h);
        const double an = dot(std::span<const double>(grad.data()), std::span<const double>(d.data()));
        CHECK(std::abs(fd - an) / std::abs(an) < 1e-5);
    }
}

TEST_CASE("Lipschitz constant respects the factor bound at pi/4") {
    const Setup s(64);
    const PowerResult L = s.prob.lipschitz();
    CHECK(L.converged);
    CHECK(L.value > 0);
    CHECK(L.value <= 2 + 1e-6);
}

TEST_CASE("zero data gives zero coefficients after one iteration") {
    const Setup s(32);
    FistaConfig cfg;
    cfg.tau = 1e-3;
    cfg.max_iters = 1;
    const CArray g(s.op.data_spec_rows(), s.op.cols());
    const FistaResult r = fista_vr(s.prob, g, cfg);
    CHECK(norm2(std::span<const double>(r.coeffs.data())) == 0.0);
    CHECK(r.iterations == 1);
}

TEST_CASE("FISTA decreases the objective and stays in the visible frame") {
    const Setup s(64);
    const Image x = gen_ellipse_image(5, 64, 64).image;
    const Image noisy = add_white_noise(s.op.forward_image(x), 2.5e-4, 9);
    const CArray g = s.op.data_spectrum(noisy);
    FistaConfig cfg;
    cfg.tau = 2.5e-4;
    cfg.max_iters = 50;
    cfg.eta = 0;
    const FistaResult r = fista_vr(s.prob, g, cfg);
    REQUIRE(r.trace.size() == 51);
    CHECK(r.trace[50].total < r.trace[0].total);
    CHECK(r.lipschitz > 0);
    const auto& keep = s.proj.keep_flags();
    const auto& blocks = r.coeffs.layout().blocks();
    for (std::size_t i = 0; i < blocks.size(); ++i)
        if (!keep[i])
            for (double v : r.coeffs.block(blocks[i].scale, blocks[i].wedge)) CHECK(v == 0.0);
}

TEST_CASE("FISTA residual on consistent data falls below 1e-3 within 200 iterations") {
    const Setup s(64);
    const CurveletCoeffs fstar = s.proj.analyze(gen_disks_phantom(64));
    const CArray g = s.prob.apply(fstar);
    FistaConfig cfg;
    cfg.tau = 1e-12;
    cfg.max_iters = 200;
    cfg.eta = 0;
    const FistaResult r = fista_vr(s.prob, g, cfg);
    CHECK(rel_error(s.prob.apply(r.coeffs), g) < 1e-3);
}

TEST_CASE("FISTA stops on the relative change tolerance") {
    const Setup s(32);
    const CArray g = s.prob.apply(s.proj.analyze(gen_disks_phantom(32)));
    FistaConfig cfg;
    cfg.tau = 1e-2;
    cfg.max_iters = 5000;
    cfg.eta = 1e-3;
    const FistaResult r = fista_vr(s.prob, g, cfg);
    CHECK(r.stopped_on_tolerance);
    CHECK(r.iterations < 5000);
}

TEST_CASE("FISTA rejects bad configurations and data") {
    const Setup s(32);
    const CArray g(s.op.data_spec_rows(), s.op.cols());
    FistaConfig cfg;
    cfg.tau = -1;
    CHECK_THROWS_AS(fista_vr(s.prob, g, cfg), Error);
    cfg.tau = 1e-3;
    CHECK_THROWS_AS(fista_vr(s.prob, CArray(3, 3), cfg), Error);
    CArray bad = g;
    bad(0, 0) = {std::nan(""), 0};
    CHECK_THROWS_AS(fista_vr(s.prob, bad, cfg), Error);
}

TEST_CASE("trace CSV format") {
    std::vector<TraceRow> t{{0, 1.5, 0.0, 1.5}, {1, 0.5, 0.25, 0.75}};
    std::ostringstream os;
    write_trace_csv(os, t);
    const std::string s = os.str();
    CHECK(s.rfind("iteration,fidelity,penalty,total\n", 0) == 0);
    CHECK(s.find("\n1,") != std::string::npos);
}
