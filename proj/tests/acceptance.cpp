#include "coronae.hpp"
#include "curvelet.hpp"
#include "datasets.hpp"
#include "pat_fourier.hpp"
#include "recon.hpp"
#include "support.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace patla;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const double kThetas[] = {pi / 4, 2 * pi / 9, pi / 3};

Outcome adjoint_dot_test() {
    double worst = 0;
    for (std::size_t n : {64u, 192u})
        for (double th : kThetas) {
            const PatOperator op = test::make_operator(n, th);
            for (std::uint64_t s = 0; s < 50; ++s) {
                const CArray p = test::random_spectrum(op.image_spec_rows(), op.cols(), 1000 * n + s);
                const CArray g = test::random_spectrum(op.data_spec_rows(), op.cols(), 2000 * n + s);
                const cplx lhs = dot(g.span(), op.forward(p).span());
                const cplx rhs = dot(op.adjoint(g).span(), p.span());
                worst = std::max(worst, std::abs(lhs - rhs) / (norm2(g) * norm2(p)));
            }
        }
    return {worst < 1e-10, fmt("max relative discrepancy %.3g over 300 pairs", worst)};
}

Outcome factor_bound() {
    bool ok = true;
    std::string d;
    for (double th : kThetas) {
        const PatOperator op = test::make_operator(192, th);
        const double f = op.max_factor(), b = 1 / std::cos(th);
        ok = ok && f <= b + 1e-12;
        d += fmt("%s%.4f: max %.15f <= %.15f", d.empty() ? "" : "; ", th, f, b);
    }
    return {ok, d};
}

Outcome inverse_forward_identity() {
    const std::size_t n = 192;
    const Image p0 = gen_disks_phantom(n);
    const PatOperator op1 = test::make_operator(n, pi / 4, 1);
    const PatOperator op4 = test::make_operator(n, pi / 4, 4);
    const CArray s1 = test::tapered_visible_spectrum(op1, p0);
    const CArray s4 = test::tapered_visible_spectrum(op4, p0);
    const double e1 = rel_error(op1.inverse(op1.forward(s1)), s1);
    const double e4 = rel_error(op4.inverse(op4.forward(s4)), s4);
    return {e1 < 1e-2 && e4 < 1e-3, fmt("rel L2 %.3g (q=1, < 1e-2), %.3g (q=4, < 1e-3)", e1, e4)};
}

Outcome curvelet_tight_frame() {
    double worst_rt = 0, worst_norm = 0;
    for (std::size_t n : {64u, 128u, 192u}) {
        const CurveletSystem sys(CurveletConfig{n, n, 3, 32, {}});
        const Image x = test::random_image(n, n, n);
        const CurveletCoeffs c = sys.forward(x);
        worst_norm = std::max(worst_norm, std::abs(norm2(std::span<const double>(c.data())) - norm2(x)) / norm2(x));
        worst_rt = std::max(worst_rt, rel_error(sys.inverse(c), x));
    }
    return {worst_rt < 1e-10 && worst_norm < 1e-10,
            fmt("round trip %.3g, norm %.3g at 64/128/192", worst_rt, worst_norm)};
}

Outcome projection_algebra() {
    const std::size_t n = 192;
    const CurveletSystem sys(CurveletConfig{n, n, 3, 32, {}});
    const WedgeProjector p(sys, pi / 4);
    const Image x = test::random_image(n, n, 5);
    const Image px = p.synthesize(p.analyze(x));
    const double idem = rel_error(p.synthesize(p.analyze(px)), px);
    auto [vis, inv] = visible_invisible_split(x, p);
    Image sum = sys.inverse(vis);
    const Image si = sys.inverse(inv);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += si[i];
    const double part = rel_error(sum, x);
    const std::size_t kept = p.kept_count(1);
    return {idem < 1e-10 && part < 1e-10 && kept == 16,
            fmt("idempotence %.3g, complement sum %.3g, kept %zu of %zu wedges", idem, part, kept, sys.angles(1))};
}

Outcome coronae_checks() {
    double pr = 0;
    for (std::size_t n : {64u, 96u, 192u})
        for (std::size_t levels : {1u, 2u}) {
            const CoronaeFilters f(n, n, 3);
            const Image x = test::random_image(n, n, n + levels);
            pr = std::max(pr, rel_error(coronae_reconstruct(coronae_decompose(x, f, levels), f), x));
        }
    {
        const CoronaeFilters f(192, 192, 4);
        const Image x = test::random_image(192, 192, 3);
        pr = std::max(pr, rel_error(coronae_reconstruct(coronae_decompose(x, f, 3), f), x));
    }
    const std::size_t n = 192;
    const CoronaeFilters f(n, n, 3);
    const auto dims = f.pyramid_dims(2);
    const bool sizes = dims[2].first == 192 && dims[1].first == 129 && dims[0].first == 65 &&
                       dims[1].first == coronae_size_formula(n, 1) && dims[0].first == coronae_size_formula(n, 2) &&
                       dims[1].second == 129 && dims[0].second == 65;
    const CurveletSystem sys(CurveletConfig{n, n, 3, 32, {}});
    const WedgeProjector p(sys, pi / 4);
    const Image x = test::random_image(n, n, 9);
    const CurveletCoeffs cv = p.analyze(x);
    const CoronaePyramid q = coronae_of_component(x, f, pi / 4, Channel::visible, 2);
    double qc = 0;
    for (std::size_t s = 0; s < 3; ++s) {
        const CArray syn = even_spectrum(sys.synthesize_scale(cv, s), n);
        CArray qs = even_spectrum(spectral_resize(q.bands[s], n, n), n);
        for (std::size_t i = 0; i < 2 * n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                qs(i, j) *= f.bands().band(s, 0.5 * double(signed_freq(i, 2 * n)), double(signed_freq(j, n)));
        qc = std::max(qc, rel_error(qs, syn));
    }
    return {pr < 1e-12 && sizes && qc < 1e-8,
            fmt("reconstruction %.3g, sizes %zu/%zu/%zu, QC %.3g", pr, dims[2].first, dims[1].first, dims[0].first, qc)};
}

Outcome wavefront() {
    double worst = 0;
    for (std::size_t i = 0; i < 10000; ++i) {
        const double th = -pi / 2 + pi * (double(i) + 0.5) / 10000.0;
        worst = std::max(worst, std::abs(std::tan(wavefront_map(th)) - std::sin(th)));
    }
    const double b = wavefront_map(pi / 4);
    const double want = std::atan(std::numbers::sqrt2 / 2);
    return {worst < 1e-14 && std::abs(b - 0.61547970867) < 5e-12 && std::abs(b - want) < 1e-15,
            fmt("max |tan(beta) - sin(theta)| %.3g, beta_max(pi/4) %.11f", worst, b)};
}

struct Problem {
    std::size_t n;
    PatOperator op;
    CurveletSystem sys;
    WedgeProjector proj;
    VisibleProblem prob;
    explicit Problem(std::size_t n_)
        : n(n_), op(test::make_operator(n_, pi / 4)), sys(CurveletConfig{n_, n_, 3, 32, {}}), proj(sys, pi / 4),
          prob(op, proj) {}
};

Outcome fista_oracle() {
    const Problem P(192);
    const Image p0 = gen_disks_phantom(192);
    const Image oracle = P.proj.synthesize(P.proj.analyze(p0));
    const CArray g = P.op.data_spectrum(P.op.forward_image(p0));
    FistaConfig cfg;
    cfg.tau = 1e-6;
    cfg.max_iters = 100;
    const FistaResult r = fista_vr(P.prob, g, cfg);
    const double ps = psnr(P.proj.synthesize(r.coeffs), oracle);
    const std::size_t k50 = std::min<std::size_t>(50, r.trace.size() - 1);
    const bool decrease = r.trace[k50].total < r.trace[0].total;

    const CurveletCoeffs& f = r.coeffs;
    const CurveletCoeffs grad = P.prob.fidelity_gradient(f, g);
    double worst = 0;
    for (std::uint64_t k = 0; k < 10; ++k) {
        const CurveletCoeffs d = P.proj.analyze(test::random_image(192, 192, 500 + k));
        const double h = 1e-3;
        CurveletCoeffs a = f, b = f;
        for (std::size_t i = 0; i < a.data().size(); ++i) {
            a.data()[i] += h * d.data()[i];
            b.data()[i] -= h * d.data()[i];
        }
        const double fd = (P.prob.fidelity(a, g) - P.prob.fidelity(b, g)) / (2 * h);
        const double an = dot(std::span<const double>(grad.data()), std::span<const double>(d.data()));
        worst = std::max(worst, std::abs(fd - an) / std::abs(an));
    }
    return {ps > 40 && decrease && worst < 1e-5,
            fmt("PSNR %.2f dB after %zu iterations (> 40), objective %.4g -> %.4g at iterate %zu, gradient check %.3g",
                ps, r.iterations, r.trace[0].total, r.trace[k50].total, k50, worst)};
}

Outcome l1_regime(std::size_t images) {
    const Problem P(192);
    const double lip = P.prob.lipschitz().value;
    double sum = 0, sum2 = 0;
    for (std::size_t i = 0; i < images; ++i) {
        const Image x = gen_ellipse_image(1000 + i, 192, 192).image;
        const Image ref = P.proj.synthesize(P.proj.analyze(x));
        const Image data = add_white_noise(P.op.forward_image(x), 2.5e-4, 5000 + i);
        FistaConfig cfg;
        cfg.tau = 2.5e-4;
        cfg.max_iters = 50;
        cfg.lipschitz = lip;
        const FistaResult r = fista_vr(P.prob, P.op.data_spectrum(data), cfg);
        const double ps = psnr(P.proj.synthesize(r.coeffs), ref);
        sum += ps;
        sum2 += ps * ps;
    }
    const double mean = sum / double(images);
    const double sd = images > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * mean) / double(images - 1))) : 0.0;
    return {mean >= 37 && mean <= 43, fmt("mean PSNR %.2f +- %.2f dB over %zu images (band [37, 43])", mean, sd, images)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::size_t images = 20;
    std::string only;
    app.add_option("--l1-images", images, "ellipse images for the l1 regime check")->check(CLI::PositiveNumber);
    app.add_option("--only", only, "run only checks whose name contains this text");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
        {"adjoint dot test", adjoint_dot_test},
        {"factor bound", factor_bound},
        {"inverse after forward identity", inverse_forward_identity},
        {"curvelet tight frame", curvelet_tight_frame},
        {"projection algebra", projection_algebra},
        {"coronae reconstruction, sizes and QC", coronae_checks},
        {"wavefront map", wavefront},
        {"FISTA oracle", fista_oracle},
        {"l1 reconstruction regime", [images] { return l1_regime(images); }},
    };
    int failures = 0;
    for (const auto& [name, fn] : checks) {
        if (!only.empty() && name.find(only) == std::string::npos) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
