#include "recon.hpp"

#include "spectral.hpp"

#include <cmath>
#include <ostream>
#include <random>

namespace patla {

PowerResult power_iteration(const std::function<void(const std::vector<double>&, std::vector<double>&)>& op,
                            std::size_t dim, std::size_t iters, std::uint64_t seed, double tol) {
    require(dim >= 1, ErrorCode::invalid_argument, "power iteration: empty space");
    require(iters >= 1, ErrorCode::invalid_argument, "power iteration: at least one iteration is required");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(dim), w(dim);
    for (double& x : v) x = nd(rng);
    double nv = norm2(v);
    for (double& x : v) x /= nv;
    PowerResult res;
    double prev = 0;
    for (std::size_t k = 1; k <= iters; ++k) {
        op(v, w);
        require(w.size() == dim, ErrorCode::internal, "power iteration: operator changed the dimension");
        const double lambda = dot(v, w);
        if (!std::isfinite(lambda)) fail(ErrorCode::numeric, "power iteration: non-finite estimate");
        res.value = lambda;
        res.iterations = k;
        if (k > 1 && std::abs(lambda - prev) <= tol * std::abs(lambda)) {
            res.converged = true;
            break;
        }
        prev = lambda;
        const double nw = norm2(w);
        if (nw == 0) {
            res.converged = true;
            break;
        }
        for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / nw;
    }
    return res;
}

double scale_weight(std::size_t scale) { return std::ldexp(1.0, static_cast<int>(scale) - 1); }

CurveletCoeffs soft_threshold_scaled(const CurveletCoeffs& c, double thresh_base) {
    require(thresh_base >= 0 && std::isfinite(thresh_base), ErrorCode::invalid_argument, "threshold must be non-negative");
    CurveletCoeffs out = c;
    if (thresh_base == 0) return out;
    for (const WedgeBlock& b : c.layout().blocks()) {
        const double t = thresh_base * scale_weight(b.scale);
        double* p = out.data().data() + b.offset;
        for (std::size_t i = 0; i < b.rows * b.cols; ++i) {
            const double a = std::abs(p[i]) - t;
            p[i] = a > 0 ? std::copysign(a, p[i]) : 0.0;
        }
    }
    return out;
}

double weighted_l1(const CurveletCoeffs& c) {
    double s = 0;
    for (const WedgeBlock& b : c.layout().blocks()) {
        double a = 0;
        const double* p = c.data().data() + b.offset;
        for (std::size_t i = 0; i < b.rows * b.cols; ++i) a += std::abs(p[i]);
        s += scale_weight(b.scale) * a;
    }
    return s;
}

VisibleProblem::VisibleProblem(const PatOperator& op, const WedgeProjector& proj) : op_(&op), proj_(&proj) {
    const auto& cfg = proj.system().config();
    require(cfg.rows == op.image_grid().n_perp && cfg.cols == op.image_grid().n_s, ErrorCode::shape_mismatch,
            "curvelet system and operator disagree on the image size");
}

CArray VisibleProblem::apply(const CurveletCoeffs& f) const {
    return op_->forward(op_->image_spectrum(proj_->synthesize(f)));
}

CurveletCoeffs VisibleProblem::adjoint(const CArray& g_spec) const {
    return proj_->analyze(op_->image_from_spectrum(op_->adjoint(g_spec)));
}

double VisibleProblem::fidelity(const CurveletCoeffs& f, const CArray& g_spec) const {
    const double d = diff_norm2(apply(f).span(), g_spec.span());
    return 0.5 * d * d;
}

CurveletCoeffs VisibleProblem::fidelity_gradient(const CurveletCoeffs& f, const CArray& g_spec) const {
    CArray r = apply(f);
    require(r.same_shape(g_spec), ErrorCode::shape_mismatch, "data spectrum shape does not match the operator");
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= g_spec[i];
    return adjoint(r);
}

PowerResult VisibleProblem::lipschitz(std::size_t iters, std::uint64_t seed, double tol) const {
    CurveletCoeffs tmp = proj_->system().zeros();
    auto op = [&](const std::vector<double>& v, std::vector<double>& w) {
        tmp.data() = v;
        w = adjoint(apply(tmp)).data();
    };
    return power_iteration(op, tmp.data().size(), iters, seed, tol);
}

FistaResult fista_vr(const VisibleProblem& prob, const CArray& g_spec, const FistaConfig& cfg) {
    require(cfg.tau >= 0 && std::isfinite(cfg.tau), ErrorCode::invalid_argument, "tau must be non-negative");
    require(cfg.max_iters >= 1, ErrorCode::invalid_argument, "at least one iteration is required");
    require(cfg.eta >= 0, ErrorCode::invalid_argument, "eta must be non-negative");
    require(cfg.lipschitz_margin >= 1, ErrorCode::invalid_argument, "Lipschitz margin must be at least 1");
    require(g_spec.rows() == prob.op().data_spec_rows() && g_spec.cols() == prob.op().cols(), ErrorCode::shape_mismatch,
            "data spectrum shape does not match the operator");
    for (const cplx& v : g_spec)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) fail(ErrorCode::numeric, "fista: non-finite data");

    FistaResult res;
    double lip = cfg.lipschitz;
    if (lip <= 0) lip = prob.lipschitz(cfg.power_iters, cfg.seed).value;
    require(lip > 0 && std::isfinite(lip), ErrorCode::numeric, "fista: invalid Lipschitz estimate");
    lip *= cfg.lipschitz_margin;
    res.lipschitz = lip;
    const double mu = 1.0 / lip;

    CurveletCoeffs f = prob.projector().system().zeros();
    CurveletCoeffs y = f;
    double alpha = 1.0;
    auto record = [&](std::size_t k, const CurveletCoeffs& x) {
        const double fid = prob.fidelity(x, g_spec);
        const double pen = cfg.tau * weighted_l1(x);
        if (!std::isfinite(fid) || !std::isfinite(pen)) fail(ErrorCode::numeric, "fista: non-finite objective");
        res.trace.push_back({k, fid, pen, fid + pen});
    };
    record(0, f);
    for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
        const CurveletCoeffs grad = prob.fidelity_gradient(y, g_spec);
        CurveletCoeffs step = y;
        for (std::size_t i = 0; i < step.data().size(); ++i) step.data()[i] -= mu * grad.data()[i];
        CurveletCoeffs f_new = soft_threshold_scaled(step, mu * cfg.tau);
        const double alpha_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * alpha * alpha));
        const double beta = (alpha - 1.0) / alpha_new;
        for (std::size_t i = 0; i < y.data().size(); ++i)
            y.data()[i] = f_new.data()[i] + beta * (f_new.data()[i] - f.data()[i]);
        const double change = diff_norm2(f_new.data(), f.data());
        const double nf = norm2(f_new.data());
        if (!std::isfinite(change) || !std::isfinite(nf)) fail(ErrorCode::numeric, "fista: non-finite iterate");
        f = std::move(f_new);
        alpha = alpha_new;
        record(k, f);
        res.iterations = k;
        if (change <= cfg.eta * nf) {
            res.stopped_on_tolerance = true;
            break;
        }
    }
    res.coeffs = std::move(f);
    return res;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
    os << "iteration,fidelity,penalty,total\n";
    os.precision(17);
    for (const TraceRow& r : trace) os << r.iteration << ',' << r.fidelity << ',' << r.penalty << ',' << r.total << '\n';
}

}  // namespace patla
