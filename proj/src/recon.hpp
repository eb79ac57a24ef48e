#pragma once

#include "array.hpp"
#include "curvelet.hpp"
#include "pat_fourier.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace patla {

struct PowerResult {
    double value = 0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Largest eigenvalue of a symmetric positive semidefinite operator by power
// iteration from a seeded Gaussian start. Stops when the Rayleigh quotient
// changes by less than tol (relative); otherwise returns the last estimate
// with converged = false.
PowerResult power_iteration(const std::function<void(const std::vector<double>&, std::vector<double>&)>& op,
                            std::size_t dim, std::size_t iters, std::uint64_t seed, double tol = 1e-4);

// Weight 2^(j-2) of curvelet scale index s, with j = s + 1 (coarse scale j = 1).
double scale_weight(std::size_t scale);

// Per-coefficient soft threshold with threshold thresh_base * scale_weight.
CurveletCoeffs soft_threshold_scaled(const CurveletCoeffs& c, double thresh_base);

// Weighted l1 norm sum_s scale_weight(s) * |c|.
double weighted_l1(const CurveletCoeffs& c);

// The composed map f -> A_lim S Psi_W^T f from curvelet coefficients to data
// spectra (S: even image spectrum) and its exact adjoint.
class VisibleProblem {
public:
    VisibleProblem(const PatOperator& op, const WedgeProjector& proj);

    CArray apply(const CurveletCoeffs& f) const;
    CurveletCoeffs adjoint(const CArray& g_spec) const;

    const PatOperator& op() const { return *op_; }
    const WedgeProjector& projector() const { return *proj_; }

    double fidelity(const CurveletCoeffs& f, const CArray& g_spec) const;
    CurveletCoeffs fidelity_gradient(const CurveletCoeffs& f, const CArray& g_spec) const;

    // Largest eigenvalue of adjoint(apply(.)).
    PowerResult lipschitz(std::size_t iters = 100, std::uint64_t seed = 7, double tol = 1e-4) const;

private:
    const PatOperator* op_;
    const WedgeProjector* proj_;
};

struct FistaConfig {
    double tau = 2.5e-4;
    std::size_t max_iters = 50;
    double eta = 1e-6;             // stop when ||f_k - f_{k-1}|| <= eta ||f_k||
    double lipschitz = 0;          // 0 selects power iteration
    double lipschitz_margin = 1.01;
    std::size_t power_iters = 100;
    std::uint64_t seed = 7;
};

struct TraceRow {
    std::size_t iteration;
    double fidelity, penalty, total;
};

struct FistaResult {
    CurveletCoeffs coeffs;
    std::vector<TraceRow> trace;  // row k is evaluated at the k-th iterate, row 0 at f = 0
    double lipschitz = 0;
    std::size_t iterations = 0;
    bool stopped_on_tolerance = false;
};

FistaResult fista_vr(const VisibleProblem& prob, const CArray& g_spec, const FistaConfig& cfg);

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

}  // namespace patla
