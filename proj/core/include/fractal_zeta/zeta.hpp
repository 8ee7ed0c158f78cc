#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fractal_zeta/quadrature.hpp"
#include "fractal_zeta/sets.hpp"
#include "fractal_zeta/tubes.hpp"

namespace fzeta {

struct ZetaEvalConfig {
    double delta = 1.0;
    double abs_tol = 1e-14;
    double rel_tol = 1e-11;
    double tau_max = 700.0;  // t >= exp(-tau_max)
    double eps = 0.01;       // slack in the tail certificate exponent
};

struct ZetaValue {
    cplx value{};
    double error = 0.0;       // quadrature error plus tail extrapolation uncertainty
    double tail_bound = 0.0;  // certified bound for the part beyond the last panel
    EvalStatus status = EvalStatus::NotConverged;
    double decay_rate = 0.0;  // observed exponential decay of the integrand

    bool ok() const { return status == EvalStatus::Converged; }
};

// Tube zeta: integral over (0, delta) of t^(s-N-1) |A_t| dt, computed in
// tau = log(1/t). delta must not exceed the model's validity interval.
ZetaValue tube_zeta(const TubeModel& tube, cplx s, const ZetaEvalConfig& cfg);

// Distance zeta from the tube identity
// zeta_A(s) = delta^(s-N) |A_delta| + (N - s) tube_zeta(s).
ZetaValue distance_zeta(const TubeModel& tube, cplx s, const ZetaEvalConfig& cfg);
ZetaValue distance_zeta(const FractalSet& set, cplx s, const ZetaEvalConfig& cfg);

// Direct evaluation for one-dimensional sets: the delta-neighborhood splits
// into the two outer pieces and the gaps, and each piece of half-width w
// contributes 2 w^s / s exactly.
ZetaValue distance_zeta_direct_1d(const FractalSet& set, cplx s, const ZetaEvalConfig& cfg);
// d/ds of the same, from the log-weighted integrand.
ZetaValue distance_zeta_derivative_1d(const FractalSet& set, cplx s, const ZetaEvalConfig& cfg);

// Geometric zeta function sum_j l_j^s of a fractal string.
ZetaValue geometric_zeta(const LengthSequence& lengths, cplx s);

// Relative difference between the direct 1-D evaluation and the tube
// identity at the same delta.
double functional_equation_residual(const FractalSet& set, cplx s, const ZetaEvalConfig& cfg);

// Relative difference between zeta_{lambda A}(s; lambda delta) and
// lambda^s zeta_A(s; delta).
double scaling_residual(const FractalSet& set, double lambda, cplx s, const ZetaEvalConfig& cfg);

using RealEvaluator = std::function<ZetaValue(double)>;

struct AbscissaBracket {
    double lo;              // largest point found where evaluation fails
    double hi;              // smallest point found where it converges
    bool divergence_found;  // false: lo is -inf and hi only bounds D from above
};

struct ProbeOptions {
    double blowup = 1e12;
    int bisection_steps = 20;
    double width = 1e-4;
};

// Walks the grid from its largest value down until evaluation fails, then
// bisects the bracket.
AbscissaBracket abscissa_probe(const RealEvaluator& f, std::span<const double> grid, const ProbeOptions& opt = {});

}  // namespace fzeta
