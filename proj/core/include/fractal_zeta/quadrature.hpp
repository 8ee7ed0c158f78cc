#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace fzeta {

using cplx = std::complex<double>;

// Thrown when an integral or series cannot reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    std::size_t max_intervals = 2000;
};

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

// Globally adaptive Gauss-Kronrod 7/15 on [a, b]. Does not throw on
// non-convergence; callers inspect `converged` and `error`.
QuadResult<double> integrate(const std::function<double(double)>& f, double a, double b,
                             const QuadOptions& opt = {});
QuadResult<cplx> integrate(const std::function<cplx(double)>& f, double a, double b,
                           const QuadOptions& opt = {});

enum class EvalStatus { Converged, Diverged, NotConverged };

const char* to_string(EvalStatus s);

struct HalfLineOptions {
    double panel = 1.0;        // panel width in the integration variable
    double phase = 0.0;        // panel edges sit on phase + k * panel
    double abs_tol = 1e-12;
    double rel_tol = 1e-11;
    double x_max = 700.0;      // hard stop for the integration variable
    double min_decay = 1e-6;   // per-unit decay below this counts as divergence
    std::size_t min_panels = 6;
    double blowup = 1e12;
};

struct HalfLineResult {
    cplx value{};
    double error = 0.0;        // quadrature error plus extrapolation uncertainty
    cplx tail{};               // extrapolated contribution beyond the last panel
    double x_end = 0.0;        // last panel edge actually integrated
    double decay_rate = 0.0;   // -log|panel ratio| / panel, from the last panels
    EvalStatus status = EvalStatus::NotConverged;
};

// Integrates f over [x0, inf) panel by panel. Panels are aligned to the given
// phase so log-periodic kinks fall on panel edges. The contribution past the
// last panel is extrapolated from the ratio of consecutive panel integrals,
// which is exact when f is an exponential times a panel-periodic function.
HalfLineResult integrate_half_line(const std::function<cplx(double)>& f, double x0,
                                   const HalfLineOptions& opt);

}  // namespace fzeta
