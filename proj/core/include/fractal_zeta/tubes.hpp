#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fractal_zeta/sets.hpp"

namespace fzeta {

enum class TubeSource { ClosedForm, GapSum, Sliced, Sampled };

const char* to_string(TubeSource s);

// t -> |A_t| on an open validity interval. When the profile
// G(tau) = |A_t| t^(D - N), tau = log(1/t), is periodic with period T and has
// kinks at phase + kT, the model carries (T, phase) so integrators can align
// panels with the kinks. A model that is an exact sum of disjoint pieces on
// its validity interval keeps the pieces so integrals can be taken per piece.
class TubeModel {
public:
    TubeModel(TubeSource source, std::function<double(double)> volume, Interval validity, int ambient_dim,
              double dimension_hint, std::string label);

    double operator()(double t) const;  // throws DomainError outside validity
    bool valid_at(double t) const { return t > validity_.lo && t < validity_.hi; }

    TubeSource source() const { return source_; }
    const Interval& validity() const { return validity_; }
    int ambient_dim() const { return N_; }
    double dimension_hint() const { return D_; }
    const std::string& label() const { return label_; }
    std::optional<double> log_period() const { return period_; }
    double log_phase() const { return phase_; }

    TubeModel with_log_period(double period, double phase) const;
    // The sum over parts holds for t < split_limit.
    TubeModel with_parts(std::vector<TubeModel> parts, double split_limit) const;
    const std::vector<TubeModel>& parts() const { return parts_; }
    double split_limit() const { return split_limit_; }

private:
    TubeSource source_;
    std::function<double(double)> volume_;
    Interval validity_;
    int N_;
    double D_;
    std::string label_;
    std::optional<double> period_;
    double phase_ = 0.0;
    std::vector<TubeModel> parts_;
    double split_limit_ = 0.0;
};

// Volume of the unit ball in R^N.
double unit_ball_volume(int N);

// |A_t| for A = C^(m,a), t in (0, c) with c = (1 - m a)/(2(m - 1)), from the
// log-periodic closed form. Throws DomainError outside that range.
double tube_exact_cantor(int m, double a, double t);
// The periodic profile G(tau) of C^(m,a), valid for tau > log(1/c).
double cantor_profile(int m, double a, double tau);
// Closed-form extremes of the Cantor profile over one period.
double cantor_profile_min(int m, double a);
double cantor_profile_max(int m, double a);
TubeModel cantor_closed_form_model(int m, double a);

// |A_t| of a one-dimensional set from its gaps: 2t + sum_g min(g, 2t) plus the
// measure of A, equal to (hull + 2t) - sum_g (g - 2t)_+. Exact for all t > 0.
double tube_gapsum(const FractalSet& set, double t);
// |(boundary)_t intersected with the gaps|: the inner tube of the string
// formed by the gaps, sum_g min(g, 2t).
double inner_tube_gapsum(const FractalSet& set, double t);

// |A_t| for the unit sphere in R^N. For t >= 1 the hole closes and the value
// is the ball of radius 1 + t; `shell` reports which regime applies.
struct SphereTube {
    double value;
    bool shell;
};
SphereTube tube_sphere(int N, double t);

enum class SliceMethod { Quadrature, GapFormula };

struct SliceOptions {
    SliceMethod method = SliceMethod::Quadrature;
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
};

// |(A x {0})_t| in R^(N+1) by transverse slicing:
// integral over |u| < t of |A_sqrt(t^2 - u^2)| du, with u = t sin(theta).
double codim_tube_sliced(const TubeModel& base, double t, const SliceOptions& opt = {});
// The same slice integral summed in closed form over the gap levels of a
// one-dimensional set. Throws DomainError if the level count is unbounded.
double codim_tube_gapsum(const FractalSet& set, double t);

TubeModel codim_tube_model(const TubeModel& base, const SliceOptions& opt = {});
TubeModel codim_tube_model(const FractalSet& set);

// |(B x [0, side])_t| = side |B_t| + |(B x {0})_t|, applied d times.
double tube_grill(const TubeModel& base, int d, double t, double side = 1.0, const SliceOptions& opt = {});
TubeModel grill_tube_model(const TubeModel& base, int d, double side = 1.0, const SliceOptions& opt = {});

// Best available model for a set: gap sums in 1-D, closed forms for spheres,
// slicing for grills.
TubeModel tube_model(const FractalSet& set, const SliceOptions& opt = {});

// Piecewise log-log interpolation of sampled (t, |A_t|) pairs.
TubeModel sampled_tube_model(std::vector<std::pair<double, double>> samples, int ambient_dim, double dimension_hint);

struct ContentEstimate {
    double lower;            // min of |A_t| / t^(N - r) over the finest decade
    double upper;            // max over the finest decade
    double residual_spread;  // change of the extremes against the next decade
};

// Samples a geometric grid of n_samples points on [t_min, t_max]; the range
// must cover at least two decades.
ContentEstimate minkowski_contents_estimate(const TubeModel& tube, double r, double t_min, double t_max,
                                            int n_samples);

struct DimensionEstimate {
    double dimension;
    double slope;
    double intercept;
    double residual_rms;
};

DimensionEstimate box_dimension_estimate(const TubeModel& tube, double t_min, double t_max,
                                         int samples_per_decade);

// G(tau) = |A_t| t^(D - N) at t = exp(-tau).
std::vector<double> log_profile(const TubeModel& tube, double D, std::span<const double> taus);

}  // namespace fzeta
