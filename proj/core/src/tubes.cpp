#include "fractal_zeta/tubes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fractal_zeta/parallel.hpp"
#include "fractal_zeta/quadrature.hpp"

namespace fzeta {
namespace {

double cantor_c(int m, double a) { return (1.0 - m * a) / (2.0 * (m - 1)); }

struct TooManyLevels {};

}  // namespace

const char* to_string(TubeSource s) {
    switch (s) {
        case TubeSource::ClosedForm: return "closed-form";
        case TubeSource::GapSum: return "gap-sum";
        case TubeSource::Sliced: return "sliced";
        case TubeSource::Sampled: return "sampled";
    }
    return "unknown";
}

TubeModel::TubeModel(TubeSource source, std::function<double(double)> volume, Interval validity, int ambient_dim,
                     double dimension_hint, std::string label)
    : source_(source),
      volume_(std::move(volume)),
      validity_(validity),
      N_(ambient_dim),
      D_(dimension_hint),
      label_(std::move(label)) {}

double TubeModel::operator()(double t) const {
    if (!valid_at(t)) throw DomainError("tube model '" + label_ + "': t outside validity interval");
    return volume_(t);
}

TubeModel TubeModel::with_log_period(double period, double phase) const {
    TubeModel out = *this;
    out.period_ = period;
    out.phase_ = phase;
    return out;
}

TubeModel TubeModel::with_parts(std::vector<TubeModel> parts, double split_limit) const {
    TubeModel out = *this;
    out.parts_ = std::move(parts);
    out.split_limit_ = split_limit;
    return out;
}

double unit_ball_volume(int N) {
    return std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
}

double cantor_profile(int m, double a, double tau) {
    const double c = cantor_c(m, a);
    const double D = cantor_dimension(m, a);
    const double T = std::log(1.0 / a);
    const double u = (tau - std::log(1.0 / c)) / T;
    const double g = std::ceil(u) - u;  // 1 - x on (0, 1], extended periodically
    return std::pow(c, D - 1.0) * std::pow(m * a, g) + 2.0 * std::pow(c, D) * std::pow(static_cast<double>(m), g);
}

double cantor_profile_min(int m, double a) {
    const double c = cantor_c(m, a);
    const double D = cantor_dimension(m, a);
    // Profile as a function of y = m^g is convex; interior critical point:
    double y = std::pow(2.0 * c * D / (1.0 - D), -D);
    y = std::clamp(y, 1.0, static_cast<double>(m));
    return std::pow(c, D - 1.0) * std::pow(y, 1.0 - 1.0 / D) + 2.0 * std::pow(c, D) * y;
}

double cantor_profile_max(int m, double a) {
    const double c = cantor_c(m, a);
    const double D = cantor_dimension(m, a);
    return std::pow(c, D - 1.0) * m * (1.0 - a) / (m - 1.0);
}

double tube_exact_cantor(int m, double a, double t) {
    make_cantor(m, a);  // validates parameters
    const double c = cantor_c(m, a);
    if (!(t > 0.0 && t < c)) throw DomainError("cantor closed form: need 0 < t < c");
    const double D = cantor_dimension(m, a);
    return std::pow(t, 1.0 - D) * cantor_profile(m, a, std::log(1.0 / t));
}

TubeModel cantor_closed_form_model(int m, double a) {
    make_cantor(m, a);
    const double c = cantor_c(m, a);
    TubeModel model(TubeSource::ClosedForm, [m, a](double t) { return tube_exact_cantor(m, a, t); }, Interval{0.0, c}, 1,
                    cantor_dimension(m, a), "cantor closed form");
    return model.with_log_period(std::log(1.0 / a), std::log(1.0 / c));
}

double tube_gapsum(const FractalSet& set, double t) {
    if (!(t > 0.0)) throw DomainError("tube: need t > 0");
    return 2.0 * t + gap_cover(set, 2.0 * t) + set_measure(set);
}

double inner_tube_gapsum(const FractalSet& set, double t) {
    if (!(t > 0.0)) throw DomainError("tube: need t > 0");
    return gap_cover(set, 2.0 * t);
}

SphereTube tube_sphere(int N, double t) {
    if (N < 1) throw DomainError("sphere: need N >= 1");
    if (!(t > 0.0)) throw DomainError("tube: need t > 0");
    const double w = unit_ball_volume(N);
    if (t < 1.0) {
        // Odd binomial terms only; the difference of powers cancels for small t.
        double acc = 0.0, binom = 1.0, tk = 1.0;
        for (int k = 1; k <= N; ++k) {
            binom = binom * (N - k + 1) / k;
            tk *= t;
            if (k % 2 == 1) acc += 2.0 * binom * tk;
        }
        return {w * acc, true};
    }
    return {w * std::pow(1.0 + t, N), false};
}

double codim_tube_sliced(const TubeModel& base, double t, const SliceOptions& opt) {
    if (!(t > 0.0)) return 0.0;
    // u is the angle from the transverse axis, so r = t sin(u) keeps full
    // relative precision as r -> 0.
    const std::function<double(double)> f = [&](double u) {
        const double r = t * std::sin(u);
        return r > 0.0 ? 2.0 * base(r) * r : 0.0;
    };
    // Kinks of a log-periodic base sit at r_k = exp(-(phase + k T)); splitting
    // the angle range there leaves smooth pieces for the quadrature.
    std::vector<double> edges{0.5 * std::numbers::pi};
    if (base.log_period()) {
        const double T = *base.log_period();
        const double k0 = std::ceil((std::log(1.0 / t) - base.log_phase()) / T);
        for (double k = std::max(k0, 0.0);; k += 1.0) {
            const double r = std::exp(-(base.log_phase() + k * T));
            if (r < 1e-14 * t) break;
            if (r < t) edges.push_back(std::asin(r / t));
        }
    }
    edges.push_back(0.0);
    std::sort(edges.begin(), edges.end(), std::greater<>());
    QuadOptions qo;
    qo.rel_tol = opt.rel_tol;
    qo.max_intervals = 6000;
    double value = 0.0, error = 0.0;
    bool converged = true;
    // Pieces shrink geometrically towards u = 0; later ones only need to be
    // accurate relative to the running total.
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (edges[i] <= edges[i + 1]) continue;
        qo.abs_tol = std::max(opt.abs_tol, 0.1 * opt.rel_tol * std::abs(value));
        const auto res = integrate(f, edges[i + 1], edges[i], qo);
        value += res.value;
        error += res.error;
        converged = converged && res.converged;
    }
    if (!converged && error > 1e3 * std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
        throw ConvergenceError("slice quadrature did not converge", error);
    }
    return value;
}

double codim_tube_gapsum(const FractalSet& set, double t) {
    if (!set.one_dimensional()) throw DomainError("codim gap formula: set is not one-dimensional");
    if (!(t > 0.0)) return 0.0;
    const double pi = std::numbers::pi;
    // |A_r| = 2r + sum_g min(g, 2r); each term integrates in closed form over
    // the chord |u| < t with r = sqrt(t^2 - u^2).
    double total = pi * t * t;
    const double w_stop = 2.0 * t * 1e-5;
    std::size_t levels = 0;
    try {
        for_each_gap_level(set, w_stop, [&](double g, double count) {
            if (++levels > 2000000) throw TooManyLevels{};
            const double x = g / (2.0 * t);
            if (x >= 1.0) total += count * pi * t * t;
            else total += count * 2.0 * t * t * (x * std::sqrt(1.0 - x * x) + std::asin(x));
        });
    } catch (const TooManyLevels&) {
        throw DomainError("codim gap formula: too many gap levels; use slicing quadrature");
    } catch (const DomainError&) {
        throw DomainError("codim gap formula: too many gap levels; use slicing quadrature");
    }
    // Gaps below w_stop: the chord integral is 2 t g (1 - O(x^2)).
    total += 2.0 * t * small_gap_sum(set, w_stop);
    return total;
}

TubeModel codim_tube_model(const TubeModel& base, const SliceOptions& opt) {
    TubeModel out(TubeSource::Sliced, [base, opt](double t) { return codim_tube_sliced(base, t, opt); }, base.validity(),
                  base.ambient_dim() + 1, base.dimension_hint(), "codim slice of " + base.label());
    if (base.log_period()) out = out.with_log_period(*base.log_period(), base.log_phase());
    return out;
}

TubeModel codim_tube_model(const FractalSet& set) {
    const TubeModel base = tube_model(set);
    TubeModel out(TubeSource::Sliced, [set](double t) { return codim_tube_gapsum(set, t); }, Interval{0.0, INFINITY}, 2,
                  set.dimension(), "codim gap formula of " + set.kind_name());
    if (base.log_period()) out = out.with_log_period(*base.log_period(), base.log_phase());
    return out;
}

double tube_grill(const TubeModel& base, int d, double t, double side, const SliceOptions& opt) {
    return grill_tube_model(base, d, side, opt)(t);
}

TubeModel grill_tube_model(const TubeModel& base, int d, double side, const SliceOptions& opt) {
    if (d < 0) throw DomainError("grill: need d >= 0");
    TubeModel current = base;
    for (int k = 0; k < d; ++k) {
        const TubeModel prev = current;
        TubeModel next(TubeSource::Sliced,
                       [prev, side, opt](double t) { return side * prev(t) + codim_tube_sliced(prev, t, opt); },
                       prev.validity(), prev.ambient_dim() + 1, prev.dimension_hint() + 1.0,
                       "grill of " + base.label());
        if (prev.log_period()) next = next.with_log_period(*prev.log_period(), prev.log_phase());
        current = next;
    }
    return current;
}

namespace {

// Component models and half the smallest gap between component hulls.
std::pair<std::vector<TubeModel>, double> union_parts(const DisjointUnion& u, const SliceOptions& opt) {
    std::vector<TubeModel> parts;
    std::vector<Interval> iv;
    for (const auto& [comp, offset] : u.components) {
        parts.push_back(tube_model(comp, opt));
        iv.push_back({comp.hull().sides[0].lo + offset, comp.hull().sides[0].hi + offset});
    }
    std::sort(iv.begin(), iv.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    double sep = INFINITY;
    for (std::size_t i = 1; i < iv.size(); ++i) sep = std::min(sep, iv[i].lo - iv[i - 1].hi);
    return {std::move(parts), 0.5 * sep};
}

}  // namespace

TubeModel tube_model(const FractalSet& set, const SliceOptions& opt) {
    const auto& v = set.variant();
    if (set.one_dimensional()) {
        TubeModel model(TubeSource::GapSum, [set](double t) { return tube_gapsum(set, t); }, Interval{0.0, INFINITY}, 1,
                        set.dimension(), set.kind_name() + " gap sum");
        // Exact log-periodicity for (scaled) Cantor sets.
        const FractalSet* inner = &set;
        double lambda = 1.0;
        if (auto* s = std::get_if<Scaled>(&v)) {
            inner = &s->base;
            lambda = s->lambda;
        }
        if (auto* c = std::get_if<GeneralizedCantor>(&inner->variant())) {
            model = model.with_log_period(std::log(1.0 / c->a), std::log(1.0 / cantor_c(c->m, c->a)) - std::log(lambda));
        }
        // Geometric strings: kinks at t = l_j / 2 repeat with ratio r.
        if (auto* f = std::get_if<FractalString>(&inner->variant());
            f && f->lengths.kind() == LengthSequence::Kind::Geometric) {
            model = model.with_log_period(std::log(1.0 / f->lengths.ratio()),
                                          std::log(2.0 / f->lengths.first()) - std::log(lambda));
        }
        if (auto* u = std::get_if<DisjointUnion>(&v)) {
            auto [parts, half_sep] = union_parts(*u, opt);
            model = model.with_parts(std::move(parts), half_sep);
        }
        return model;
    }
    if (auto* s = std::get_if<Sphere>(&v)) {
        const int N = s->N;
        return TubeModel(TubeSource::ClosedForm, [N](double t) { return tube_sphere(N, t).value; }, Interval{0.0, INFINITY},
                         N, N - 1.0, "sphere closed form");
    }
    if (auto* g = std::get_if<Grill>(&v)) {
        if (opt.method == SliceMethod::GapFormula && g->base.one_dimensional()) {
            const FractalSet base = g->base;
            const double side = g->side;
            TubeModel first(TubeSource::Sliced,
                            [base, side](double t) { return side * tube_gapsum(base, t) + codim_tube_gapsum(base, t); },
                            Interval{0.0, INFINITY}, 2, base.dimension() + 1.0, "grill gap formula");
            const TubeModel b = tube_model(base);
            if (b.log_period()) first = first.with_log_period(*b.log_period(), b.log_phase());
            return grill_tube_model(first, g->d - 1, side, opt);
        }
        return grill_tube_model(tube_model(g->base, opt), g->d, g->side, opt);
    }
    if (auto* u = std::get_if<DisjointUnion>(&v)) {
        auto [parts, half_sep] = union_parts(*u, opt);
        double hi = half_sep;
        for (const auto& p : parts) hi = std::min(hi, p.validity().hi);
        return TubeModel(TubeSource::Sliced,
                         [parts](double t) {
                             double acc = 0.0;
                             for (const auto& p : parts) acc += p(t);
                             return acc;
                         },
                         Interval{0.0, hi}, set.ambient_dim(), set.dimension(), "union of components")
            .with_parts(parts, hi);
    }
    const auto& s = std::get<Scaled>(v);
    const TubeModel base = tube_model(s.base, opt);
    const double lambda = s.lambda;
    const int N = set.ambient_dim();
    TubeModel out(base.source(), [base, lambda, N](double t) { return std::pow(lambda, N) * base(t / lambda); },
                  Interval{lambda * base.validity().lo, lambda * base.validity().hi}, N, base.dimension_hint(),
                  "scaled " + base.label());
    if (base.log_period()) out = out.with_log_period(*base.log_period(), base.log_phase() - std::log(lambda));
    return out;
}

TubeModel sampled_tube_model(std::vector<std::pair<double, double>> samples, int ambient_dim, double dimension_hint) {
    if (samples.size() < 2) throw DomainError("sampled tube: need at least two samples");
    std::sort(samples.begin(), samples.end());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].first > 0.0) || !(samples[i].second > 0.0)) throw DomainError("sampled tube: samples must be positive");
        if (i > 0 && samples[i].first == samples[i - 1].first) throw DomainError("sampled tube: duplicate t");
    }
    const double lo = samples.front().first;
    const double hi = samples.back().first;
    auto interp = [samples](double t) {
        auto it = std::lower_bound(samples.begin(), samples.end(), std::pair<double, double>(t, -HUGE_VAL));
        if (it == samples.begin()) return samples.front().second;
        if (it == samples.end()) return samples.back().second;
        const auto& [t1, v1] = *(it - 1);
        const auto& [t2, v2] = *it;
        const double w = std::log(t / t1) / std::log(t2 / t1);
        return std::exp((1.0 - w) * std::log(v1) + w * std::log(v2));
    };
    // Closed interval semantics are emulated by widening by one ulp.
    return TubeModel(TubeSource::Sampled, interp, Interval{std::nextafter(lo, 0.0), std::nextafter(hi, INFINITY)},
                     ambient_dim, dimension_hint, "sampled");
}

ContentEstimate minkowski_contents_estimate(const TubeModel& tube, double r, double t_min, double t_max,
                                            int n_samples) {
    if (!(t_min > 0.0 && t_max > t_min)) throw DomainError("content estimate: need 0 < t_min < t_max");
    const double decades = std::log10(t_max / t_min);
    if (decades < 2.0 - 1e-9) throw DomainError("content estimate: need at least two decades");
    if (n_samples < 4) throw DomainError("content estimate: too few samples");
    const int N = tube.ambient_dim();
    std::vector<double> ts(static_cast<std::size_t>(n_samples)), qs(ts.size());
    for (int i = 0; i < n_samples; ++i) {
        ts[i] = t_min * std::pow(t_max / t_min, static_cast<double>(i) / (n_samples - 1));
    }
    parallel_for(ts.size(), [&](std::size_t i) { qs[i] = tube(ts[i]) / std::pow(ts[i], N - r); });
    double lo1 = INFINITY, hi1 = -INFINITY, lo2 = INFINITY, hi2 = -INFINITY;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] <= 10.0 * t_min * (1 + 1e-12)) {
            lo1 = std::min(lo1, qs[i]);
            hi1 = std::max(hi1, qs[i]);
        } else if (ts[i] <= 100.0 * t_min * (1 + 1e-12)) {
            lo2 = std::min(lo2, qs[i]);
            hi2 = std::max(hi2, qs[i]);
        }
    }
    return {lo1, hi1, std::max(std::abs(lo1 - lo2), std::abs(hi1 - hi2))};
}

DimensionEstimate box_dimension_estimate(const TubeModel& tube, double t_min, double t_max, int samples_per_decade) {
    if (!(t_min > 0.0 && t_max > t_min)) throw DomainError("dimension estimate: need 0 < t_min < t_max");
    const double decades = std::log10(t_max / t_min);
    const auto n = static_cast<std::size_t>(std::ceil(decades * samples_per_decade)) + 1;
    if (n < 3) throw DomainError("dimension estimate: too few samples");
    std::vector<double> x(n), y(n);
    parallel_for(n, [&](std::size_t i) {
        const double t = t_min * std::pow(t_max / t_min, static_cast<double>(i) / (n - 1));
        x[i] = std::log(t);
        y[i] = std::log(tube(t));
    });
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (intercept + slope * x[i]);
        ss += e * e;
    }
    return {tube.ambient_dim() - slope, slope, intercept, std::sqrt(ss / n)};
}

std::vector<double> log_profile(const TubeModel& tube, double D, std::span<const double> taus) {
    std::vector<double> out(taus.size());
    const int N = tube.ambient_dim();
    parallel_for(taus.size(), [&](std::size_t i) {
        const double t = std::exp(-taus[i]);
        out[i] = tube(t) * std::exp((N - D) * taus[i]);
    });
    return out;
}

}  // namespace fzeta
