#include "fractal_zeta/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fzeta {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// sum over pieces of w^s and of w^s log w.
struct PowerSums {
    cplx p0{};
    cplx p1{};
    double error = 0.0;
    bool diverged = false;

    PowerSums& operator+=(const PowerSums& o) {
        p0 += o.p0;
        p1 += o.p1;
        error += o.error;
        diverged = diverged || o.diverged;
        return *this;
    }
};

PowerSums single_piece(double w, double count, cplx s) {
    const cplx ws = std::exp(s * std::log(w));
    return {count * ws, count * ws * std::log(w), 0.0, false};
}

// sum_{k >= n} A q^k (L0 + k L1) for |q| < 1, returned as (sum A q^k, sum A q^k log).
PowerSums geometric_levels(cplx A, cplx q, double n, double L0, double L1) {
    PowerSums out;
    if (std::abs(q) >= 1.0) {
        out.diverged = true;
        return out;
    }
    const cplx qn = std::exp(n * std::log(q));
    const cplx s0 = qn / (1.0 - q);
    const cplx s1 = qn * (n * (1.0 - q) + q) / ((1.0 - q) * (1.0 - q));
    out.p0 = A * s0;
    out.p1 = A * (L0 * s0 + L1 * s1);
    return out;
}

int levels_at_least(double g0, double a, double w) {
    // #{k >= 0 : g0 a^k >= w}
    if (g0 < w) return 0;
    int n = static_cast<int>(std::floor(std::log(w / g0) / std::log(a))) + 1;
    n = std::max(n, 0);
    while (n > 0 && g0 * std::pow(a, n - 1) < w) --n;
    while (g0 * std::pow(a, n) >= w) ++n;
    return n;
}

// Euler-Maclaurin estimate of sum_{j >= K} f(j) for f smooth and decaying.
cplx em_tail(const std::function<cplx(double)>& f, double K, double& err) {
    // Integral over [K, inf) with x = K e^y.
    HalfLineOptions ho;
    ho.panel = 1.0;
    ho.abs_tol = 1e-17;
    ho.rel_tol = 1e-13;
    ho.x_max = 700.0;
    ho.min_panels = 8;
    const auto r = integrate_half_line([&](double y) { return f(K * std::exp(y)) * K * std::exp(y); }, 0.0, ho);
    const double h = 1.0;
    const cplx fm2 = f(K - 2 * h), fm1 = f(K - h), f0 = f(K), fp1 = f(K + h), fp2 = f(K + 2 * h);
    const cplx d1 = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
    const cplx d3 = (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h * h * h);
    err += r.error + std::abs(d3) / 720.0 * 1e-3;
    if (r.status == EvalStatus::Diverged) err = INFINITY;
    return r.value + 0.5 * f0 - d1 / 12.0 + d3 / 720.0;
}

// sum_{j >= k} w_j^s and w_j^s log w_j with w_j = l_j / 2.
PowerSums string_tail(const LengthSequence& L, cplx s, double k) {
    PowerSums out;
    switch (L.kind()) {
        case LengthSequence::Kind::Explicit: {
            for (double j = k; j <= static_cast<double>(L.explicit_size()); j += 1.0) {
                out += single_piece(0.5 * L.length(j), 1.0, s);
            }
            return out;
        }
        case LengthSequence::Kind::Geometric: {
            const double w1 = 0.5 * L.first();
            const cplx q = std::exp(s * std::log(L.ratio()));
            return geometric_levels(std::exp(s * std::log(w1)), q, k - 1.0, std::log(w1), std::log(L.ratio()));
        }
        case LengthSequence::Kind::PowerLaw: {
            const double a = L.exponent();
            if (s.real() * (1.0 + a) <= 1.0) {
                out.diverged = true;
                return out;
            }
            auto log_w = [a](double x) { return -a * std::log(x) + std::log(-std::expm1(-a * std::log1p(1.0 / x))) - std::log(2.0); };
            const double K = std::max(k, 4000.0);
            for (double j = k; j < K; j += 1.0) {
                const double lw = log_w(j);
                const cplx v = std::exp(s * lw);
                out.p0 += v;
                out.p1 += v * lw;
            }
            double err = 0.0;
            out.p0 += em_tail([&](double x) { return std::exp(s * log_w(x)); }, K, err);
            out.p1 += em_tail([&](double x) {
                const double lw = log_w(x);
                return std::exp(s * lw) * lw;
            }, K, err);
            out.error += err;
            out.diverged = !std::isfinite(err);
            return out;
        }
    }
    return out;
}

// Power sums over all gaps of w = min(g/2, cap).
PowerSums gap_power_sums(const FractalSet& set, cplx s, double cap) {
    return std::visit(
        overloaded{
            [&](const GeneralizedCantor& c) {
                const double g = cantor_gap_ratio(c.m, c.a);
                const int n = levels_at_least(0.5 * g, c.a, cap);
                PowerSums out = single_piece(cap, std::pow(c.m, n) - 1.0, s);
                const double h0 = 0.5 * g;
                const cplx A = (c.m - 1.0) * std::exp(s * std::log(h0));
                const cplx q = static_cast<double>(c.m) * std::exp(s * std::log(c.a));
                out += geometric_levels(A, q, n, std::log(h0), std::log(c.a));
                return out;
            },
            [&](const Sphere&) { return single_piece(std::min(1.0, cap), 1.0, s); },
            [&](const DisjointUnion& u) {
                PowerSums out;
                for (const auto& [comp, offset] : u.components) out += gap_power_sums(comp, s, cap);
                std::vector<Interval> iv;
                for (const auto& [comp, offset] : u.components) {
                    iv.push_back({comp.hull().sides[0].lo + offset, comp.hull().sides[0].hi + offset});
                }
                std::sort(iv.begin(), iv.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
                for (std::size_t i = 1; i < iv.size(); ++i) out += single_piece(std::min(0.5 * (iv[i].lo - iv[i - 1].hi), cap), 1.0, s);
                return out;
            },
            [&](const Scaled& sc) {
                PowerSums inner = gap_power_sums(sc.base, s, cap / sc.lambda);
                const cplx ls = std::exp(s * std::log(sc.lambda));
                PowerSums out;
                out.p0 = ls * inner.p0;
                out.p1 = ls * (inner.p1 + std::log(sc.lambda) * inner.p0);
                out.error = std::abs(ls) * inner.error;
                out.diverged = inner.diverged;
                return out;
            },
            [&](const Grill&) -> PowerSums { throw DomainError("direct 1-D zeta: set is not one-dimensional"); },
            [&](const AString& as) {
                const LengthSequence L = LengthSequence::power_law(as.a);
                const double J = L.count_longer_than(2.0 * cap);
                PowerSums out = single_piece(cap, J, s);
                out += string_tail(L, s, J + 1.0);
                return out;
            },
            [&](const FractalString& fs) {
                const double J = fs.lengths.count_longer_than(2.0 * cap);
                PowerSums out = single_piece(cap, J, s);
                out += string_tail(fs.lengths, s, J + 1.0);
                return out;
            },
        },
        set.variant());
}

ZetaValue from_sums(const PowerSums& p, cplx value) {
    ZetaValue z;
    z.value = value;
    z.error = p.error;
    z.status = p.diverged ? EvalStatus::Diverged : EvalStatus::Converged;
    return z;
}

}  // namespace

ZetaValue tube_zeta(const TubeModel& tube, cplx s, const ZetaEvalConfig& cfg) {
    const double delta = cfg.delta;
    if (!(delta > 0.0)) throw DomainError("tube zeta: need delta > 0");
    if (delta > tube.validity().hi * (1.0 + 1e-12)) throw DomainError("tube zeta: delta beyond tube model validity");
    if (!tube.parts().empty() && delta <= tube.split_limit()) {
        // Neighborhoods of the pieces are disjoint below delta, so the integral splits.
        ZetaValue z;
        z.status = EvalStatus::Converged;
        z.decay_rate = INFINITY;
        for (const auto& part : tube.parts()) {
            const ZetaValue p = tube_zeta(part, s, cfg);
            z.value += p.value;
            z.error += p.error;
            z.tail_bound += p.tail_bound;
            z.decay_rate = std::min(z.decay_rate, p.decay_rate);
            if (p.status != EvalStatus::Converged && z.status == EvalStatus::Converged) z.status = p.status;
        }
        return z;
    }
    const int N = tube.ambient_dim();
    const double sigma = s.real();
    const double omega = s.imag();
    const std::function<cplx(double)> f = [&](double tau) -> cplx {
        const double V = tube(std::exp(-tau));
        if (!(V > 0.0)) return 0.0;
        return std::exp(cplx(std::log(V) - (sigma - N) * tau, -omega * tau));
    };
    HalfLineOptions ho;
    ho.panel = tube.log_period().value_or(1.0);
    ho.phase = tube.log_period() ? tube.log_phase() : 0.0;
    ho.abs_tol = cfg.abs_tol;
    ho.rel_tol = cfg.rel_tol;
    ho.x_max = cfg.tau_max;
    const auto r = integrate_half_line(f, -std::log(delta), ho);
    ZetaValue z;
    z.value = r.value;
    z.error = r.error;
    z.status = r.status;
    z.decay_rate = r.decay_rate;
    const double D = tube.dimension_hint();
    const double beta = sigma - D - cfg.eps;
    if (beta > 0.0 && r.x_end > 0.0) {
        double C = 0.0;
        for (int i = 0; i <= 8; ++i) {
            const double tau = r.x_end - ho.panel * i / 4.0;
            if (tau <= -std::log(delta)) break;
            C = std::max(C, tube(std::exp(-tau)) * std::exp((N - D - cfg.eps) * tau));
        }
        z.tail_bound = C * std::exp(-beta * r.x_end) / beta;
    } else {
        z.tail_bound = INFINITY;
    }
    if (z.status == EvalStatus::Diverged) z.error = INFINITY;
    return z;
}

ZetaValue distance_zeta(const TubeModel& tube, cplx s, const ZetaEvalConfig& cfg) {
    ZetaValue z = tube_zeta(tube, s, cfg);
    const int N = tube.ambient_dim();
    double d = cfg.delta;
    if (d >= tube.validity().hi) d = std::nextafter(tube.validity().hi, 0.0);
    const cplx head = std::exp((s - static_cast<double>(N)) * std::log(cfg.delta)) * tube(d);
    const cplx factor = static_cast<double>(N) - s;
    z.value = head + factor * z.value;
    z.error *= std::abs(factor);
    z.tail_bound *= std::abs(factor);
    return z;
}

ZetaValue distance_zeta(const FractalSet& set, cplx s, const ZetaEvalConfig& cfg) {
    return distance_zeta(tube_model(set), s, cfg);
}

ZetaValue distance_zeta_direct_1d(const FractalSet& set, cplx s, const ZetaEvalConfig& cfg) {
    if (!set.one_dimensional()) throw DomainError("direct 1-D zeta: set is not one-dimensional");
    if (s == 0.0) throw DomainError("direct 1-D zeta: s = 0");
    const double delta = cfg.delta;
    PowerSums p = gap_power_sums(set, s, delta);
    p += single_piece(delta, 1.0, s);
    return from_sums(p, 2.0 * p.p0 / s);
}

ZetaValue distance_zeta_derivative_1d(const FractalSet& set, cplx s, const ZetaEvalConfig& cfg) {
    if (!set.one_dimensional()) throw DomainError("direct 1-D zeta: set is not one-dimensional");
    if (s == 0.0) throw DomainError("direct 1-D zeta: s = 0");
    const double delta = cfg.delta;
    PowerSums p = gap_power_sums(set, s, delta);
    p += single_piece(delta, 1.0, s);
    return from_sums(p, 2.0 * p.p1 / s - 2.0 * p.p0 / (s * s));
}

ZetaValue geometric_zeta(const LengthSequence& lengths, cplx s) {
    // string_tail works with halves of the lengths; undo the 2^-s factor.
    const PowerSums p = string_tail(lengths, s, 1.0);
    const cplx two_s = std::exp(s * std::log(2.0));
    ZetaValue z = from_sums(p, two_s * p.p0);
    z.error *= std::abs(two_s);
    return z;
}

double functional_equation_residual(const FractalSet& set, cplx s, const ZetaEvalConfig& cfg) {
    const ZetaValue direct = distance_zeta_direct_1d(set, s, cfg);
    const ZetaValue via_tube = distance_zeta(set, s, cfg);
    if (!direct.ok() || !via_tube.ok()) throw ConvergenceError("functional equation: evaluation did not converge", INFINITY);
    return std::abs(direct.value - via_tube.value) / std::abs(direct.value);
}

double scaling_residual(const FractalSet& set, double lambda, cplx s, const ZetaEvalConfig& cfg) {
    ZetaEvalConfig scaled_cfg = cfg;
    scaled_cfg.delta = lambda * cfg.delta;
    const ZetaValue lhs = distance_zeta(scale(set, lambda), s, scaled_cfg);
    const ZetaValue rhs = distance_zeta(set, s, cfg);
    if (!lhs.ok() || !rhs.ok()) throw ConvergenceError("scaling: evaluation did not converge", INFINITY);
    const cplx expected = std::exp(s * std::log(lambda)) * rhs.value;
    return std::abs(lhs.value - expected) / std::abs(expected);
}

AbscissaBracket abscissa_probe(const RealEvaluator& f, std::span<const double> grid, const ProbeOptions& opt) {
    if (grid.empty()) throw DomainError("abscissa probe: empty grid");
    std::vector<double> pts(grid.begin(), grid.end());
    std::sort(pts.begin(), pts.end(), std::greater<>());
    auto converges = [&](double x) {
        try {
            const ZetaValue z = f(x);
            return z.ok() && std::isfinite(std::abs(z.value)) && std::abs(z.value) < opt.blowup;
        } catch (const ConvergenceError&) {
            return false;
        }
    };
    if (!converges(pts.front())) throw ConvergenceError("abscissa probe: no convergence at the top of the grid", INFINITY);
    double hi = pts.front();
    double lo = -INFINITY;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (converges(pts[i])) {
            hi = pts[i];
        } else {
            lo = pts[i];
            break;
        }
    }
    if (!std::isfinite(lo)) return {lo, hi, false};
    for (int it = 0; it < opt.bisection_steps && hi - lo > opt.width; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (converges(mid)) hi = mid;
        else lo = mid;
    }
    return {lo, hi, true};
}

}  // namespace fzeta
