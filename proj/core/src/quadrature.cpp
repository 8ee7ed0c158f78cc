#include "fractal_zeta/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace fzeta {
namespace {

// Kronrod 15-point nodes on [-1, 1] (non-negative half) and weights; every
// second node is a Gauss 7-point node.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double magnitude(double v) { return std::abs(v); }
double magnitude(const cplx& v) { return std::abs(v); }

template <class T>
struct Segment {
    double a, b;
    T value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class T, class F>
Segment<T> gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T fc = f(c);
    T kron = fc * kKronrod[7];
    T gauss = fc * kGauss[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kNodes[i];
        const T s = f(c - dx) + f(c + dx);
        kron += s * kKronrod[i];
        if (i % 2 == 1) gauss += s * kGauss[i / 2];
    }
    kron *= h;
    gauss *= h;
    return {a, b, kron, magnitude(kron - gauss)};
}

template <class T, class F>
QuadResult<T> adaptive(const F& f, double a, double b, const QuadOptions& opt) {
    QuadResult<T> out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<Segment<T>> heap;
    Segment<T> first = gk15<T>(f, a, b);
    out.evaluations = 15;
    T total = first.value;
    double err = first.error;
    heap.push(first);
    while (true) {
        const double target = std::max(opt.abs_tol, opt.rel_tol * magnitude(total));
        if (err <= target) {
            out.converged = true;
            break;
        }
        if (heap.size() >= opt.max_intervals) break;
        Segment<T> worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval at resolution limit
        heap.pop();
        Segment<T> left = gk15<T>(f, worst.a, mid);
        Segment<T> right = gk15<T>(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Resum to shed accumulated cancellation from the running updates.
    T sum{};
    double esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    out.value = sum;
    out.error = esum;
    return out;
}

}  // namespace

QuadResult<double> integrate(const std::function<double(double)>& f, double a, double b,
                             const QuadOptions& opt) {
    return adaptive<double>(f, a, b, opt);
}

QuadResult<cplx> integrate(const std::function<cplx(double)>& f, double a, double b,
                           const QuadOptions& opt) {
    return adaptive<cplx>(f, a, b, opt);
}

const char* to_string(EvalStatus s) {
    switch (s) {
        case EvalStatus::Converged: return "converged";
        case EvalStatus::Diverged: return "diverged";
        case EvalStatus::NotConverged: return "not-converged";
    }
    return "unknown";
}

HalfLineResult integrate_half_line(const std::function<cplx(double)>& f, double x0,
                                   const HalfLineOptions& opt) {
    HalfLineResult out;
    const double P = opt.panel;
    QuadOptions qo;
    qo.abs_tol = 0.01 * opt.abs_tol;
    qo.rel_tol = 0.1 * opt.rel_tol;

    // First edge strictly after x0 on the phase grid; a sliver is merged.
    double k0 = std::floor((x0 - opt.phase) / P) + 1.0;
    double edge = opt.phase + k0 * P;
    if (edge - x0 < 1e-9 * P) edge += P;

    cplx sum{};
    double qerr = 0.0;
    {
        auto r = integrate(f, x0, edge, qo);
        sum += r.value;
        qerr += r.error;
    }

    std::vector<cplx> panels;
    cplx prev_tail{};
    cplx prev_total{};
    bool have_prev_tail = false;
    double x = edge;
    while (x + P <= opt.x_max + 1e-9) {
        auto r = integrate(f, x, x + P, qo);
        qerr += r.error;
        sum += r.value;
        panels.push_back(r.value);
        x += P;
        out.x_end = x;
        if (!std::isfinite(std::abs(sum)) || std::abs(sum) > opt.blowup) {
            out.status = EvalStatus::Diverged;
            out.value = sum;
            return out;
        }
        const std::size_t n = panels.size();
        if (n < 2) continue;
        const cplx last = panels[n - 1];
        const cplx before = panels[n - 2];
        if (std::abs(last) == 0.0 && std::abs(before) == 0.0) {
            if (n >= opt.min_panels) {
                out.value = sum;
                out.error = qerr;
                out.decay_rate = INFINITY;
                out.status = EvalStatus::Converged;
                return out;
            }
            continue;
        }
        if (std::abs(before) == 0.0) continue;
        const cplx q = last / before;
        const double rate = -std::log(std::abs(q)) / P;
        out.decay_rate = rate;
        // Oscillation can make one panel outweigh the previous, so divergence
        // is judged on the decay averaged over the last three ratios.
        const bool stalled = n >= 4 && std::abs(panels[n - 4]) > 0.0 &&
                             -std::log(std::abs(last / panels[n - 4])) / (3.0 * P) < opt.min_decay;
        if (stalled) {
            // Panels have stopped shrinking; the integral does not converge.
            out.status = EvalStatus::Diverged;
            out.value = sum;
            return out;
        }
        if (rate <= 0.0) continue;
        const cplx tail = last * q / (1.0 - q);
        const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(sum + tail));
        if (have_prev_tail && n >= opt.min_panels) {
            // Successive extrapolated totals agree once the panel ratio is stable.
            const double unc = std::abs(sum + tail - prev_total);
            if (unc <= target || std::abs(last) / (1.0 - std::abs(q)) <= target) {
                out.value = sum + tail;
                out.tail = tail;
                out.error = qerr + unc;
                out.status = EvalStatus::Converged;
                return out;
            }
        }
        prev_tail = tail;
        prev_total = sum + tail;
        have_prev_tail = true;
    }
    // Ran out of room: report the best extrapolation with its uncertainty.
    out.value = sum + prev_tail;
    out.tail = prev_tail;
    out.error = qerr + std::abs(prev_tail);
    out.status = out.decay_rate < opt.min_decay ? EvalStatus::Diverged : EvalStatus::NotConverged;
    return out;
}

}  // namespace fzeta
