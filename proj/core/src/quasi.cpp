#include "fractal_zeta/quasi.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <fftw3.h>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

#include "fractal_zeta/parallel.hpp"

namespace fzeta {
namespace {

using boost::multiprecision::cpp_int;
using Real = boost::multiprecision::cpp_dec_float_100;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double to_double(const cpp_int& v) { return v.convert_to<double>(); }

// Continued fraction of x; terminates once a fractional part falls below
// zero_tol relative to the remainder.
template <class Num>
IrrationalityEvidence expand(Num x, int depth, const Num& zero_tol) {
    IrrationalityEvidence ev;
    cpp_int p_prev = 0, q_prev = 1;
    cpp_int p = 1, q = 0;
    Num r = x;
    for (int k = 0; k <= depth; ++k) {
        const Num fl = floor(r);
        const cpp_int a = static_cast<cpp_int>(fl);
        ev.partial_quotients.push_back(a.str());
        if (k > 0) ev.max_partial_quotient = std::max(ev.max_partial_quotient, to_double(a));
        const cpp_int p_next = a * p + p_prev;
        const cpp_int q_next = a * q + q_prev;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        const Num approx = Num(p) / Num(q);
        const Num diff = abs(x - approx) * Num(q) * Num(q);
        ev.convergents.push_back({p.str(), q.str(), static_cast<double>(approx), static_cast<double>(diff)});
        ev.depth_reached = k;
        const Num frac = r - fl;
        if (frac <= zero_tol * max(Num(1), abs(r))) {
            ev.terminated = true;
            return ev;
        }
        r = Num(1) / frac;
    }
    return ev;
}

double hann(int k, int n) { return 0.5 - 0.5 * std::cos(kTwoPi * k / (n - 1)); }

double flat_top(int k, int n) {
    const double x = kTwoPi * k / (n - 1);
    return 1.0 - 1.93 * std::cos(x) + 1.29 * std::cos(2 * x) - 0.388 * std::cos(3 * x) + 0.028 * std::cos(4 * x);
}

}  // namespace

std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t m) {
    if (m < 2) throw DomainError("factorize: need m >= 2");
    std::vector<std::pair<std::int64_t, int>> out;
    for (std::int64_t p = 2; p <= m / p; ++p) {
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        if (e > 0) out.emplace_back(p, e);
    }
    if (m > 1) out.emplace_back(m, 1);
    return out;
}

int rational_rank(const IntMatrix& matrix) {
    if (matrix.empty()) return 0;
    const std::size_t rows = matrix.size();
    std::size_t cols = 0;
    for (const auto& r : matrix) cols = std::max(cols, r.size());
    std::vector<std::vector<cpp_int>> A(rows, std::vector<cpp_int>(cols, 0));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < matrix[i].size(); ++j) A[i][j] = matrix[i][j];
    }
    cpp_int prev = 1;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < rows && A[pivot][col] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(A[pivot], A[rank]);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            for (std::size_t j = col + 1; j < cols; ++j) {
                // Bareiss: the division is exact.
                A[i][j] = (A[rank][col] * A[i][j] - A[i][col] * A[rank][j]) / prev;
            }
            A[i][col] = 0;
        }
        prev = A[rank][col];
        ++rank;
    }
    return static_cast<int>(rank);
}

QuasiperiodicSet build_quasiperiodic(double D, const std::vector<std::int64_t>& moduli) {
    if (!(D > 0.0 && D < 1.0)) throw DomainError("quasiperiodic construction: need 0 < D < 1");
    if (moduli.empty()) throw DomainError("quasiperiodic construction: no moduli");
    QuasiConstruction c;
    c.D = D;
    c.moduli = moduli;
    std::map<std::int64_t, std::map<std::int64_t, int>> fac;
    std::vector<std::int64_t> primes;
    for (auto m : moduli) {
        if (m < 2) throw DomainError("quasiperiodic construction: moduli must be >= 2");
        if (m > std::numeric_limits<int>::max()) throw DomainError("quasiperiodic construction: modulus too large");
        for (auto [p, e] : factorize(m)) {
            fac[m][p] = e;
            primes.push_back(p);
        }
    }
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    c.primes = primes;
    for (auto m : moduli) {
        std::vector<std::int64_t> row;
        for (auto p : primes) row.push_back(fac[m].count(p) ? fac[m][p] : 0);
        c.exponent_matrix.push_back(row);
    }
    std::vector<std::int64_t> sorted = moduli;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        c.warnings.push_back("duplicate moduli: exponent matrix is rank deficient");
    }
    c.rank = rational_rank(c.exponent_matrix);
    c.certified = c.rank == static_cast<int>(moduli.size());
    if (!c.certified) {
        c.warnings.push_back("exponent vectors are linearly dependent over Q (rank " + std::to_string(c.rank) + " < " +
                             std::to_string(moduli.size()) + ")");
    }
    std::vector<std::pair<FractalSet, double>> parts;
    for (std::size_t i = 0; i < moduli.size(); ++i) {
        const double m = static_cast<double>(moduli[i]);
        const double a = std::pow(m, -1.0 / D);
        c.scales.push_back(a);
        c.periods.push_back(std::log(m) / D);
        parts.emplace_back(make_cantor(static_cast<int>(moduli[i]), a), 2.0 * static_cast<double>(i));
    }
    return {make_union(parts), c};
}

ComplexDimensions union_dims(const QuasiConstruction& c) {
    ComplexDimensions dims;
    dims.abscissa = c.D;
    for (double T : c.periods) {
        const double p = kTwoPi / T;
        const bool dup = std::any_of(dims.lattices.begin(), dims.lattices.end(),
                                     [&](const PoleLattice& L) { return std::abs(L.period - p) <= 1e-12 * p; });
        if (!dup) dims.lattices.push_back({c.D, p, 1});
    }
    return dims;
}

MeromorphicZeta union_kernel_model(const QuasiConstruction& c) {
    std::vector<MeromorphicZeta> parts;
    for (std::size_t i = 0; i < c.moduli.size(); ++i) {
        parts.push_back(exponential_kernel_model(static_cast<int>(c.moduli[i]), c.scales[i]));
    }
    MeromorphicZeta z;
    z.name = "quasiperiodic union kernel";
    z.kernel = KernelKind::UnionForm;
    z.kind = ZetaKind::Other;
    z.abscissa = c.D;
    z.dims = union_dims(c);
    z.eval = [parts](cplx s) {
        cplx acc = 0.0;
        for (const auto& p : parts) acc += p.eval(s);
        return acc;
    };
    z.residue = [parts](cplx s) -> std::optional<cplx> {
        cplx acc = 0.0;
        bool any = false;
        for (const auto& p : parts) {
            if (auto r = p.residue(s)) {
                acc += *r;
                any = true;
            }
        }
        if (!any) return std::nullopt;
        return acc;
    };
    return z;
}

std::vector<PoleCoincidence> coincident_poles(const QuasiConstruction& c, std::int64_t k_max) {
    std::vector<PoleCoincidence> out;
    const std::size_t n = c.exponent_matrix.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& ei = c.exponent_matrix[i];
            const auto& ej = c.exponent_matrix[j];
            if (rational_rank({ei, ej}) == 2) continue;
            // e_i = (r / s) e_j, so m_i^s = m_j^r and k_i = r, k_j = s is minimal.
            std::size_t col = 0;
            while (ej[col] == 0) ++col;
            std::int64_t r = ei[col], s = ej[col];
            const std::int64_t g = std::gcd(r, s);
            r /= g;
            s /= g;
            if (r <= k_max && s <= k_max) out.push_back({i, j, r, s});
        }
    }
    return out;
}

IrrationalityEvidence irrationality_evidence_log_ratio(std::int64_t num, std::int64_t den, int depth) {
    if (num < 1 || den < 2) throw DomainError("log ratio: need num >= 1 and den >= 2");
    if (depth < 1) throw DomainError("continued fraction: need depth >= 1");
    const Real x = log(Real(num)) / log(Real(den));
    // Partial quotients are reliable while q^2 stays far below 10^100.
    return expand<Real>(x, depth, Real("1e-80"));
}

IrrationalityEvidence irrationality_evidence(std::int64_t p, std::int64_t q, int depth) {
    if (q <= 0 || p <= 0) throw DomainError("continued fraction: need p, q > 0");
    if (depth < 1) throw DomainError("continued fraction: need depth >= 1");
    IrrationalityEvidence ev;
    std::int64_t a = p, b = q;
    cpp_int p_prev = 0, q_prev = 1, pc = 1, qc = 0;
    for (int k = 0; k <= depth; ++k) {
        const std::int64_t t = a / b;
        ev.partial_quotients.push_back(std::to_string(t));
        if (k > 0) ev.max_partial_quotient = std::max(ev.max_partial_quotient, static_cast<double>(t));
        const cpp_int pn = t * pc + p_prev, qn = t * qc + q_prev;
        p_prev = pc;
        q_prev = qc;
        pc = pn;
        qc = qn;
        const cpp_int diff = abs(cpp_int(p) * qc - pc * q);  // |x - p/q| q^2 = |p q_c - p_c q| q_c / q
        ev.convergents.push_back({pc.str(), qc.str(), to_double(pc) / to_double(qc), to_double(diff) * to_double(qc) / static_cast<double>(q)});
        ev.depth_reached = k;
        const std::int64_t rem = a - t * b;
        if (rem == 0) {
            ev.terminated = true;
            return ev;
        }
        a = b;
        b = rem;
    }
    return ev;
}

IrrationalityEvidence irrationality_evidence(double x, int depth) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("continued fraction: need finite x > 0");
    if (depth < 1) throw DomainError("continued fraction: need depth >= 1");
    // Expand in extended precision and stop when the convergent reproduces x
    // to a few ulps; beyond that the digits only describe rounding.
    IrrationalityEvidence ev = expand<Real>(Real(x), depth, Real("1e-80"));
    for (std::size_t k = 0; k < ev.convergents.size(); ++k) {
        if (std::abs(ev.convergents[k].value - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x) {
            ev.convergents.resize(k + 1);
            ev.partial_quotients.resize(k + 1);
            ev.depth_reached = static_cast<int>(k);
            ev.terminated = true;
            ev.max_partial_quotient = 0.0;
            for (std::size_t j = 1; j <= k; ++j) ev.max_partial_quotient = std::max(ev.max_partial_quotient, std::stod(ev.partial_quotients[j]));
            break;
        }
    }
    return ev;
}

const char* to_string(SpectralWindow w) {
    switch (w) {
        case SpectralWindow::Hann: return "hann";
        case SpectralWindow::FlatTop: return "flat-top";
        case SpectralWindow::Rectangular: return "rectangular";
    }
    return "unknown";
}

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

std::vector<SpectrumPoint> quasi_spectrum(std::span<const double> samples, double dtau, SpectralWindow window, int pad) {
    const int n = static_cast<int>(samples.size());
    if (n < 8) throw DomainError("spectrum: need at least 8 samples");
    if (!(dtau > 0.0) || pad < 1) throw DomainError("spectrum: need dtau > 0 and pad >= 1");
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) {
        const double w = window == SpectralWindow::Hann ? hann(k, n) : window == SpectralWindow::FlatTop ? flat_top(k, n) : 1.0;
        x[k] = (samples[k] - mean) * w;
    }
    const int M = n * pad;
    const int bins = M / 2 + 1;
    std::vector<double> in(static_cast<std::size_t>(M), 0.0);
    std::copy(x.begin(), x.end(), in.begin());
    std::vector<fftw_complex> spec(static_cast<std::size_t>(bins));
    fftw_plan plan;
    {
        // The FFTW planner is not thread safe; execution is.
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(M, in.data(), spec.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    std::vector<SpectrumPoint> out(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b) {
        const auto& c = spec[static_cast<std::size_t>(b)];
        out[static_cast<std::size_t>(b)] = {static_cast<double>(b) / (M * dtau), c[0] * c[0] + c[1] * c[1]};
    }
    return out;
}

std::vector<double> sample_profile(const TubeModel& tube, double D, double tau0, double dtau, int n) {
    if (n < 1) throw DomainError("profile: need n >= 1");
    std::vector<double> g(static_cast<std::size_t>(n));
    const double e = tube.ambient_dim() - D;
    parallel_for(g.size(), [&](std::size_t k) {
        const double tau = tau0 + dtau * static_cast<double>(k);
        g[k] = tube(std::exp(-tau)) * std::exp(e * tau);
    });
    return g;
}

PeriodRecovery period_recover(std::span<const double> samples, double dtau, std::span<const double> candidates,
                              const PeriodOptions& opt) {
    if (candidates.empty()) throw DomainError("period recovery: no candidate periods");
    const double span = dtau * static_cast<double>(samples.size());
    const double T_max = *std::max_element(candidates.begin(), candidates.end());
    if (span < 5.0 * T_max * (1.0 - 1e-9)) throw DomainError("period recovery: span shorter than 5 max T_i");
    PeriodRecovery out;
    out.bin_width = 1.0 / span;
    for (double T : candidates) out.matches.push_back({T});

    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    const double rms = std::sqrt(var / static_cast<double>(samples.size()));
    if (rms <= 1e-12 * std::max(std::abs(mean), 1e-300)) {
        out.flat = true;
        return out;
    }

    const auto spec = quasi_spectrum(samples, dtau, opt.window, opt.pad);
    std::vector<double> powers;
    for (const auto& p : spec) powers.push_back(p.power);
    std::nth_element(powers.begin(), powers.begin() + static_cast<long>(powers.size() / 2), powers.end());
    const double floor = std::max(powers[powers.size() / 2], 1e-300);
    double pmax = 0.0;
    for (std::size_t b = 1; b < spec.size(); ++b) pmax = std::max(pmax, spec[b].power);
    const double cut = pmax * std::pow(10.0, -opt.peak_range_db / 10.0);
    std::vector<std::size_t> local;
    for (std::size_t b = 1; b + 1 < spec.size(); ++b) {
        if (spec[b].power >= cut && spec[b].power > spec[b - 1].power && spec[b].power >= spec[b + 1].power) local.push_back(b);
    }
    const double top_db = 10.0 * std::log10(pmax / floor);
    out.inconclusive = top_db < opt.min_peak_db;

    // Each period claims its own peak, closest pairs first, so a peak that
    // merges two fundamentals recovers only one of them.
    struct Pair {
        double off;
        std::size_t match;
        std::size_t bin;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < out.matches.size(); ++i) {
        auto& m = out.matches[i];
        const double f = 1.0 / m.period;
        m.offset_bins = INFINITY;
        for (auto b : local) {
            const double off = (spec[b].frequency - f) / out.bin_width;
            if (std::abs(off) < std::abs(m.offset_bins)) {
                m.offset_bins = off;
                m.peak_frequency = spec[b].frequency;
                m.peak_db = 10.0 * std::log10(spec[b].power / floor);
            }
            if (std::abs(off) <= opt.match_bins && 10.0 * std::log10(spec[b].power / floor) >= opt.min_peak_db) {
                pairs.push_back({off, i, b});
            }
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return std::abs(x.off) < std::abs(y.off); });
    std::vector<bool> bin_taken(spec.size(), false);
    for (const auto& pr : pairs) {
        auto& m = out.matches[pr.match];
        if (m.recovered || bin_taken[pr.bin]) continue;
        bin_taken[pr.bin] = true;
        m.recovered = true;
        m.offset_bins = pr.off;
        m.peak_frequency = spec[pr.bin].frequency;
        m.peak_db = 10.0 * std::log10(spec[pr.bin].power / floor);
    }
    for (auto b : local) {
        SpectralPeak pk{spec[b].frequency, 10.0 * std::log10(spec[b].power / floor), "spurious"};
        for (const auto& m : out.matches) {
            if (m.recovered && std::abs(m.peak_frequency - pk.frequency) < 1e-15) pk.role = "fundamental";
        }
        if (pk.role == "spurious") {
            for (double T : candidates) {
                for (int h = 2; h <= opt.max_harmonic; ++h) {
                    if (std::abs(pk.frequency - h / T) <= opt.match_bins * out.bin_width) pk.role = "harmonic";
                }
            }
        }
        if (pk.role == "spurious") ++out.spurious;
        out.peaks.push_back(pk);
    }
    out.all_recovered = !out.inconclusive &&
                        std::all_of(out.matches.begin(), out.matches.end(), [](const PeriodMatch& m) { return m.recovered; });
    return out;
}

FractalSet grill_quasi(const QuasiperiodicSet& q, int d, double L) {
    if (d < 1) throw DomainError("quasiperiodic grill: need d >= 1");
    if (!(L > 0.0)) throw DomainError("quasiperiodic grill: need L > 0");
    return make_grill(q.set, d, L);
}

}  // namespace fzeta
