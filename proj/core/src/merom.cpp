#include "fractal_zeta/merom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fzeta {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx cpow(double base, cplx s) { return std::exp(s * std::log(base)); }

double cantor_c(int m, double a) { return (1.0 - m * a) / (2.0 * (m - 1)); }

bool on_lattice(const PoleLattice& L, cplx s, double tol) {
    if (std::abs(s.real() - L.base.real()) > tol) return false;
    const double k = (s.imag() - L.base.imag()) / L.period;
    return std::abs(k - std::round(k)) * L.period <= tol;
}

// Evaluates f at s, stepping around a removable point at `hole`.
cplx around(const std::function<cplx(cplx)>& f, cplx s, cplx hole) {
    if (std::abs(s - hole) > 1e-7) return f(s);
    const double h = 1e-4;
    // Average over four symmetric points cancels the first three Taylor terms.
    return 0.25 * (f(hole + h) + f(hole - h) + f(hole + cplx(0, h)) + f(hole - cplx(0, h)));
}

void check_removable(MeromorphicZeta& z, cplx point, double radius) {
    const ResidueFit r = residue_fit(z.eval, point, radius, ResidueMethod::Contour);
    if (std::abs(r.residue) < 1e-10) {
        z.removable.push_back(point);
    } else {
        z.dims.isolated.push_back({point, 1, true});
    }
}

// Coefficients of (h(x))^s where h(x) = (1 - (1 + x)^-a) / (a x).
std::vector<double> astring_series(double a, double s, int n_max) {
    std::vector<double> h(static_cast<std::size_t>(n_max) + 1), L(h.size(), 0.0), E(h.size(), 0.0);
    for (int k = 0; k <= n_max; ++k) {
        h[k] = ((k % 2) ? -1.0 : 1.0) * std::exp(std::lgamma(a + k + 1.0) - std::lgamma(k + 2.0) - std::lgamma(a + 1.0));
    }
    for (int k = 1; k <= n_max; ++k) {
        double acc = k * h[k];
        for (int j = 1; j < k; ++j) acc -= j * L[j] * h[k - j];
        L[k] = acc / k;
    }
    E[0] = 1.0;
    for (int n = 1; n <= n_max; ++n) {
        double acc = 0.0;
        for (int j = 1; j <= n; ++j) acc += j * s * L[j] * E[n - j];
        E[n] = acc / n;
    }
    return E;
}

}  // namespace

PoleLattice PoleLattice::canonical() const {
    PoleLattice out = *this;
    if (period > 0.0) {
        double im = base.imag() - period * std::round(base.imag() / period);
        if (im >= 0.5 * period) im -= period;
        out.base = cplx(base.real(), im);
    }
    return out;
}

std::vector<PoleLattice> ComplexDimensions::principal_lattices(double tol) const {
    std::vector<PoleLattice> out;
    for (const auto& L : lattices) {
        if (std::abs(L.base.real() - abscissa) <= tol) out.push_back(L.canonical());
    }
    return out;
}

std::vector<IsolatedPole> ComplexDimensions::principal_isolated(double tol) const {
    std::vector<IsolatedPole> out;
    for (const auto& p : isolated) {
        if (std::abs(p.at.real() - abscissa) <= tol) out.push_back(p);
    }
    return out;
}

std::vector<IsolatedPole> ComplexDimensions::enumerate(double im_max) const {
    std::vector<IsolatedPole> out;
    auto add = [&](cplx at, int mult, bool verified, bool override_existing) {
        for (auto& p : out) {
            if (std::abs(p.at - at) <= 1e-9 * std::max(1.0, std::abs(at))) {
                if (override_existing) {
                    p.multiplicity = mult;
                    p.verified = verified;
                }
                return;
            }
        }
        out.push_back({at, mult, verified});
    };
    for (const auto& L0 : lattices) {
        const PoleLattice L = L0.canonical();
        const long kmax = static_cast<long>(std::floor((im_max + std::abs(L.base.imag())) / L.period)) + 1;
        for (long k = -kmax; k <= kmax; ++k) {
            const cplx at = L.base + cplx(0.0, L.period * static_cast<double>(k));
            if (std::abs(at.imag()) <= im_max + 1e-12) add(at, L.multiplicity, true, false);
        }
    }
    for (const auto& p : isolated) {
        if (std::abs(p.at.imag()) <= im_max + 1e-12) add(p.at, p.multiplicity, p.verified, true);
    }
    std::sort(out.begin(), out.end(), [](const IsolatedPole& x, const IsolatedPole& y) {
        if (x.at.real() != y.at.real()) return x.at.real() > y.at.real();
        return x.at.imag() < y.at.imag();
    });
    return out;
}

bool ComplexDimensions::contains(cplx s, double tol) const {
    for (const auto& p : isolated) {
        if (std::abs(p.at - s) <= tol) return true;
    }
    for (const auto& L : lattices) {
        if (on_lattice(L, s, tol)) return true;
    }
    return false;
}

ComplexDimensions ComplexDimensions::shifted(double d) const {
    ComplexDimensions out = *this;
    for (auto& L : out.lattices) L.base += d;
    for (auto& p : out.isolated) p.at += d;
    out.abscissa += d;
    return out;
}

const char* to_string(KernelKind k) {
    switch (k) {
        case KernelKind::CantorForm: return "cantor";
        case KernelKind::SphereForm: return "sphere";
        case KernelKind::StringDictionary: return "string-dictionary";
        case KernelKind::RationalForm: return "rational";
        case KernelKind::GrillForm: return "grill";
        case KernelKind::UnionForm: return "union";
        case KernelKind::ScaledForm: return "scaled";
    }
    return "unknown";
}

const char* to_string(ZetaKind k) {
    switch (k) {
        case ZetaKind::Distance: return "distance";
        case ZetaKind::Tube: return "tube";
        case ZetaKind::Geometric: return "geometric";
        case ZetaKind::Other: return "other";
    }
    return "unknown";
}

cplx MeromorphicZeta::operator()(cplx s) const {
    if (!eval) throw DomainError("zeta model '" + name + "' has no closed-form evaluator");
    return eval(s);
}

std::optional<cplx> MeromorphicZeta::residue_at(cplx s) const {
    if (!residue) return std::nullopt;
    return residue(s);
}

MeromorphicZeta cantor_model(int m, double a, double delta) {
    make_cantor(m, a);
    const double c = cantor_c(m, a);
    if (!(delta >= c * (1.0 - 1e-12))) throw DomainError("cantor model: closed form needs delta >= c");
    const double D = cantor_dimension(m, a);
    const double T = std::log(1.0 / a);
    MeromorphicZeta z;
    z.name = "cantor(" + std::to_string(m) + "," + std::to_string(a) + ") distance zeta";
    z.kernel = KernelKind::CantorForm;
    z.kind = ZetaKind::Distance;
    z.ambient_dim = 1;
    z.delta = delta;
    z.abscissa = D;
    z.cantor_m = m;
    z.cantor_a = a;
    const std::function<cplx(cplx)> raw = [=](cplx s) {
        return cpow(c, s - 1.0) * (1.0 - m * a) / (s * (1.0 - static_cast<double>(m) * cpow(a, s))) +
               2.0 * cpow(delta, s) / s;
    };
    z.eval = [raw](cplx s) { return around(raw, s, 0.0); };
    z.dims.abscissa = D;
    z.dims.lattices.push_back(PoleLattice{D, kTwoPi / T, 1});
    const PoleLattice lattice = z.dims.lattices.front();
    z.residue = [=](cplx s) -> std::optional<cplx> {
        if (!on_lattice(lattice, s, 1e-9)) return std::nullopt;
        return cpow(c, s - 1.0) * (1.0 - m * a) / (s * T);
    };
    check_removable(z, 0.0, 0.1);
    return z;
}

MeromorphicZeta cantor_tube_model(int m, double a, double delta) {
    const MeromorphicZeta dist = cantor_model(m, a, delta);
    const double V = tube_gapsum(make_cantor(m, a), delta);
    MeromorphicZeta z = dist;
    z.name = "cantor(" + std::to_string(m) + "," + std::to_string(a) + ") tube zeta";
    z.kind = ZetaKind::Tube;
    z.removable.clear();
    const auto zd = dist.eval;
    const std::function<cplx(cplx)> raw = [=](cplx s) { return (zd(s) - cpow(delta, s - 1.0) * V) / (1.0 - s); };
    z.eval = [raw](cplx s) { return around(raw, s, 1.0); };
    const auto rd = dist.residue;
    z.residue = [rd](cplx s) -> std::optional<cplx> {
        const auto r = rd(s);
        if (!r) return std::nullopt;
        return *r / (1.0 - s);
    };
    check_removable(z, 0.0, 0.1);
    return z;
}

MeromorphicZeta sphere_model(int N, double delta) {
    if (N < 1) throw DomainError("sphere model: need N >= 1");
    if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("sphere model: need 0 < delta <= 1");
    const double w = unit_ball_volume(N);
    MeromorphicZeta z;
    z.name = "sphere(" + std::to_string(N) + ") tube zeta";
    z.kernel = KernelKind::SphereForm;
    z.kind = ZetaKind::Tube;
    z.ambient_dim = N;
    z.delta = delta;
    z.abscissa = N - 1.0;
    z.dims.abscissa = N - 1.0;
    std::vector<double> binom(static_cast<std::size_t>(N) + 1, 1.0);
    for (int k = 1; k <= N; ++k) binom[k] = binom[k - 1] * (N - k + 1) / k;
    for (int k = 1; k <= N; k += 2) z.dims.isolated.push_back({cplx(N - k, 0.0), 1, true});
    z.eval = [=](cplx s) {
        cplx acc = 0.0;
        for (int k = 1; k <= N; k += 2) acc += 2.0 * binom[k] * cpow(delta, s - static_cast<double>(N - k)) / (s - static_cast<double>(N - k));
        return w * acc;
    };
    z.residue = [=](cplx s) -> std::optional<cplx> {
        for (int k = 1; k <= N; k += 2) {
            if (std::abs(s - cplx(N - k, 0.0)) < 1e-9) return 2.0 * w * binom[k];
        }
        return std::nullopt;
    };
    return z;
}

MeromorphicZeta sphere_distance_model(int N, double delta) {
    MeromorphicZeta tube = sphere_model(N, delta);
    const double V = tube_sphere(N, delta).value;
    MeromorphicZeta z = tube;
    z.name = "sphere(" + std::to_string(N) + ") distance zeta";
    z.kind = ZetaKind::Distance;
    const auto te = tube.eval;
    z.eval = [=](cplx s) { return cpow(delta, s - static_cast<double>(N)) * V + (static_cast<double>(N) - s) * te(s); };
    const auto tr = tube.residue;
    z.residue = [=](cplx s) -> std::optional<cplx> {
        const auto r = tr(s);
        if (!r) return std::nullopt;
        return (static_cast<double>(N) - s) * *r;
    };
    return z;
}

MeromorphicZeta geometric_string_zeta(double first, double ratio) {
    LengthSequence::geometric(first, ratio);  // validates
    const double T = std::log(1.0 / ratio);
    MeromorphicZeta z;
    z.name = "geometric string zeta";
    z.kernel = KernelKind::RationalForm;
    z.kind = ZetaKind::Geometric;
    z.abscissa = 0.0;
    z.dims.abscissa = 0.0;
    z.dims.lattices.push_back({0.0, kTwoPi / T, 1});
    z.eval = [=](cplx s) { return cpow(first, s) / (1.0 - cpow(ratio, s)); };
    const PoleLattice L = z.dims.lattices.front();
    z.residue = [=](cplx s) -> std::optional<cplx> {
        if (!on_lattice(L, s, 1e-9)) return std::nullopt;
        return cpow(first, s) / T;
    };
    z.order_at_zero = 1;
    return z;
}

MeromorphicZeta cantor_string_zeta(int m, double a) {
    make_cantor(m, a);
    const double g = cantor_gap_ratio(m, a);
    const double D = cantor_dimension(m, a);
    const double T = std::log(1.0 / a);
    MeromorphicZeta z;
    z.name = "cantor string zeta";
    z.kernel = KernelKind::RationalForm;
    z.kind = ZetaKind::Geometric;
    z.abscissa = D;
    z.dims.abscissa = D;
    z.dims.lattices.push_back({D, kTwoPi / T, 1});
    z.eval = [=](cplx s) { return (m - 1.0) * cpow(g, s) / (1.0 - static_cast<double>(m) * cpow(a, s)); };
    const PoleLattice L = z.dims.lattices.front();
    z.residue = [=](cplx s) -> std::optional<cplx> {
        if (!on_lattice(L, s, 1e-9)) return std::nullopt;
        return (m - 1.0) * cpow(g, s) / T;
    };
    z.value_at_zero = (m - 1.0) / (1.0 - m);
    z.cantor_m = m;
    z.cantor_a = a;
    return z;
}

MeromorphicZeta astring_zeta(double a, int n_max) {
    const LengthSequence L = LengthSequence::power_law(a);
    const double rho = 1.0 / (1.0 + a);
    MeromorphicZeta z;
    z.name = "a-string zeta";
    z.kernel = KernelKind::RationalForm;
    z.kind = ZetaKind::Geometric;
    z.abscissa = rho;
    z.dims.abscissa = rho;
    z.dims.truncated = true;
    std::vector<std::pair<double, double>> table;  // (pole, residue)
    for (int n = 0; n <= n_max; ++n) {
        if (n == 1) continue;  // s = 0: b_1(0) = 0, the pole cancels
        const double sn = rho * (1.0 - n);
        const double bn = astring_series(a, sn, n)[static_cast<std::size_t>(n)];
        if (std::abs(bn) < 1e-13) continue;
        table.emplace_back(sn, rho * std::pow(a, sn) * bn);
        z.dims.isolated.push_back({cplx(sn, 0.0), 1, true});
    }
    z.eval = [L](cplx s) {
        const ZetaValue v = geometric_zeta(L, s);
        if (!v.ok()) throw DomainError("a-string zeta: numerical evaluation needs Re s > 1/(1+a)");
        return v.value;
    };
    z.residue = [table](cplx s) -> std::optional<cplx> {
        for (const auto& [p, r] : table) {
            if (std::abs(s - p) < 1e-9) return cplx(r, 0.0);
        }
        return std::nullopt;
    };
    z.value_at_zero = -1.0;
    return z;
}

MeromorphicZeta string_dictionary(const MeromorphicZeta& zeta_L, double first_length, double delta) {
    if (zeta_L.kind != ZetaKind::Geometric) throw DomainError("string dictionary: need a geometric zeta");
    if (!(delta >= 0.5 * first_length * (1.0 - 1e-12))) throw DomainError("string dictionary: need delta >= l_1 / 2");
    MeromorphicZeta z;
    z.name = "distance zeta of " + zeta_L.name;
    z.kernel = KernelKind::StringDictionary;
    z.kind = ZetaKind::Distance;
    z.delta = delta;
    z.abscissa = zeta_L.abscissa;
    z.base = std::make_shared<MeromorphicZeta>(zeta_L);
    z.dims = zeta_L.dims;
    z.dims.isolated.erase(std::remove_if(z.dims.isolated.begin(), z.dims.isolated.end(),
                                         [](const IsolatedPole& p) { return std::abs(p.at) < 1e-12; }),
                          z.dims.isolated.end());
    // s = 0: the factor 1/s raises the order of any pole of zeta_L there, and
    // otherwise the pole cancels exactly when zeta_L(0) = -1.
    std::optional<cplx> res0;
    if (zeta_L.order_at_zero > 0) {
        z.dims.isolated.push_back({0.0, zeta_L.order_at_zero + 1, true});
    } else if (zeta_L.value_at_zero) {
        res0 = 2.0 * *zeta_L.value_at_zero + 2.0;
        if (std::abs(*res0) < 1e-12) z.removable.push_back(0.0);
        else z.dims.isolated.push_back({0.0, 1, true});
    } else {
        z.dims.isolated.push_back({0.0, 1, false});
    }
    if (zeta_L.eval) {
        const auto e = zeta_L.eval;
        z.eval = [=](cplx s) { return cpow(2.0, 1.0 - s) * e(s) / s + 2.0 * cpow(delta, s) / s; };
    }
    const auto r = zeta_L.residue;
    const int order0 = zeta_L.order_at_zero;
    z.residue = [=](cplx s) -> std::optional<cplx> {
        if (std::abs(s) < 1e-12) {
            if (order0 > 0) return std::nullopt;
            return res0;
        }
        if (!r) return std::nullopt;
        const auto rl = r(s);
        if (!rl) return std::nullopt;
        return cpow(2.0, 1.0 - s) * *rl / s;
    };
    return z;
}

MeromorphicZeta exponential_kernel_model(int m, double a) {
    if (m < 1 || !(a > 0.0 && a < 1.0)) throw DomainError("exponential kernel: need m >= 1 and 0 < a < 1");
    const double D = std::log(static_cast<double>(m)) / std::log(1.0 / a);
    const double T = std::log(1.0 / a);
    MeromorphicZeta z;
    z.name = "1/(1 - m a^s)";
    z.kernel = KernelKind::RationalForm;
    z.abscissa = D;
    z.dims.abscissa = D;
    z.dims.lattices.push_back({D, kTwoPi / T, 1});
    z.eval = [=](cplx s) { return 1.0 / (1.0 - static_cast<double>(m) * cpow(a, s)); };
    const PoleLattice L = z.dims.lattices.front();
    z.residue = [=](cplx s) -> std::optional<cplx> {
        if (!on_lattice(L, s, 1e-9)) return std::nullopt;
        return cplx(1.0 / T, 0.0);
    };
    return z;
}

MeromorphicZeta union_model(const std::vector<std::pair<int, double>>& components, double delta) {
    if (components.empty()) throw DomainError("union model: no components");
    if (delta > 0.5) throw DomainError("union model: delta must not exceed half the unit separation");
    std::vector<MeromorphicZeta> parts;
    for (const auto& [m, a] : components) parts.push_back(cantor_model(m, a, delta));
    const double D = parts.front().abscissa;
    for (const auto& p : parts) {
        if (std::abs(p.abscissa - D) > 1e-12) throw DomainError("union model: components must share D");
    }
    MeromorphicZeta z;
    z.name = "union of cantor components";
    z.kernel = KernelKind::UnionForm;
    z.kind = ZetaKind::Distance;
    z.delta = delta;
    z.abscissa = D;
    z.dims.abscissa = D;
    for (const auto& p : parts) {
        const PoleLattice L = p.dims.lattices.front();
        const bool dup = std::any_of(z.dims.lattices.begin(), z.dims.lattices.end(),
                                     [&](const PoleLattice& x) { return std::abs(x.period - L.period) < 1e-12 * L.period; });
        if (!dup) z.dims.lattices.push_back(L);
    }
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
    z.removable = {0.0};
    return z;
}

MeromorphicZeta grill_shift(const MeromorphicZeta& model, int d) {
    if (d < 0) throw DomainError("grill shift: need d >= 0");
    if (d == 0) return model;
    if (model.kernel == KernelKind::GrillForm && model.base) return grill_shift(*model.base, model.grill_d + d);
    if (!model.dims_known) throw DomainError("grill shift: principal poles of the base are unknown");
    MeromorphicZeta z;
    z.name = "grill(d=" + std::to_string(d) + ") of " + model.name;
    z.kernel = KernelKind::GrillForm;
    z.kind = model.kind;
    z.ambient_dim = model.ambient_dim + d;
    z.delta = model.delta;
    z.abscissa = model.abscissa + d;
    z.base = std::make_shared<MeromorphicZeta>(model);
    z.grill_d = d;
    z.correction_abscissa = z.abscissa - 1.0;
    const double D = model.abscissa;
    if (model.kernel == KernelKind::CantorForm && model.kind == ZetaKind::Distance) {
        // Each binomial term k contributes a copy of the lattice at D + k; the
        // integer candidates come from codimension terms without closed forms.
        const PoleLattice L = model.dims.lattices.front();
        z.dims.abscissa = D + d;
        for (int k = d; k >= 0; --k) z.dims.lattices.push_back({L.base + static_cast<double>(k), L.period, 1});
        for (int k = d; k >= 0; --k) z.dims.isolated.push_back({cplx(k, 0.0), 1, false});
    } else {
        z.dims.abscissa = D + d;
        for (const auto& L : model.dims.principal_lattices()) z.dims.lattices.push_back({L.base + static_cast<double>(d), L.period, L.multiplicity});
        for (const auto& p : model.dims.principal_isolated()) z.dims.isolated.push_back({p.at + static_cast<double>(d), p.multiplicity, p.verified});
        z.dims.truncated = true;
    }
    const auto base_residue = model.residue;
    const MeromorphicZeta shifted_principal = [&] {
        MeromorphicZeta tmp;
        tmp.dims.abscissa = D + d;
        for (const auto& L : model.dims.principal_lattices()) tmp.dims.lattices.push_back({L.base + static_cast<double>(d), L.period, 1});
        for (const auto& p : model.dims.principal_isolated()) tmp.dims.isolated.push_back({p.at + static_cast<double>(d), 1, true});
        return tmp;
    }();
    const ComplexDimensions principal = shifted_principal.dims;
    z.residue = [=](cplx s) -> std::optional<cplx> {
        if (!base_residue || !principal.contains(s)) return std::nullopt;
        return base_residue(s - static_cast<double>(d));
    };
    return z;
}

MeromorphicZeta scaled_model(const MeromorphicZeta& model, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("scaled model: need lambda > 0");
    MeromorphicZeta z = model;
    z.name = "scaled " + model.name;
    z.kernel = KernelKind::ScaledForm;
    z.delta = model.delta * lambda;
    z.base = std::make_shared<MeromorphicZeta>(model);
    if (model.eval) {
        const auto e = model.eval;
        z.eval = [=](cplx s) { return cpow(lambda, s) * e(s); };
    }
    if (model.residue) {
        const auto r = model.residue;
        z.residue = [=](cplx s) -> std::optional<cplx> {
            const auto v = r(s);
            if (!v) return std::nullopt;
            return cpow(lambda, s) * *v;
        };
    }
    return z;
}

std::optional<MeromorphicZeta> model_for(const FractalSet& set, double delta) {
    const auto& v = set.variant();
    try {
        if (auto* c = std::get_if<GeneralizedCantor>(&v)) return cantor_model(c->m, c->a, delta);
        if (auto* s = std::get_if<Sphere>(&v)) {
            if (delta <= 1.0) return sphere_distance_model(s->N, delta);
            return std::nullopt;
        }
        if (auto* s = std::get_if<AString>(&v)) {
            return string_dictionary(astring_zeta(s->a), 1.0 - std::pow(2.0, -s->a), delta);
        }
        if (auto* s = std::get_if<FractalString>(&v)) {
            const auto& L = s->lengths;
            if (L.kind() == LengthSequence::Kind::Geometric) return string_dictionary(geometric_string_zeta(L.first(), L.ratio()), L.first(), delta);
            if (L.kind() == LengthSequence::Kind::PowerLaw) return string_dictionary(astring_zeta(L.exponent()), L.length(1.0), delta);
            return std::nullopt;
        }
        if (auto* g = std::get_if<Grill>(&v)) {
            if (g->side != 1.0) return std::nullopt;
            auto base = model_for(g->base, delta);
            if (!base) return std::nullopt;
            return grill_shift(*base, g->d);
        }
        if (auto* s = std::get_if<Scaled>(&v)) {
            auto base = model_for(s->base, delta / s->lambda);
            if (!base) return std::nullopt;
            return scaled_model(*base, s->lambda);
        }
        if (auto* u = std::get_if<DisjointUnion>(&v)) {
            std::vector<std::pair<int, double>> comps;
            std::vector<double> lo;
            for (const auto& [comp, offset] : u->components) {
                auto* c = std::get_if<GeneralizedCantor>(&comp.variant());
                if (!c) return std::nullopt;
                comps.emplace_back(c->m, c->a);
                lo.push_back(offset);
            }
            std::sort(lo.begin(), lo.end());
            for (std::size_t i = 1; i < lo.size(); ++i) {
                if (lo[i] - lo[i - 1] - 1.0 < 2.0 * delta - 1e-12) return std::nullopt;
            }
            if (lo.size() > 1 && delta > 0.5) return std::nullopt;
            return union_model(comps, std::min(delta, 0.5));
        }
    } catch (const DomainError&) {
        return std::nullopt;
    }
    return std::nullopt;
}

ResidueFit residue_fit(const std::function<cplx(cplx)>& f, cplx pole, double radius, ResidueMethod method) {
    if (!(radius > 0.0)) throw DomainError("residue fit: need radius > 0");
    if (method == ResidueMethod::Contour) {
        const int n = 256;
        std::vector<cplx> terms(n);
        for (int j = 0; j < n; ++j) {
            const cplx e = std::polar(1.0, kTwoPi * j / n);
            terms[j] = f(pole + radius * e) * radius * e;
        }
        cplx full = 0.0, half = 0.0;
        for (int j = 0; j < n; ++j) {
            full += terms[j];
            if (j % 2 == 0) half += terms[j];
        }
        full /= static_cast<double>(n);
        half /= static_cast<double>(n / 2);
        return {full, std::abs(full - half)};
    }
    // Neville extrapolation of g(h) = h f(pole + h) to h = 0.
    const int n = 8;
    std::vector<double> h(n);
    std::vector<cplx> T(n);
    for (int j = 0; j < n; ++j) {
        h[j] = radius / std::pow(2.0, j);
        T[j] = h[j] * f(pole + h[j]);
    }
    cplx prev_diag = T[0];
    double err = INFINITY;
    std::vector<cplx> P = T;
    for (int k = 1; k < n; ++k) {
        for (int j = n - 1; j >= k; --j) {
            P[j] = (h[j - k] * P[j] - h[j] * P[j - 1]) / (h[j - k] - h[j]);
        }
        err = std::abs(P[k] - prev_diag);
        prev_diag = P[k];
    }
    return {P[n - 1], err};
}

std::function<cplx(cplx)> as_function(const std::function<ZetaValue(cplx)>& f) {
    return [f](cplx s) {
        const ZetaValue v = f(s);
        if (!v.ok()) throw ConvergenceError("zeta evaluation did not converge", v.error);
        return v.value;
    };
}

ResidueContentReport residue_content_report(const MeromorphicZeta& model, const ContentEstimate& contents,
                                            double rel_tol) {
    const double D = model.abscissa;
    const int N = model.ambient_dim;
    const auto res = model.residue_at(D);
    if (!res) throw DomainError("residue report: model has no residue rule at D");
    ResidueContentReport r{};
    r.residue = res->real();
    r.lower = (N - D) * contents.lower;
    r.upper = (N - D) * contents.upper;
    r.spread = (N - D) * contents.residual_spread;
    r.margin = std::min(r.residue - r.lower, r.upper - r.residue);
    r.within = r.residue >= r.lower - r.spread && r.residue <= r.upper + r.spread;
    r.strict = r.margin > 0.0 && r.margin > 3.0 * r.spread;
    r.measurable = (r.upper - r.lower) <= std::max(2.0 * r.spread, rel_tol * r.upper);
    r.equality = r.measurable && std::abs(r.residue - 0.5 * (r.lower + r.upper)) <=
                                     std::max(rel_tol * std::abs(r.residue), r.upper - r.lower + r.spread);
    r.tube_relation = false;
    if (model.kernel == KernelKind::CantorForm && model.kind == ZetaKind::Distance) {
        const MeromorphicZeta tube = cantor_tube_model(model.cantor_m, model.cantor_a, model.delta);
        const ResidueFit fit = residue_fit(tube.eval, D, 0.1, ResidueMethod::Contour);
        r.tube_residue = fit.residue.real();
    } else if (model.kernel == KernelKind::SphereForm && model.kind == ZetaKind::Distance) {
        const MeromorphicZeta tube = sphere_model(N, model.delta);
        const ResidueFit fit = residue_fit(tube.eval, D, 0.5, ResidueMethod::Contour);
        r.tube_residue = fit.residue.real();
    }
    if (r.tube_residue) {
        r.tube_relation = std::abs(*r.tube_residue - r.residue / (N - D)) <= 1e-9 * std::abs(r.residue);
    }
    return r;
}

bool equivalent(const MeromorphicZeta& a, const MeromorphicZeta& b, double tol) {
    if (!a.dims_known || !b.dims_known) throw DomainError("equivalence: pole data unavailable");
    if (std::abs(a.abscissa - b.abscissa) > tol) return false;
    auto la = a.dims.principal_lattices(tol);
    auto lb = b.dims.principal_lattices(tol);
    if (la.size() != lb.size()) return false;
    std::vector<bool> used(lb.size(), false);
    for (const auto& x : la) {
        bool found = false;
        for (std::size_t j = 0; j < lb.size() && !found; ++j) {
            if (used[j]) continue;
            const auto& y = lb[j];
            if (std::abs(x.period - y.period) <= tol * std::max(1.0, x.period) && std::abs(x.base - y.base) <= tol &&
                x.multiplicity == y.multiplicity) {
                used[j] = found = true;
            }
        }
        if (!found) return false;
    }
    auto ia = a.dims.principal_isolated(tol);
    auto ib = b.dims.principal_isolated(tol);
    if (ia.size() != ib.size()) return false;
    std::vector<bool> used_i(ib.size(), false);
    for (const auto& x : ia) {
        bool found = false;
        for (std::size_t j = 0; j < ib.size() && !found; ++j) {
            if (!used_i[j] && std::abs(x.at - ib[j].at) <= tol && x.multiplicity == ib[j].multiplicity) used_i[j] = found = true;
        }
        if (!found) return false;
    }
    return true;
}

const char* to_string(Weak w) {
    switch (w) {
        case Weak::Equivalent: return "equivalent";
        case Weak::NotEquivalent: return "not-equivalent";
        case Weak::Indeterminate: return "indeterminate";
    }
    return "unknown";
}

WeakEquivalence weakly_equivalent(const RealEvaluator& f, const RealEvaluator& g, const RealEvaluator& h,
                                  std::span<const double> grid, const ProbeOptions& opt) {
    WeakEquivalence out{};
    out.f_bracket = abscissa_probe(f, grid, opt);
    out.g_bracket = abscissa_probe(g, grid, opt);
    out.h_bracket = abscissa_probe(h, grid, opt);
    const double top = *std::max_element(grid.begin(), grid.end());
    const ZetaValue fv = f(top), gv = g(top), hv = h(top);
    out.consistency = std::abs(fv.value - gv.value - hv.value) / std::max({std::abs(fv.value), std::abs(gv.value), 1e-300});
    if (out.h_bracket.hi < out.g_bracket.lo) out.verdict = Weak::Equivalent;
    else if (out.h_bracket.lo >= out.g_bracket.hi) out.verdict = Weak::NotEquivalent;
    else out.verdict = Weak::Indeterminate;
    return out;
}

}  // namespace fzeta
