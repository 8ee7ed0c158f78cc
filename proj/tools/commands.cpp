#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fractal_zeta/dti.hpp"
#include "fractal_zeta/merom.hpp"
#include "fractal_zeta/quasi.hpp"
#include "fractal_zeta/set_spec.hpp"
#include "fractal_zeta/sets.hpp"
#include "fractal_zeta/tubes.hpp"
#include "fractal_zeta/zeta.hpp"

namespace fzcli {

using fzeta::cplx;
using fzeta::FractalSet;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

FractalSet load_set(const Common& c) {
    if (c.set.empty()) throw UsageError("--set is required");
    std::error_code ec;
    if (std::filesystem::is_regular_file(c.set, ec)) return fzeta::load_set_spec(c.set);
    return fzeta::parse_set_spec(c.set, std::filesystem::current_path());
}

// Largest delta that keeps the closed forms valid for the family.
double default_delta(const FractalSet& set) {
    const auto& v = set.variant();
    if (std::get_if<fzeta::Sphere>(&v)) return 0.5;
    if (auto* g = std::get_if<fzeta::Grill>(&v)) return default_delta(g->base);
    if (auto* s = std::get_if<fzeta::Scaled>(&v)) return s->lambda * default_delta(s->base);
    if (auto* u = std::get_if<fzeta::DisjointUnion>(&v)) {
        std::vector<fzeta::Interval> iv;
        for (const auto& [comp, offset] : u->components) {
            const auto& h = comp.hull().sides[0];
            iv.push_back({h.lo + offset, h.hi + offset});
        }
        std::sort(iv.begin(), iv.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
        double sep = INFINITY;
        for (std::size_t i = 1; i < iv.size(); ++i) sep = std::min(sep, iv[i].lo - iv[i - 1].hi);
        double d = std::min(1.0, 0.5 * sep);
        for (const auto& [comp, offset] : u->components) d = std::min(d, default_delta(comp));
        return d;
    }
    return 1.0;
}

double delta_for(const Common& c, const FractalSet& set) {
    double d = 0.0;
    try {
        d = c.delta.empty() ? default_delta(set) : fzeta::parse_number(c.delta);
    } catch (const fzeta::ParseError& e) {
        throw UsageError(std::string("--delta: ") + e.what());
    }
    if (!(d > 0.0)) throw UsageError("--delta must be positive");
    return d;
}

void write_out(const std::string& text, const Common& c) {
    if (c.output.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(c.output, std::ios::binary);
    if (!out) throw UsageError("cannot open output file " + c.output);
    out << text;
}

void emit(const Document& doc, const Common& c) { write_out(render(doc, parse_format(c.format)), c); }

std::string hull_text(const FractalSet& set) {
    std::string s;
    for (const auto& side : set.hull().sides) {
        if (!s.empty()) s += " x ";
        char buf[96];
        std::snprintf(buf, sizeof buf, "[%.10g, %.10g]", side.lo, side.hi);
        s += buf;
    }
    return s;
}

double rel(cplx x, cplx y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); }

std::vector<cplx> probe_points(double D) { return {cplx(D + 0.17), cplx(D + 0.27), cplx(D + 0.07, 2.0)}; }

std::vector<std::int64_t> parse_moduli(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size()) throw std::invalid_argument("");
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("--moduli: '" + item + "' is not an integer");
        }
    }
    if (out.empty()) throw UsageError("--moduli: empty list");
    return out;
}

// a:b:n, n >= 1 evenly spaced points; a single value means n = 1.
struct Range {
    double lo, hi;
    int n;
    double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

Range parse_range(const std::string& text, const char* flag) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    try {
        if (parts.size() == 1) return {fzeta::parse_number(parts[0]), fzeta::parse_number(parts[0]), 1};
        if (parts.size() == 3) {
            std::size_t used = 0;
            const int n = std::stoi(parts[2], &used);
            if (used != parts[2].size() || n < 1) throw std::invalid_argument("");
            return {fzeta::parse_number(parts[0]), fzeta::parse_number(parts[1]), n};
        }
    } catch (const std::exception&) {
    }
    throw UsageError(std::string(flag) + ": expected a:b:n with n >= 1, got '" + text + "'");
}

fzeta::SpectralWindow parse_window(const std::string& w) {
    if (w == "hann") return fzeta::SpectralWindow::Hann;
    if (w == "flat-top") return fzeta::SpectralWindow::FlatTop;
    if (w == "rectangular") return fzeta::SpectralWindow::Rectangular;
    throw UsageError("--window: expected hann, flat-top or rectangular");
}

bool is_astring(const FractalSet& set) {
    if (std::get_if<fzeta::AString>(&set.variant())) return true;
    auto* s = std::get_if<fzeta::FractalString>(&set.variant());
    return s && s->lengths.kind() == fzeta::LengthSequence::Kind::PowerLaw;
}

double astring_exponent(const FractalSet& set) {
    if (auto* a = std::get_if<fzeta::AString>(&set.variant())) return a->a;
    return std::get<fzeta::FractalString>(set.variant()).lengths.exponent();
}

// ---- check suites ---------------------------------------------------------

struct CheckRow {
    std::string name;
    double measured;
    double tolerance;
    bool pass;
};

std::vector<CheckRow> suite_functional_eq(const FractalSet& set, double delta) {
    fzeta::ZetaEvalConfig cfg;
    cfg.delta = delta;
    std::vector<CheckRow> rows;
    std::optional<fzeta::MeromorphicZeta> model;
    if (!set.one_dimensional()) {
        model = fzeta::model_for(set, delta);
        if (!model || !model->eval) throw fzeta::DomainError("functional-eq: needs a one-dimensional set or a closed form");
    }
    for (cplx s : probe_points(set.dimension())) {
        double r = 0.0;
        if (set.one_dimensional()) {
            r = fzeta::functional_equation_residual(set, s, cfg);
        } else {
            const auto z = fzeta::distance_zeta(set, s, cfg);
            if (!z.ok()) throw fzeta::ConvergenceError("functional-eq: tube zeta did not converge", z.error);
            r = rel(z.value, (*model)(s));
        }
        char name[96];
        std::snprintf(name, sizeof name, "functional equation at s=%.4g%+.4gi", s.real(), s.imag());
        rows.push_back({name, r, 1e-8, r < 1e-8});
    }
    return rows;
}

std::vector<CheckRow> suite_scaling(const FractalSet& set, double delta) {
    fzeta::ZetaEvalConfig cfg;
    cfg.delta = delta;
    std::vector<CheckRow> rows;
    const cplx s = set.dimension() + 0.17;
    for (double lambda : {2.0, 3.0, 0.5}) {
        const double r = fzeta::scaling_residual(set, lambda, s, cfg);
        char name[96];
        std::snprintf(name, sizeof name, "scaling lambda=%g at s=%.4g", lambda, s.real());
        rows.push_back({name, r, 1e-8, r < 1e-8});
    }
    return rows;
}

fzeta::MeromorphicZeta require_model(const FractalSet& set, double delta) {
    auto m = fzeta::model_for(set, delta);
    if (!m) throw fzeta::DomainError("no closed-form zeta model for this set at delta = " + std::to_string(delta));
    return *m;
}

fzeta::ContentEstimate contents_of(const FractalSet& set) {
    return fzeta::minkowski_contents_estimate(fzeta::tube_model(set), set.dimension(), 1e-12, 1e-6, 2000);
}

std::vector<CheckRow> suite_residue_content(const FractalSet& set, double delta) {
    const auto model = require_model(set, delta);
    const auto rep = fzeta::residue_content_report(model, contents_of(set));
    std::vector<CheckRow> rows;
    rows.push_back({"residue within (N-D) [M_*, M^*]", rep.residue, rep.spread, rep.within});
    if (rep.measurable) {
        rows.push_back({"equality residue = (N-D) M", rep.residue - 0.5 * (rep.lower + rep.upper),
                        std::max(1e-6 * std::abs(rep.residue), rep.upper - rep.lower + rep.spread), rep.equality});
    } else {
        rows.push_back({"strict squeeze margin > 3 spread", rep.margin, 3.0 * rep.spread, rep.strict});
    }
    if (rep.tube_residue) {
        const int N = model.ambient_dim;
        const double r = std::abs(*rep.tube_residue - rep.residue / (N - model.abscissa));
        rows.push_back({"tube residue = residue / (N-D)", r, 1e-9 * std::abs(rep.residue), rep.tube_relation});
    }
    return rows;
}

std::vector<CheckRow> suite_closed_form(const FractalSet& set, double delta) {
    fzeta::ZetaEvalConfig cfg;
    cfg.delta = delta;
    std::vector<CheckRow> rows;
    const double D = set.dimension();
    auto* grill = std::get_if<fzeta::Grill>(&set.variant());
    const auto model = fzeta::model_for(set, delta);
    const bool binomial = (!model || !model->eval) && grill && grill->d == 1 && grill->side == 1.0 &&
                          grill->base.one_dimensional();
    if ((!model || !model->eval) && !binomial) throw fzeta::DomainError("closed-form: no closed form for this set");
    for (double dre : {0.1, 0.2, 0.3}) {
        for (double im : {-3.0, 0.0, 3.0}) {
            const cplx s(D + dre, im);
            double r = 0.0;
            std::string what;
            if (binomial) {
                const auto lhs = fzeta::distance_zeta(set, s, cfg);
                const auto t0 = fzeta::distance_zeta_direct_1d(grill->base, s - 1.0, cfg);
                const auto t1 = fzeta::distance_zeta(fzeta::codim_tube_model(grill->base), s, cfg);
                if (!lhs.ok() || !t0.ok() || !t1.ok()) throw fzeta::ConvergenceError("closed-form: no convergence", INFINITY);
                r = rel(lhs.value, t0.value + t1.value);
                what = "grill binomial sum";
            } else {
                const auto z = fzeta::distance_zeta(set, s, cfg);
                if (!z.ok()) throw fzeta::ConvergenceError("closed-form: tube zeta did not converge", z.error);
                r = rel(z.value, (*model)(s));
                what = "closed form";
            }
            char name[128];
            std::snprintf(name, sizeof name, "%s at s=%.4g%+.4gi", what.c_str(), s.real(), s.imag());
            rows.push_back({name, r, 1e-7, r < 1e-7});
        }
    }
    return rows;
}

// Profile of a union of Cantor sets over span_factor periods.
fzeta::PeriodRecovery recover_periods(const fzeta::QuasiperiodicSet& q, int samples, double span_factor,
                                      fzeta::SpectralWindow window) {
    const auto& c = q.construction;
    const double Tmax = *std::max_element(c.periods.begin(), c.periods.end());
    double tau0 = std::log(2.0);
    for (std::size_t i = 0; i < c.moduli.size(); ++i) {
        const double m = static_cast<double>(c.moduli[i]);
        tau0 = std::max(tau0, -std::log((1.0 - m * c.scales[i]) / (2.0 * (m - 1.0))));
    }
    const double dtau = span_factor * Tmax / samples;
    const auto G = fzeta::sample_profile(fzeta::tube_model(q.set), c.D, tau0 + 1.0, dtau, samples);
    fzeta::PeriodOptions opt;
    opt.window = window;
    return fzeta::period_recover(G, dtau, c.periods, opt);
}

std::vector<CheckRow> quasi_rows(const fzeta::QuasiperiodicSet& q) {
    const auto& c = q.construction;
    std::vector<CheckRow> rows;
    rows.push_back({c.certified ? "exponent vectors independent (certified)" : "certificate FAILED (rank deficient)",
                    static_cast<double>(c.rank), static_cast<double>(c.moduli.size()), c.certified});
    const auto coincide = fzeta::coincident_poles(c);
    rows.push_back({"no shared nonzero poles for |k| <= 10000", static_cast<double>(coincide.size()), 0.0, coincide.empty()});
    for (std::size_t i = 0; i < c.moduli.size(); ++i) {
        for (std::size_t j = i + 1; j < c.moduli.size(); ++j) {
            const auto ev = fzeta::irrationality_evidence_log_ratio(c.moduli[i], c.moduli[j], 20);
            char name[128];
            std::snprintf(name, sizeof name, "T_%zu/T_%zu continued fraction non-terminating to depth 20", i + 1, j + 1);
            rows.push_back({name, static_cast<double>(ev.depth_reached), 20.0, !ev.terminated && ev.depth_reached == 20});
        }
    }
    const auto pr = recover_periods(q, 2048, 5.0, fzeta::SpectralWindow::Hann);
    for (std::size_t i = 0; i < pr.matches.size(); ++i) {
        char name[96];
        std::snprintf(name, sizeof name, "period T_%zu=%.6g recovered (bins off)", i + 1, pr.matches[i].period);
        rows.push_back({name, pr.matches[i].offset_bins, 2.0, pr.matches[i].recovered});
    }
    rows.push_back({"spurious spectral peaks", static_cast<double>(pr.spurious), 0.0, pr.spurious == 0});
    return rows;
}

fzeta::QuasiperiodicSet construction_from_union(const FractalSet& set) {
    auto* u = std::get_if<fzeta::DisjointUnion>(&set.variant());
    std::vector<std::pair<int, double>> comps;
    if (auto* c = std::get_if<fzeta::GeneralizedCantor>(&set.variant())) comps.emplace_back(c->m, c->a);
    if (u) {
        for (const auto& [comp, offset] : u->components) {
            auto* c = std::get_if<fzeta::GeneralizedCantor>(&comp.variant());
            if (!c) throw fzeta::DomainError("quasi: union components must be Cantor sets");
            comps.emplace_back(c->m, c->a);
        }
    }
    if (comps.empty()) throw fzeta::DomainError("quasi: needs a union of Cantor sets or --moduli");
    const double D = fzeta::cantor_dimension(comps[0].first, comps[0].second);
    std::vector<std::int64_t> moduli;
    for (const auto& [m, a] : comps) {
        if (std::abs(fzeta::cantor_dimension(m, a) - D) > 1e-12) throw fzeta::DomainError("quasi: components do not share D");
        moduli.push_back(m);
    }
    return fzeta::build_quasiperiodic(D, moduli);
}

std::vector<CheckRow> suite_dti() {
    using fzeta::Dti;
    std::vector<CheckRow> rows;
    const double e = std::abs(dti_eval(Dti::elementary(0.5), 2.0).value - 2.0 / 3.0);
    rows.push_back({"elementary(0.5) at s=2 equals 2/3", e, 1e-8, e < 1e-8});
    const Dti f = Dti::elementary(0.5), g = Dti::elementary(cplx(-1.0, 2.0));
    double t = 0.0;
    for (cplx s : {cplx(1.0), cplx(2.0, 3.0), cplx(0.75, -1.0)}) {
        t = std::max(t, std::abs(dti_eval(Dti::tensor(f, g), s).value - dti_eval(f, s).value * dti_eval(g, s).value));
    }
    rows.push_back({"tensor product equals product of values", t, 1e-8, t < 1e-8});
    const Dti p = Dti::reciprocal_polynomial({0.0, 1.0});
    double pe = 0.0;
    for (int i = 0; i < 10; ++i) {
        const cplx s(1.2 + 0.3 * i, -3.0 + 0.7 * i);
        pe = std::max(pe, std::abs(dti_eval(p, s).value - 1.0 / (s * (s - 1.0))));
    }
    rows.push_back({"reciprocal polynomial {0,1} equals 1/(s(s-1))", pe, 1e-8, pe < 1e-8});
    const Dti probe = Dti::tensor(Dti::elementary(0.3), Dti::elementary(cplx(0.7, 1.5)));
    std::vector<double> grid;
    for (double x = 2.0; x >= -0.5; x -= 0.25) grid.push_back(x);
    const auto br = fzeta::abscissa_probe([&](double x) { return dti_eval(probe, x); }, grid);
    const double off = std::max(std::abs(br.lo - 0.7), std::abs(br.hi - 0.7));
    rows.push_back({"abscissa bracket around max Re a = 0.7", off, 0.05, br.divergence_found && off <= 0.05});
    return rows;
}

std::vector<CheckRow> run_suite(const std::string& suite, const Common& c, const CheckArgs* args) {
    static const std::vector<std::string> known{"functional-eq", "scaling", "residue-content", "closed-form", "quasi", "dti"};
    if (std::find(known.begin(), known.end(), suite) == known.end()) {
        throw UsageError("unknown suite '" + suite + "' (expected functional-eq, scaling, residue-content, closed-form, quasi, dti)");
    }
    if (suite == "dti") return suite_dti();
    if (suite == "quasi" && args && !args->moduli.empty()) {
        const double D = args->D.empty() ? 0.5 : fzeta::parse_number(args->D);
        return quasi_rows(fzeta::build_quasiperiodic(D, parse_moduli(args->moduli)));
    }
    const FractalSet set = load_set(c);
    const double delta = delta_for(c, set);
    if (suite == "functional-eq") return suite_functional_eq(set, delta);
    if (suite == "scaling") return suite_scaling(set, delta);
    if (suite == "residue-content") return suite_residue_content(set, delta);
    if (suite == "closed-form") return suite_closed_form(set, delta);
    return quasi_rows(construction_from_union(set));
}

void add_check_table(Section& sec, const std::vector<CheckRow>& rows) {
    sec.table.columns = {"check", "measured", "tolerance", "status"};
    for (const auto& r : rows) sec.table.rows.push_back({r.name, r.measured, r.tolerance, std::string(r.pass ? "PASS" : "FAIL")});
}

void describe_set(Section& sec, const FractalSet& set) {
    std::string spec = fzeta::to_spec(set);
    while (!spec.empty() && spec.back() == '\n') spec.pop_back();
    std::replace(spec.begin(), spec.end(), '\n', ';');
    sec.fields.push_back({"spec", spec});
    sec.fields.push_back({"kind", set.kind_name()});
    sec.fields.push_back({"ambient_dim", static_cast<std::int64_t>(set.ambient_dim())});
    sec.fields.push_back({"D_hint", set.dimension()});
    sec.fields.push_back({"hull", hull_text(set)});
}

void add_dims(Document& doc, const fzeta::MeromorphicZeta& model, double im_max) {
    auto& sum = doc.add("complex dimensions");
    sum.fields.push_back({"zeta", std::string(fzeta::to_string(model.kind))});
    sum.fields.push_back({"kernel", std::string(fzeta::to_string(model.kernel))});
    sum.fields.push_back({"abscissa", model.abscissa});
    sum.fields.push_back({"delta", model.delta});
    sum.fields.push_back({"list_truncated", model.dims.truncated});
    if (auto r = model.residue_at(model.abscissa)) sum.fields.push_back({"residue_at_D", r->real()});
    sum.table.columns = {"re", "im", "multiplicity", "verified", "principal", "residue_re", "residue_im"};
    for (const auto& p : model.dims.enumerate(im_max)) {
        const auto r = p.multiplicity == 1 ? model.residue_at(p.at) : std::nullopt;
        const bool principal = std::abs(p.at.real() - model.abscissa) < 1e-9;
        sum.table.rows.push_back({p.at.real(), p.at.imag(), static_cast<std::int64_t>(p.multiplicity), p.verified, principal,
                                  r ? Cell(r->real()) : Cell(std::string("unknown")),
                                  r ? Cell(r->imag()) : Cell(std::string("unknown"))});
    }
    for (const auto& z : model.removable) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "s = %.6g%+.6gi is a removable singularity (residue checked to vanish)", z.real(), z.imag());
        sum.notes.push_back(buf);
    }
    auto& lat = doc.add("pole lattices");
    lat.table.columns = {"base_re", "base_im", "period_p", "log_period_T", "multiplicity", "principal"};
    for (const auto& L0 : model.dims.lattices) {
        const auto L = L0.canonical();
        lat.table.rows.push_back({L.base.real(), L.base.imag(), L.period, kTwoPi / L.period,
                                  static_cast<std::int64_t>(L.multiplicity),
                                  std::abs(L.base.real() - model.abscissa) < 1e-9});
    }
}

}  // namespace

int cmd_set(const Common& c) {
    const FractalSet set = load_set(c);
    Document doc{"set", {}};
    auto& sec = doc.add("set");
    describe_set(sec, set);
    if (set.one_dimensional()) {
        auto& gaps = doc.add("gap table");
        gaps.table.columns = {"level", "length", "count"};
        const auto table = fzeta::gap_table(set, 1e-6 * set.hull().sides[0].length());
        for (std::size_t i = 0; i < std::min<std::size_t>(table.size(), 8); ++i) {
            gaps.table.rows.push_back({static_cast<std::int64_t>(i), table[i].length, table[i].count});
        }
    }
    emit(doc, c);
    return kOk;
}

namespace {

fzeta::TubeModel tube_for(const FractalSet& set, const TubeArgs& a) {
    if (!(a.t_min > 0.0) || !(a.t_max > a.t_min) || a.samples < 1) throw UsageError("need 0 < --t-min < --t-max and --samples >= 1");
    fzeta::SliceOptions so;
    if (a.method == "gap-formula") so.method = fzeta::SliceMethod::GapFormula;
    else if (a.method != "auto" && a.method != "sliced") throw UsageError("--method: expected auto, sliced or gap-formula");
    return fzeta::tube_model(set, so);
}

// Log-spaced t grid from t_min to t_max inclusive.
double t_grid(const TubeArgs& a, int i) {
    return a.samples == 1 ? a.t_min : a.t_min * std::pow(a.t_max / a.t_min, static_cast<double>(i) / (a.samples - 1));
}

}  // namespace

int cmd_tube(const Common& c, const TubeArgs& a) {
    const FractalSet set = load_set(c);
    const fzeta::TubeModel tube = tube_for(set, a);
    const int N = set.ambient_dim();
    const double D = set.dimension();
    Document doc{"tube", {}};
    auto& sec = doc.add("tube function");
    sec.fields.push_back({"source", std::string(fzeta::to_string(tube.source()))});
    sec.fields.push_back({"model", tube.label()});
    sec.fields.push_back({"ambient_dim", static_cast<std::int64_t>(N)});
    sec.fields.push_back({"D_hint", D});
    sec.table.columns = {"t", "volume", "profile"};
    if (a.monte_carlo > 0) {
        sec.fields.push_back({"seed", static_cast<std::int64_t>(c.seed)});
        sec.table.columns.push_back("mc_volume");
        sec.table.columns.push_back("mc_stderr");
    }
    std::mt19937_64 rng(c.seed);
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < a.samples; ++i) {
        const double t = t_grid(a, i);
        const double v = tube(t);
        std::vector<Cell> row{t, v, v / std::pow(t, N - D)};
        if (a.monte_carlo > 0) {
            const auto& sides = set.hull().sides;
            double box = 1.0;
            for (const auto& s : sides) box *= s.length() + 2.0 * t;
            std::vector<double> x(sides.size());
            long hits = 0;
            for (int k = 0; k < a.monte_carlo; ++k) {
                for (std::size_t j = 0; j < sides.size(); ++j) x[j] = sides[j].lo - t + uniform() * (sides[j].length() + 2.0 * t);
                if (fzeta::distance(set, x) < t) ++hits;
            }
            const double p = static_cast<double>(hits) / a.monte_carlo;
            row.push_back(box * p);
            row.push_back(box * std::sqrt(p * (1.0 - p) / a.monte_carlo));
        }
        sec.table.rows.push_back(std::move(row));
    }
    emit(doc, c);
    return kOk;
}

int cmd_tube_export(const Common& c, const TubeArgs& a) {
    const FractalSet set = load_set(c);
    const fzeta::TubeModel tube = tube_for(set, a);
    const int N = set.ambient_dim();
    const double D = set.dimension();
    struct Sample {
        double t, volume, tau, profile;
    };
    std::vector<Sample> pts;
    for (int i = 0; i < a.samples; ++i) {
        const double t = t_grid(a, i);
        const double v = tube(t);
        pts.push_back({t, v, -std::log(t), v / std::pow(t, N - D)});
    }
    if (parse_format(c.format) != Format::Text) {
        Document doc{"tube-export", {}};
        auto& sec = doc.add("tube export");
        sec.fields.push_back({"ambient_dim", static_cast<std::int64_t>(N)});
        sec.fields.push_back({"D", D});
        sec.table.columns = {"t", "volume", "tau", "G"};
        for (const auto& p : pts) sec.table.rows.push_back({p.t, p.volume, p.tau, p.profile});
        emit(doc, c);
        return kOk;
    }
    // Plot-ready blocks separated by a blank line; '#' lines are comments.
    std::ostringstream out;
    char buf[128];
    out << "# fractal-zeta tube export\n# model: " << tube.label() << "\n";
    std::snprintf(buf, sizeof buf, "# N = %d, D = %.17g\n", N, D);
    out << buf << "# block 1: t |A_t|\n";
    for (const auto& p : pts) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.t, p.volume);
        out << buf;
    }
    out << "\n# block 2: tau G(tau) = |A_t| / t^(N - D), tau = log(1/t)\n";
    for (const auto& p : pts) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.tau, p.profile);
        out << buf;
    }
    write_out(out.str(), c);
    return kOk;
}

int cmd_zeta(const Common& c, const ZetaArgs& a) {
    const FractalSet set = load_set(c);
    const double delta = delta_for(c, set);
    const double D = set.dimension();
    const Range re = a.re.empty() ? Range{D + 0.1, D + 0.5, 5} : parse_range(a.re, "--re");
    const Range imr = parse_range(a.im, "--im");
    if (a.kind != "distance" && a.kind != "tube") throw UsageError("--kind: expected distance or tube");
    if (a.method != "numeric" && a.method != "direct" && a.method != "closed-form") throw UsageError("--method: expected numeric, direct or closed-form");
    if (a.method == "direct" && a.kind != "distance") throw UsageError("--method direct evaluates the distance zeta only");
    fzeta::ZetaEvalConfig cfg;
    cfg.delta = delta;
    const fzeta::TubeModel tube = fzeta::tube_model(set);
    std::optional<fzeta::MeromorphicZeta> model;
    if (a.method == "closed-form") {
        model = require_model(set, delta);
        if (!model->eval) throw fzeta::DomainError("the closed-form model of this set has no evaluator");
    }
    const int N = set.ambient_dim();
    Document doc{"zeta", {}};
    auto& sec = doc.add("zeta values");
    sec.fields.push_back({"zeta", a.kind});
    sec.fields.push_back({"method", a.method});
    sec.fields.push_back({"delta", delta});
    sec.table.columns = {"re", "im", "value_re", "value_im", "error", "status"};
    bool all_ok = true;
    for (int i = 0; i < re.n; ++i) {
        for (int j = 0; j < imr.n; ++j) {
            const cplx s(re.at(i), imr.at(j));
            fzeta::ZetaValue z;
            if (a.method == "closed-form") {
                z.value = (*model)(s);
                z.status = fzeta::EvalStatus::Converged;
                if (a.kind == "tube") {
                    const cplx head = std::exp((s - static_cast<double>(N)) * std::log(delta)) * tube(delta);
                    z.value = (z.value - head) / (static_cast<double>(N) - s);
                }
            } else if (a.method == "direct") {
                z = fzeta::distance_zeta_direct_1d(set, s, cfg);
            } else {
                z = a.kind == "tube" ? fzeta::tube_zeta(tube, s, cfg) : fzeta::distance_zeta(tube, s, cfg);
            }
            all_ok = all_ok && z.ok();
            sec.table.rows.push_back({s.real(), s.imag(), z.value.real(), z.value.imag(), z.error, std::string(fzeta::to_string(z.status))});
        }
    }
    emit(doc, c);
    return all_ok ? kOk : kNonConvergence;
}

int cmd_dims(const Common& c, const DimsArgs& a) {
    const FractalSet set = load_set(c);
    const double delta = delta_for(c, set);
    const auto model = require_model(set, delta);
    Document doc{"dims", {}};
    describe_set(doc.add("set"), set);
    add_dims(doc, model, a.im_max);
    emit(doc, c);
    return kOk;
}

int cmd_check(const Common& c, const CheckArgs& a) {
    const auto rows = run_suite(a.suite, c, &a);
    Document doc{"check", {}};
    auto& sec = doc.add("check " + a.suite);
    const bool pass = std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
    sec.fields.push_back({"suite", a.suite});
    sec.fields.push_back({"result", std::string(pass ? "PASS" : "FAIL")});
    add_check_table(sec, rows);
    emit(doc, c);
    return pass ? kOk : kCheckFailed;
}

int cmd_quasi(const Common& c, const QuasiArgs& a) {
    if (a.D.empty() || a.moduli.empty()) throw UsageError("quasi: --D and --moduli are required");
    const double D = fzeta::parse_number(a.D);
    const auto q = fzeta::build_quasiperiodic(D, parse_moduli(a.moduli));
    const auto& con = q.construction;
    Document doc{"quasi " + a.action, {}};
    if (a.action == "build") {
        auto& sec = doc.add("construction");
        sec.fields.push_back({"D", con.D});
        sec.fields.push_back({"rank", static_cast<std::int64_t>(con.rank)});
        sec.fields.push_back({"n", static_cast<std::int64_t>(con.moduli.size())});
        sec.fields.push_back({"certified", con.certified});
        std::string spec = fzeta::to_spec(q.set);
        while (!spec.empty() && spec.back() == '\n') spec.pop_back();
        std::replace(spec.begin(), spec.end(), '\n', ';');
        sec.fields.push_back({"set", spec});
        sec.table.columns = {"i", "m", "a", "T", "p"};
        for (std::size_t i = 0; i < con.moduli.size(); ++i) {
            sec.table.rows.push_back({static_cast<std::int64_t>(i + 1), con.moduli[i], con.scales[i], con.periods[i], kTwoPi / con.periods[i]});
        }
        sec.notes = con.warnings;
        auto& ex = doc.add("exponent matrix");
        ex.table.columns = {"m"};
        for (auto p : con.primes) ex.table.columns.push_back("p=" + std::to_string(p));
        for (std::size_t i = 0; i < con.moduli.size(); ++i) {
            std::vector<Cell> row{con.moduli[i]};
            for (auto e : con.exponent_matrix[i]) row.push_back(e);
            ex.table.rows.push_back(std::move(row));
        }
        auto& ir = doc.add("period ratios");
        ir.table.columns = {"i", "j", "partial_quotients", "terminated", "last_convergent", "residual"};
        for (std::size_t i = 0; i < con.moduli.size(); ++i) {
            for (std::size_t j = i + 1; j < con.moduli.size(); ++j) {
                const auto ev = fzeta::irrationality_evidence_log_ratio(con.moduli[i], con.moduli[j], 20);
                std::string pq;
                for (std::size_t k = 0; k < ev.partial_quotients.size(); ++k) pq += (k ? " " : "") + ev.partial_quotients[k];
                const auto& last = ev.convergents.back();
                ir.table.rows.push_back({static_cast<std::int64_t>(i + 1), static_cast<std::int64_t>(j + 1), pq, ev.terminated,
                                         last.p + "/" + last.q, last.residual});
            }
        }
        ir.notes.push_back("a non-terminating expansion is evidence of irrationality, not a proof");
        for (const auto& pc : fzeta::coincident_poles(con)) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "lattices %zu and %zu share poles: k_%zu = %lld, k_%zu = %lld", pc.i + 1, pc.j + 1,
                          pc.i + 1, static_cast<long long>(pc.k_i), pc.j + 1, static_cast<long long>(pc.k_j));
            ir.notes.push_back(buf);
        }
    } else if (a.action == "spectrum" || a.action == "recover") {
        if (a.samples < 64) throw UsageError("--samples must be >= 64");
        const auto window = parse_window(a.window);
        const double Tmax = *std::max_element(con.periods.begin(), con.periods.end());
        const double Tmin = *std::min_element(con.periods.begin(), con.periods.end());
        double tau0 = std::log(2.0);
        for (std::size_t i = 0; i < con.moduli.size(); ++i) {
            const double m = static_cast<double>(con.moduli[i]);
            tau0 = std::max(tau0, -std::log((1.0 - m * con.scales[i]) / (2.0 * (m - 1.0))));
        }
        const double dtau = a.span_factor * Tmax / a.samples;
        const auto G = fzeta::sample_profile(fzeta::tube_model(q.set), D, tau0 + 1.0, dtau, a.samples);
        if (a.action == "spectrum") {
            auto& sec = doc.add("spectrum");
            sec.fields.push_back({"window", std::string(fzeta::to_string(window))});
            sec.fields.push_back({"span", dtau * a.samples});
            sec.table.columns = {"frequency", "power"};
            const double fmax = a.f_max > 0.0 ? a.f_max : 10.0 / Tmin;
            for (const auto& p : fzeta::quasi_spectrum(G, dtau, window)) {
                if (p.frequency > fmax) break;
                sec.table.rows.push_back({p.frequency, p.power});
            }
        } else {
            fzeta::PeriodOptions opt;
            opt.window = window;
            const auto pr = fzeta::period_recover(G, dtau, con.periods, opt);
            auto& sec = doc.add("period recovery");
            sec.fields.push_back({"window", std::string(fzeta::to_string(window))});
            sec.fields.push_back({"bin_width", pr.bin_width});
            sec.fields.push_back({"all_recovered", pr.all_recovered});
            sec.fields.push_back({"inconclusive", pr.inconclusive});
            sec.fields.push_back({"spurious", static_cast<std::int64_t>(pr.spurious)});
            sec.table.columns = {"period", "frequency", "peak_frequency", "offset_bins", "peak_db", "recovered"};
            for (const auto& m : pr.matches) {
                sec.table.rows.push_back({m.period, 1.0 / m.period, m.peak_frequency, m.offset_bins, m.peak_db, m.recovered});
            }
            auto& pk = doc.add("spectral peaks");
            pk.table.columns = {"frequency", "db_above_floor", "role"};
            for (const auto& p : pr.peaks) pk.table.rows.push_back({p.frequency, p.db_above_floor, p.role});
            emit(doc, c);
            return pr.all_recovered ? kOk : kCheckFailed;
        }
    } else {
        throw UsageError("quasi: expected build, spectrum or recover");
    }
    emit(doc, c);
    return kOk;
}

int cmd_report(const Common& c) {
    const FractalSet set = load_set(c);
    const double delta = delta_for(c, set);
    const double D = set.dimension();
    const int N = set.ambient_dim();
    Document doc{"report", {}};
    auto& head = doc.add("set");
    describe_set(head, set);
    head.fields.push_back({"delta", delta});

    const auto model = fzeta::model_for(set, delta);
    if (model) add_dims(doc, *model, 20.0);

    const fzeta::TubeModel tube = fzeta::tube_model(set);
    const auto est = contents_of(set);
    auto& ct = doc.add("minkowski contents");
    ct.fields.push_back({"t_range", std::string("[1e-12, 1e-6]")});
    ct.fields.push_back({"lower", est.lower});
    ct.fields.push_back({"upper", est.upper});
    ct.fields.push_back({"spread", est.residual_spread});
    ct.fields.push_back({"(N-D) lower", (N - D) * est.lower});
    ct.fields.push_back({"(N-D) upper", (N - D) * est.upper});
    if (model) {
        if (auto r = model->residue_at(model->abscissa)) ct.fields.push_back({"residue_at_D", r->real()});
    }
    if (is_astring(set)) {
        const double a = astring_exponent(set);
        const fzeta::TubeModel inner(fzeta::TubeSource::GapSum, [set](double t) { return fzeta::inner_tube_gapsum(set, t); },
                                     fzeta::Interval{0.0, INFINITY}, 1, D, "inner tube");
        const auto in = fzeta::minkowski_contents_estimate(inner, D, 1e-12, 1e-6, 2000);
        ct.fields.push_back({"inner lower", in.lower});
        ct.fields.push_back({"inner upper", in.upper});
        const double v1 = std::pow(2.0, 1.0 - D) * std::pow(a, D) / (1.0 - D);
        const double v2 = v1 / D;
        auto which = [&](double v) {
            if (std::abs(v - v1) <= 0.01 * v1) return std::string("2^(1-D) a^D / (1-D)");
            if (std::abs(v - v2) <= 0.01 * v2) return std::string("2^(1-D) a^D / (D(1-D))");
            return std::string("neither candidate");
        };
        const double full = 0.5 * (est.lower + est.upper), inn = 0.5 * (in.lower + in.upper);
        char buf[256];
        std::snprintf(buf, sizeof buf, "candidate content values: 2^(1-D) a^D / (1-D) = %.6f and 2^(1-D) a^D / (D(1-D)) = %.6f", v1, v2);
        ct.notes.push_back(buf);
        std::snprintf(buf, sizeof buf, "full-neighborhood constant %.6f matches %s", full, which(full).c_str());
        ct.notes.push_back(buf);
        std::snprintf(buf, sizeof buf, "inner-neighborhood constant %.6f matches %s", inn, which(inn).c_str());
        ct.notes.push_back(buf);
    }

    // Profile spectrum against the log-periods of the principal lattices.
    auto& sp = doc.add("profile spectrum");
    std::vector<double> periods;
    if (model) {
        for (const auto& L : model->dims.principal_lattices()) periods.push_back(kTwoPi / L.period);
    }
    const double tau0 = std::max(8.0, std::log(1.0 / delta) + 8.0);
    const int n = 2048;
    const double span = periods.empty() ? 10.0 : 5.0 * *std::max_element(periods.begin(), periods.end());
    const auto G = fzeta::sample_profile(tube, D, tau0, span / n, n);
    sp.fields.push_back({"tau_start", tau0});
    sp.fields.push_back({"span", span});
    double gmin = G[0], gmax = G[0];
    for (double g : G) {
        gmin = std::min(gmin, g);
        gmax = std::max(gmax, g);
    }
    sp.fields.push_back({"profile_min", gmin});
    sp.fields.push_back({"profile_max", gmax});
    if (periods.empty()) {
        sp.notes.push_back("no log-periodic principal lattice; spectrum not matched against periods");
    } else {
        const auto pr = fzeta::period_recover(G, span / n, periods);
        sp.fields.push_back({"flat", pr.flat});
        sp.fields.push_back({"all_recovered", pr.all_recovered});
        sp.table.columns = {"period", "peak_frequency", "offset_bins", "peak_db", "recovered"};
        for (const auto& m : pr.matches) sp.table.rows.push_back({m.period, m.peak_frequency, m.offset_bins, m.peak_db, m.recovered});
    }

    auto& ck = doc.add("check summary");
    ck.table.columns = {"suite", "checks", "failed", "status"};
    bool all_pass = true;
    for (const std::string suite : {"functional-eq", "scaling", "residue-content", "closed-form"}) {
        try {
            const auto rows = run_suite(suite, c, nullptr);
            const auto failed = std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.pass; });
            all_pass = all_pass && failed == 0;
            ck.table.rows.push_back({suite, static_cast<std::int64_t>(rows.size()), static_cast<std::int64_t>(failed),
                                     std::string(failed == 0 ? "PASS" : "FAIL")});
        } catch (const fzeta::DomainError& e) {
            ck.table.rows.push_back({suite, std::int64_t{0}, std::int64_t{0}, std::string("skipped: ") + e.what()});
        }
    }
    emit(doc, c);
    return all_pass ? kOk : kCheckFailed;
}

}  // namespace fzcli
