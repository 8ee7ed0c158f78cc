#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fractal_zeta/tubes.hpp"
#include "fractal_zeta/zeta.hpp"

namespace fzeta {

// base + i * period * Z. Canonical form keeps Im(base) in [-period/2, period/2).
struct PoleLattice {
    cplx base;
    double period;
    int multiplicity = 1;

    PoleLattice canonical() const;
};

struct IsolatedPole {
    cplx at;
    int multiplicity = 1;
    bool verified = true;  // false: carried over as a candidate without a check
};

// Poles of a meromorphic zeta function. An isolated entry that coincides
// with a lattice point overrides the lattice multiplicity there.
struct ComplexDimensions {
    std::vector<PoleLattice> lattices;
    std::vector<IsolatedPole> isolated;
    double abscissa = -INFINITY;  // D
    bool truncated = false;       // isolated list is a finite head of an infinite family

    std::vector<PoleLattice> principal_lattices(double tol = 1e-9) const;
    std::vector<IsolatedPole> principal_isolated(double tol = 1e-9) const;
    // Every pole with |Im| <= im_max, lattices expanded, sorted by (Re desc, Im asc).
    std::vector<IsolatedPole> enumerate(double im_max) const;
    bool contains(cplx s, double tol = 1e-9) const;
    ComplexDimensions shifted(double d) const;
};

enum class KernelKind { CantorForm, SphereForm, StringDictionary, RationalForm, GrillForm, UnionForm, ScaledForm };
enum class ZetaKind { Distance, Tube, Geometric, Other };

const char* to_string(KernelKind k);
const char* to_string(ZetaKind k);

struct MeromorphicZeta {
    std::string name;
    KernelKind kernel = KernelKind::RationalForm;
    ZetaKind kind = ZetaKind::Other;
    int ambient_dim = 1;
    double delta = 0.0;
    double abscissa = 0.0;  // D
    ComplexDimensions dims;
    bool dims_known = true;
    std::function<cplx(cplx)> eval;                  // empty when no closed form exists
    std::function<std::optional<cplx>(cplx)> residue;  // empty or nullopt when unknown
    std::optional<cplx> value_at_zero;               // geometric zetas: zeta_L(0)
    int order_at_zero = 0;                           // geometric zetas: pole order at 0
    double correction_abscissa = -INFINITY;          // grills: D + d - 1
    // Composition data.
    std::shared_ptr<const MeromorphicZeta> base;
    int grill_d = 0;
    int cantor_m = 0;
    double cantor_a = 0.0;
    std::vector<cplx> removable;  // candidate points checked and found regular

    cplx operator()(cplx s) const;            // throws DomainError if eval is empty
    std::optional<cplx> residue_at(cplx s) const;
};

// Distance zeta of C^(m,a) for delta >= c:
// c^(s-1)(1 - m a)/(s(1 - m a^s)) + 2 delta^s / s.
MeromorphicZeta cantor_model(int m, double a, double delta);
// Tube zeta of C^(m,a) from the closed form via the functional equation.
MeromorphicZeta cantor_tube_model(int m, double a, double delta);
// Tube zeta of the unit sphere in R^N for 0 < delta <= 1.
MeromorphicZeta sphere_model(int N, double delta);
// Distance zeta of the unit sphere in R^N for 0 < delta <= 1.
MeromorphicZeta sphere_distance_model(int N, double delta);

// Geometric zetas of fractal strings.
MeromorphicZeta geometric_string_zeta(double first, double ratio);
MeromorphicZeta cantor_string_zeta(int m, double a);
// a-string; the meromorphic extension is described by its poles
// rho (1 - n), n = 0, 2, 3, ..., n_max, with rho = 1/(1 + a). Evaluation is
// numerical and limited to Re s > rho.
MeromorphicZeta astring_zeta(double a, int n_max = 12);

// zeta_A(s) = s^-1 2^(1-s) zeta_L(s) + 2 delta^s / s for delta >= l_1 / 2.
MeromorphicZeta string_dictionary(const MeromorphicZeta& zeta_L, double first_length, double delta);

// 1 / (1 - m a^s): poles on D + (2 pi / log(1/a)) i Z.
MeromorphicZeta exponential_kernel_model(int m, double a);

// Distance zeta of a disjoint union of Cantor components sharing dimension
// D, for max c_i <= delta <= half the separation.
MeromorphicZeta union_model(const std::vector<std::pair<int, double>>& components, double delta);

// A x [0,1]^d: principal poles shift by d.
MeromorphicZeta grill_shift(const MeromorphicZeta& model, int d);
// zeta_{lambda A}(s, lambda delta) = lambda^s zeta_A(s, delta).
MeromorphicZeta scaled_model(const MeromorphicZeta& model, double lambda);

// Meromorphic zeta of a set when a closed form is known.
std::optional<MeromorphicZeta> model_for(const FractalSet& set, double delta);

enum class ResidueMethod { Contour, Richardson };

struct ResidueFit {
    cplx residue;
    double error;
};

// Contour: trapezoid rule on the circle |s - pole| = radius (needs values on
// both sides of the pole). Richardson: extrapolates h f(pole + h) to h -> 0
// along the real axis from the right, starting at h = radius.
ResidueFit residue_fit(const std::function<cplx(cplx)>& f, cplx pole, double radius,
                       ResidueMethod method = ResidueMethod::Contour);
// Wraps a numerical evaluator that reports convergence.
std::function<cplx(cplx)> as_function(const std::function<ZetaValue(cplx)>& f);

struct ResidueContentReport {
    double residue;        // res(zeta_A, D)
    double lower;          // (N - D) M_*
    double upper;          // (N - D) M^*
    double margin;         // min distance of residue to the bounds
    double spread;         // content estimate spread
    bool within;           // lower <= residue <= upper (up to spread)
    bool strict;           // strictly inside with margin > 3 spread
    bool measurable;       // upper and lower contents agree within spread
    bool equality;         // measurable and residue = (N - D) M
    std::optional<double> tube_residue;
    bool tube_relation;    // tube residue = residue / (N - D)
};

ResidueContentReport residue_content_report(const MeromorphicZeta& model, const ContentEstimate& contents,
                                            double rel_tol = 1e-6);

// Same D and the same principal poles with multiplicities.
bool equivalent(const MeromorphicZeta& a, const MeromorphicZeta& b, double tol = 1e-9);

enum class Weak { Equivalent, NotEquivalent, Indeterminate };
const char* to_string(Weak w);

struct WeakEquivalence {
    Weak verdict;
    AbscissaBracket f_bracket;
    AbscissaBracket g_bracket;
    AbscissaBracket h_bracket;
    double consistency;  // max relative |f - g - h| where all three converge
};

// f and g are weakly equivalent when D(f - g) < D(g). h must evaluate f - g
// on its own (it may converge further left than f and g).
WeakEquivalence weakly_equivalent(const RealEvaluator& f, const RealEvaluator& g, const RealEvaluator& h,
                                  std::span<const double> grid, const ProbeOptions& opt = {});

}  // namespace fzeta
