#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fractal_zeta/zeta.hpp"

namespace fzeta {

// Nowhere-vanishing entire factor rho(s) = scale * exp(rate * s).
struct EntireFactor {
    cplx scale{1.0, 0.0};
    cplx rate{0.0, 0.0};
    cplx operator()(cplx s) const { return scale * std::exp(rate * s); }
};

// Dirichlet-type integrals built from elementary ones. Every descriptor is
// evaluated by numerical integration of its defining measure; closed forms
// are only used by tests.
class Dti {
public:
    enum class Kind { Elementary, Tensor, ReciprocalPolynomial, BaseR };

    // f(s) = integral over [1, inf) of x^(a - s - 1) dx = 1/(s - a).
    static Dti elementary(cplx a);
    // (f x g)(s) = f(s) g(s), the DTI of the product measure.
    static Dti tensor(const Dti& f, const Dti& g);
    // 1 / (leading * prod (s - a_m)) as a tensor product of elementary DTIs.
    static Dti reciprocal_polynomial(std::vector<cplx> roots, cplx leading = 1.0);
    // rho(s) f(r^(-s)) for r > 1 (or 0 < r < 1).
    static Dti base_r(const Dti& inner, double r, EntireFactor rho);

    Kind kind() const { return kind_; }
    // Upper bound for the abscissa of convergence; +inf for base-r forms.
    double abscissa_bound() const;
    // Tameness constant: products multiply, elementary ones are 1.
    double tameness_constant() const;
    std::string describe() const;

    friend ZetaValue dti_eval(const Dti& f, cplx s, const ZetaEvalConfig& cfg);

private:
    Kind kind_ = Kind::Elementary;
    cplx a_{};
    cplx leading_{1.0, 0.0};
    std::vector<Dti> parts_;
    double r_ = 0.0;
    EntireFactor rho_{};
};

ZetaValue dti_eval(const Dti& f, cplx s, const ZetaEvalConfig& cfg = {});

}  // namespace fzeta
