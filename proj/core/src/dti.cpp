#include "fractal_zeta/dti.hpp"

#include <cmath>
#include <sstream>

namespace fzeta {

Dti Dti::elementary(cplx a) {
    Dti d;
    d.kind_ = Kind::Elementary;
    d.a_ = a;
    return d;
}

Dti Dti::tensor(const Dti& f, const Dti& g) {
    Dti d;
    d.kind_ = Kind::Tensor;
    d.parts_ = {f, g};
    return d;
}

Dti Dti::reciprocal_polynomial(std::vector<cplx> roots, cplx leading) {
    if (roots.empty()) throw DomainError("reciprocal polynomial: need at least one root");
    if (leading == 0.0) throw DomainError("reciprocal polynomial: zero leading coefficient");
    Dti d;
    d.kind_ = Kind::ReciprocalPolynomial;
    d.leading_ = leading;
    for (const cplx& r : roots) d.parts_.push_back(elementary(r));
    return d;
}

Dti Dti::base_r(const Dti& inner, double r, EntireFactor rho) {
    if (!(r > 0.0) || r == 1.0) throw DomainError("base-r form: need r > 0, r != 1");
    if (rho.scale == 0.0) throw DomainError("base-r form: rho must not vanish");
    Dti d;
    d.kind_ = Kind::BaseR;
    d.parts_ = {inner};
    d.r_ = r;
    d.rho_ = rho;
    return d;
}

double Dti::abscissa_bound() const {
    switch (kind_) {
        case Kind::Elementary: return a_.real();
        case Kind::Tensor:
        case Kind::ReciprocalPolynomial: {
            double D = -INFINITY;
            for (const auto& p : parts_) D = std::max(D, p.abscissa_bound());
            return D;
        }
        case Kind::BaseR: return INFINITY;
    }
    return INFINITY;
}

double Dti::tameness_constant() const {
    switch (kind_) {
        case Kind::Elementary: return 1.0;
        case Kind::Tensor: return parts_[0].tameness_constant() * parts_[1].tameness_constant();
        case Kind::ReciprocalPolynomial: {
            double c = 1.0 / std::abs(leading_);
            for (const auto& p : parts_) c *= p.tameness_constant();
            return c;
        }
        case Kind::BaseR: return parts_[0].tameness_constant() * std::abs(rho_.scale);
    }
    return INFINITY;
}

std::string Dti::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Elementary: os << "elementary(" << a_.real() << (a_.imag() < 0 ? "" : "+") << a_.imag() << "i)"; break;
        case Kind::Tensor: os << "tensor(" << parts_[0].describe() << ", " << parts_[1].describe() << ")"; break;
        case Kind::ReciprocalPolynomial: {
            os << "reciprocal-polynomial[";
            for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? "," : "") << parts_[i].a_.real();
            os << "]";
            break;
        }
        case Kind::BaseR: os << "base-" << r_ << "(" << parts_[0].describe() << ")"; break;
    }
    return os.str();
}

ZetaValue dti_eval(const Dti& f, cplx s, const ZetaEvalConfig& cfg) {
    switch (f.kind_) {
        case Dti::Kind::Elementary: {
            // x = e^y turns x^(a - s - 1) dx into e^((a - s) y) dy.
            const cplx e = f.a_ - s;
            HalfLineOptions ho;
            ho.panel = 1.0;
            ho.abs_tol = cfg.abs_tol;
            ho.rel_tol = cfg.rel_tol;
            ho.x_max = cfg.tau_max;
            const auto r = integrate_half_line([e](double y) { return std::exp(e * y); }, 0.0, ho);
            ZetaValue z;
            z.value = r.value;
            z.error = r.error;
            z.status = r.status;
            z.decay_rate = r.decay_rate;
            return z;
        }
        case Dti::Kind::Tensor:
        case Dti::Kind::ReciprocalPolynomial: {
            ZetaValue acc;
            acc.value = f.kind_ == Dti::Kind::Tensor ? cplx(1.0) : 1.0 / f.leading_;
            acc.status = EvalStatus::Converged;
            acc.decay_rate = INFINITY;
            for (const auto& p : f.parts_) {
                const ZetaValue v = dti_eval(p, s, cfg);
                acc.error = std::abs(acc.value) * v.error + std::abs(v.value) * acc.error;
                acc.value *= v.value;
                acc.decay_rate = std::min(acc.decay_rate, v.decay_rate);
                if (v.status != EvalStatus::Converged) acc.status = v.status;
            }
            return acc;
        }
        case Dti::Kind::BaseR: {
            const cplx w = std::exp(-s * std::log(f.r_));
            ZetaValue v = dti_eval(f.parts_[0], w, cfg);
            const cplx rho = f.rho_(s);
            v.value *= rho;
            v.error *= std::abs(rho);
            return v;
        }
    }
    return {};
}

}  // namespace fzeta
