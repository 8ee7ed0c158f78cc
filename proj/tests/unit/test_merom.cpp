#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fractal_zeta/merom.hpp"
#include "fractal_zeta/sets.hpp"
#include "fractal_zeta/tubes.hpp"
#include "fractal_zeta/zeta.hpp"

using namespace fzeta;

namespace {

constexpr double kPi = std::numbers::pi;
const double kD = std::log(2.0) / std::log(3.0);

ZetaEvalConfig with_delta(double d) {
    ZetaEvalConfig cfg;
    cfg.delta = d;
    return cfg;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

bool has_pole(const MeromorphicZeta& z, cplx s) { return z.dims.contains(s); }

}  // namespace

TEST(CantorModel, ResidueAtD) {
    const auto z = cantor_model(2, 1.0 / 3.0, 1.0 / 6.0);
    EXPECT_NEAR(z.abscissa, kD, 1e-15);
    const double expected = 2.0 / std::log(2.0) * std::pow(6.0, -kD);
    EXPECT_NEAR(z.residue_at(kD)->real(), expected, 1e-12);
    // General-m form c^(D-1)(1 - m a)/(D log(1/a)) at m = 2.
    const double c = 1.0 / 6.0;
    EXPECT_NEAR(std::pow(c, kD - 1.0) * (1.0 - 2.0 / 3.0) / (kD * std::log(3.0)), expected, 1e-12);
}

TEST(CantorModel, EvalMatchesNumeric) {
    const auto z = cantor_model(2, 1.0 / 3.0, 1.0 / 6.0);
    const auto num = distance_zeta(make_cantor(2, 1.0 / 3.0), 1.0, with_delta(1.0 / 6.0));
    EXPECT_LT(rel(num.value, z(1.0)), 1e-8);
    EXPECT_THROW(cantor_model(2, 1.0 / 3.0, 0.1), DomainError);
}

TEST(CantorModel, OriginIsRemovable) {
    const auto z = cantor_model(2, 1.0 / 3.0, 1.0 / 6.0);
    ASSERT_EQ(z.removable.size(), 1u);
    EXPECT_EQ(z.removable[0], cplx(0.0));
    EXPECT_FALSE(has_pole(z, 0.0));
    EXPECT_LT(std::abs(residue_fit([&](cplx s) { return z(s); }, 0.0, 0.1).residue), 1e-10);
}

TEST(CantorModel, LatticeResidueRule) {
    for (auto [m, a] : {std::pair{2, 1.0 / 3.0}, std::pair{3, 0.2}}) {
        const double c = (1.0 - m * a) / (2.0 * (m - 1));
        const auto z = cantor_model(m, a, c);
        const auto poles = z.dims.enumerate(200.0);
        const double ref = std::abs(z.abscissa * *z.residue_at(z.abscissa));
        int n = 0;
        for (const auto& p : poles) {
            if (std::abs(p.at.real() - z.abscissa) > 1e-9) continue;
            EXPECT_NEAR(std::abs(p.at * *z.residue_at(p.at)), ref, 1e-12 * ref);
            ++n;
        }
        EXPECT_GT(n, 20);
    }
}

TEST(CantorModel, TubeResidueRelationExact) {
    for (auto [m, a] : {std::pair{2, 1.0 / 3.0}, std::pair{3, 0.2}, std::pair{4, 0.1}}) {
        const double delta = 0.5;
        const auto z = cantor_model(m, a, delta), zt = cantor_tube_model(m, a, delta);
        for (const auto& p : z.dims.enumerate(40.0)) {
            if (std::abs(p.at.real() - z.abscissa) > 1e-9) continue;
            const cplx r = *z.residue_at(p.at), rt = *zt.residue_at(p.at);
            EXPECT_LT(std::abs(rt - r / (1.0 - p.at)), 1e-12 * std::abs(rt));
        }
    }
}

TEST(SphereModel, PolesAndResidues) {
    const auto z3 = sphere_model(3, 0.5);
    EXPECT_TRUE(has_pole(z3, 2.0));
    EXPECT_TRUE(has_pole(z3, 0.0));
    EXPECT_FALSE(has_pole(z3, 1.0));
    EXPECT_NEAR(z3.residue_at(2.0)->real(), 8.0 * kPi, 1e-12);
    const auto z2 = sphere_model(2, 0.5);
    EXPECT_EQ(z2.dims.enumerate(10.0).size(), 1u);
    EXPECT_NEAR(z2.residue_at(1.0)->real(), 4.0 * kPi, 1e-12);
    const auto z1 = sphere_model(1, 0.5);
    EXPECT_TRUE(has_pole(z1, 0.0));
    EXPECT_NEAR(z1.residue_at(0.0)->real(), 4.0, 1e-14);
}

TEST(StringDictionary, GeometricLengths) {
    const auto zl = geometric_string_zeta(0.5, 0.5);
    const auto z = string_dictionary(zl, 0.5, 1.0);
    EXPECT_DOUBLE_EQ(z.abscissa, 0.0);
    const double p = 2.0 * kPi / std::log(2.0);
    for (int k = -3; k <= 3; ++k) EXPECT_TRUE(has_pole(z, cplx(0.0, k * p))) << k;
    // 1/s raises the order of the pole of zeta_L at the origin.
    for (const auto& q : z.dims.enumerate(0.5)) {
        if (std::abs(q.at) < 1e-12) EXPECT_EQ(q.multiplicity, 2);
    }
    EXPECT_THROW(string_dictionary(zl, 0.5, 0.2), DomainError);
}

TEST(StringDictionary, AStringPoles) {
    // Lengths expand in even powers of 1/(j + 1/2), so only rho (1 - n) with n even survive.
    const double a = 0.5, rho = 1.0 / (1.0 + a);
    const auto z = string_dictionary(astring_zeta(a), std::pow(1.0, -a) - std::pow(2.0, -a), 1.0);
    EXPECT_NEAR(z.abscissa, rho, 1e-15);
    for (int n : {0, 2, 4, 6}) EXPECT_TRUE(has_pole(z, rho * (1 - n))) << n;
    for (int n : {3, 5}) EXPECT_FALSE(has_pole(z, rho * (1 - n))) << n;
    EXPECT_TRUE(z.dims.truncated);
    // a = 1: the binomial coefficient vanishes at the integer points.
    const auto z1 = string_dictionary(astring_zeta(1.0), 0.5, 1.0);
    EXPECT_TRUE(has_pole(z1, 0.5));
    EXPECT_TRUE(has_pole(z1, -0.5));
    EXPECT_TRUE(has_pole(z1, -1.5));
    EXPECT_FALSE(has_pole(z1, -1.0));
}

TEST(StringDictionary, SingleLengthOnlyPoleAtOrigin) {
    MeromorphicZeta zl;
    zl.name = "one length";
    zl.kind = ZetaKind::Geometric;
    zl.abscissa = -INFINITY;
    zl.eval = [](cplx) { return cplx(1.0); };
    zl.value_at_zero = 1.0;
    const auto z = string_dictionary(zl, 1.0, 0.5);
    const auto poles = z.dims.enumerate(100.0);
    ASSERT_EQ(poles.size(), 1u);
    EXPECT_EQ(poles[0].at, cplx(0.0));
    EXPECT_NEAR(z.residue_at(0.0)->real(), 4.0, 1e-15);
}

TEST(GrillShift, CantorGrill) {
    const auto g = grill_shift(cantor_model(2, 1.0 / 3.0, 1.0), 1);
    const auto principal = g.dims.principal_lattices();
    ASSERT_EQ(principal.size(), 1u);
    EXPECT_NEAR(principal[0].base.real(), kD + 1.0, 1e-15);
    EXPECT_NEAR(principal[0].period, 2.0 * kPi / std::log(3.0), 1e-14);
    EXPECT_EQ(g.ambient_dim, 2);
}

TEST(GrillShift, AStringComb) {
    const double rho = 0.5;
    const auto g = grill_shift(string_dictionary(astring_zeta(1.0), 0.5, 1.0), 1);
    EXPECT_DOUBLE_EQ(g.abscissa, 1.0 + rho);
    const auto principal = g.dims.principal_isolated();
    ASSERT_EQ(principal.size(), 1u);
    EXPECT_NEAR(principal[0].at.real(), 1.0 + rho, 1e-15);
}

TEST(GrillShift, ZeroIsIdentityAndShiftsCompose) {
    const auto base = cantor_model(3, 0.2, 1.0);
    const auto g0 = grill_shift(base, 0);
    EXPECT_TRUE(equivalent(g0, base));
    EXPECT_EQ(g0.abscissa, base.abscissa);
    for (int d1 = 1; d1 <= 2; ++d1) {
        for (int d2 = 1; d2 <= 2; ++d2) {
            const auto a = grill_shift(grill_shift(base, d1), d2), b = grill_shift(base, d1 + d2);
            EXPECT_TRUE(equivalent(a, b));
            EXPECT_EQ(a.dims.lattices.size(), b.dims.lattices.size());
        }
    }
}

TEST(ResidueContent, CantorStrict) {
    const auto model = cantor_model(2, 1.0 / 3.0, 1.0);
    const auto est = minkowski_contents_estimate(tube_model(make_cantor(2, 1.0 / 3.0)), kD, 1e-9, 1e-3, 4000);
    const auto r = residue_content_report(model, est);
    EXPECT_TRUE(r.within);
    EXPECT_TRUE(r.strict);
    EXPECT_FALSE(r.measurable);
    EXPECT_GT(r.margin, 3.0 * r.spread);
}

TEST(ResidueContent, SphereEquality) {
    const auto model = sphere_distance_model(3, 0.5);
    const auto est = minkowski_contents_estimate(tube_model(make_sphere(3)), 2.0, 1e-8, 1e-4, 400);
    const auto r = residue_content_report(model, est);
    EXPECT_TRUE(r.measurable);
    EXPECT_TRUE(r.equality);
    ASSERT_TRUE(r.tube_residue);
    EXPECT_NEAR(*r.tube_residue, 8.0 * kPi, 1e-8);
}

TEST(ResidueContent, AString) {
    const auto model = *model_for(make_astring(1.0), 1.0);
    const auto est = minkowski_contents_estimate(tube_model(make_astring(1.0)), 0.5, 1e-14, 1e-8, 2000);
    const auto r = residue_content_report(model, est);
    const double M = 0.5 * (est.lower + est.upper);
    EXPECT_TRUE(r.measurable);
    EXPECT_NEAR(r.residue, 0.5 * M, 1e-6);
    // No closed-form tube model exists for the a-string, so no independent tube residue.
    EXPECT_FALSE(r.tube_residue);
}

TEST(ResidueFit, SyntheticPole) {
    const auto f = [](cplx s) { return 1.0 / (s - 0.5) + std::exp(s); };
    EXPECT_NEAR(std::abs(residue_fit(f, 0.5, 0.1).residue - 1.0), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(residue_fit(f, 0.5, 0.1, ResidueMethod::Richardson).residue - 1.0), 0.0, 1e-8);
}

TEST(ResidueFit, NumericCantorTubeZeta) {
    const auto tube = tube_model(make_cantor(2, 1.0 / 3.0));
    const auto cfg = with_delta(1.0 / 6.0);
    const auto f = as_function([&](cplx s) { return tube_zeta(tube, s, cfg); });
    const auto fit = residue_fit(f, kD, 0.3, ResidueMethod::Richardson);
    const auto exact = *cantor_tube_model(2, 1.0 / 3.0, 1.0 / 6.0).residue_at(kD);
    EXPECT_LT(std::abs(fit.residue - exact), 1e-3);
}

TEST(ResidueFit, NumericCircleTubeZeta) {
    const auto tube = tube_model(make_sphere(2));
    const auto cfg = with_delta(0.5);
    const auto f = as_function([&](cplx s) { return tube_zeta(tube, s, cfg); });
    const auto fit = residue_fit(f, 1.0, 0.5, ResidueMethod::Richardson);
    EXPECT_LT(std::abs(fit.residue - 4.0 * kPi), 1e-6);
}

TEST(Equivalence, Examples) {
    const auto a = cantor_model(2, 1.0 / 3.0, 1.0 / 6.0), b = cantor_model(2, 1.0 / 3.0, 1.0);
    EXPECT_TRUE(equivalent(a, b));
    EXPECT_TRUE(equivalent(a, exponential_kernel_model(2, 1.0 / 3.0)));
    EXPECT_FALSE(equivalent(a, cantor_model(2, 0.25, 1.0)));
}

TEST(Equivalence, RelationProperties) {
    const std::vector<MeromorphicZeta> corpus{
        cantor_model(2, 1.0 / 3.0, 1.0), cantor_model(2, 1.0 / 3.0, 0.5), exponential_kernel_model(2, 1.0 / 3.0),
        cantor_model(3, 0.2, 1.0), exponential_kernel_model(3, 0.2), sphere_model(2, 0.5), sphere_distance_model(2, 0.5),
        grill_shift(cantor_model(2, 1.0 / 3.0, 1.0), 1), string_dictionary(geometric_string_zeta(0.5, 0.5), 0.5, 1.0),
        cantor_tube_model(2, 1.0 / 3.0, 1.0)};
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        EXPECT_TRUE(equivalent(corpus[i], corpus[i])) << i;
        for (std::size_t j = 0; j < corpus.size(); ++j) {
            EXPECT_EQ(equivalent(corpus[i], corpus[j]), equivalent(corpus[j], corpus[i])) << i << "," << j;
            for (std::size_t k = 0; k < corpus.size(); ++k) {
                if (equivalent(corpus[i], corpus[j]) && equivalent(corpus[j], corpus[k])) {
                    EXPECT_TRUE(equivalent(corpus[i], corpus[k])) << i << "," << j << "," << k;
                }
            }
        }
    }
}

TEST(WeakEquivalence, GrillAgainstShiftedBase) {
    const auto base = make_cantor(2, 1.0 / 3.0);
    const auto grill = make_grill(base, 1);
    const auto cfg = with_delta(1.0);
    const RealEvaluator f = [&](double x) { return distance_zeta(grill, x, cfg); };
    const RealEvaluator g = [&](double x) { return distance_zeta_direct_1d(base, x - 1.0, cfg); };
    const auto codim = codim_tube_model(base);
    const RealEvaluator h = [&](double x) { return distance_zeta(codim, x, cfg); };
    std::vector<double> grid;
    for (double x = 2.4; x >= 1.2; x -= 0.05) grid.push_back(x);
    const auto w = weakly_equivalent(f, g, h, grid);
    EXPECT_EQ(w.verdict, Weak::Equivalent);
    EXPECT_LT(w.consistency, 1e-6);
}

TEST(WeakEquivalence, SelfAndDistinctDimensions) {
    const auto c1 = make_cantor(2, 1.0 / 3.0), c2 = make_cantor(2, 0.25);
    const auto cfg = with_delta(1.0);
    const RealEvaluator f = [&](double x) { return distance_zeta_direct_1d(c1, x, cfg); };
    const RealEvaluator zero = [](double) {
        ZetaValue z;
        z.status = EvalStatus::Converged;
        return z;
    };
    std::vector<double> grid;
    for (double x = 1.23; x >= -0.5; x -= 0.05) grid.push_back(x);
    EXPECT_EQ(weakly_equivalent(f, f, zero, grid).verdict, Weak::Equivalent);
    const RealEvaluator g = [&](double x) { return distance_zeta_direct_1d(c2, x, cfg); };
    const RealEvaluator diff = [&](double x) {
        auto a = f(x), b = g(x);
        a.value -= b.value;
        if (!b.ok()) a.status = b.status;
        return a;
    };
    EXPECT_EQ(weakly_equivalent(f, g, diff, grid).verdict, Weak::NotEquivalent);
}

TEST(ModelFor, Families) {
    EXPECT_TRUE(model_for(make_cantor(2, 1.0 / 3.0), 1.0));
    EXPECT_FALSE(model_for(make_cantor(2, 1.0 / 3.0), 0.1));  // below c: no closed form
    EXPECT_TRUE(model_for(make_sphere(3), 0.5));
    EXPECT_TRUE(model_for(make_astring(1.0), 1.0));
    const auto u = make_union({{make_cantor(2, 0.25), 0.0}, {make_cantor(4, 1.0 / 16.0), 2.0}});
    const auto zu = model_for(u, 0.5);
    ASSERT_TRUE(zu);
    EXPECT_NEAR(zu->abscissa, 0.5, 1e-15);
    const auto num = distance_zeta(u, cplx(0.7, 1.0), with_delta(0.5));
    EXPECT_LT(rel(num.value, (*zu)(cplx(0.7, 1.0))), 1e-8);
}

TEST(ClosedForms, GridAgainstNumeric) {
    struct Case {
        FractalSet set;
        double delta;
    };
    const std::vector<Case> cases{{make_cantor(2, 1.0 / 3.0), 1.0},
                                  {make_cantor(3, 0.2), 0.5},
                                  {make_sphere(2), 0.5},
                                  {make_sphere(3), 0.25},
                                  {make_union({{make_cantor(2, 0.25), 0.0}, {make_cantor(4, 1.0 / 16.0), 2.0}}), 0.5},
                                  {make_fractal_string(LengthSequence::geometric(0.5, 0.25)), 1.0}};
    for (const auto& c : cases) {
        const auto model = *model_for(c.set, c.delta);
        const double D = model.abscissa, N = c.set.ambient_dim();
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) {
                const cplx s(D + 0.1 + (N - D - 0.1) * (i + 0.5) / 5.0, -5.0 + 10.0 * (j + 0.5) / 5.0);
                const auto z = distance_zeta(c.set, s, with_delta(c.delta));
                ASSERT_TRUE(z.ok()) << c.set.kind_name() << " " << s << " " << to_string(z.status);
                EXPECT_LT(std::abs(z.value - model(s)), 1e-8 * std::max(1.0, std::abs(model(s)))) << c.set.kind_name() << " " << s;
            }
        }
    }
}
