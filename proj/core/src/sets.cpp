#include "fractal_zeta/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

namespace fzeta {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

FractalSet make_node(FractalSet::Variant shape, int ambient, Box hull, double dimension) {
    auto node = std::make_shared<FractalSet::Node>();
    node->shape = std::move(shape);
    node->ambient = ambient;
    node->hull = std::move(hull);
    node->dimension = dimension;
    return FractalSet(std::move(node));
}

Box interval_box(double lo, double hi) { return Box{{Interval{lo, hi}}}; }

// Lengths of the string underlying an AString or FractalString node.
const LengthSequence* string_lengths(const FractalSet& set, LengthSequence& scratch) {
    if (auto* s = std::get_if<FractalString>(&set.variant())) return &s->lengths;
    if (auto* s = std::get_if<AString>(&set.variant())) {
        scratch = LengthSequence::power_law(s->a);
        return &scratch;
    }
    return nullptr;
}

// Largest k >= 1 with a_k >= x, for 0 < x <= a_1.
double string_index_at(const LengthSequence& L, double x) {
    switch (L.kind()) {
        case LengthSequence::Kind::PowerLaw: {
            double k = std::floor(std::pow(x, -1.0 / L.exponent()));
            k = std::max(k, 1.0);
            if (k < 1e15) {
                while (k > 1.0 && L.tail(k) < x) k -= 1.0;
                while (L.tail(k + 1.0) >= x) k += 1.0;
            }
            return k;
        }
        case LengthSequence::Kind::Geometric: {
            const double q = L.ratio();
            const double a1 = L.total();
            double k = 1.0 + std::floor(std::log(x / a1) / std::log(q));
            k = std::max(k, 1.0);
            if (k < 1e15) {
                while (k > 1.0 && L.tail(k) < x) k -= 1.0;
                while (L.tail(k + 1.0) >= x) k += 1.0;
            }
            return k;
        }
        case LengthSequence::Kind::Explicit: {
            std::size_t lo = 1, hi = L.explicit_size() + 1;  // a_hi may be the residual
            while (lo < hi) {
                const std::size_t mid = (lo + hi + 1) / 2;
                if (L.tail(static_cast<double>(mid)) >= x) lo = mid;
                else hi = mid - 1;
            }
            return static_cast<double>(lo);
        }
    }
    return 1.0;
}

double string_distance(const LengthSequence& L, double x) {
    const double a1 = L.total();
    if (x <= 0.0) return -x;
    if (x >= a1) return x - a1;
    if (L.kind() == LengthSequence::Kind::Explicit) {
        const double floor_pt = L.tail(static_cast<double>(L.explicit_size() + 1));
        if (x <= floor_pt) {
            // Unresolved remainder [0, residual] is treated as solid.
            return L.tail_residual() > 0.0 ? 0.0 : x;
        }
    }
    const double k = string_index_at(L, x);
    const double upper = L.tail(k);
    const double lower = L.tail(k + 1.0);
    return std::max(0.0, std::min(x - lower, upper - x));
}

double cantor_distance(int m, double a, double x) {
    if (x <= 0.0) return -x;
    if (x >= 1.0) return x - 1.0;
    const double g = cantor_gap_ratio(m, a);
    double lo = 0.0;
    double len = 1.0;
    for (int level = 0; level < 4000; ++level) {
        if (len < 1e-300 || len <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) break;
        const double step = len * (a + g);
        double i = std::floor((x - lo) / step);
        i = std::clamp(i, 0.0, static_cast<double>(m - 1));
        const double sub_lo = lo + i * step;
        const double sub_hi = sub_lo + a * len;
        if (x < sub_lo) {
            const double prev_hi = sub_lo - step + a * len;
            return std::max(0.0, std::min(x - prev_hi, sub_lo - x));
        }
        if (x > sub_hi) {
            if (i >= m - 1) return x - sub_hi;
            return std::max(0.0, std::min(x - sub_hi, sub_lo + step - x));
        }
        lo = sub_lo;
        len *= a;
    }
    return std::max(0.0, std::min(x - lo, lo + len - x));
}

// Number of Cantor gap levels with length g a^k > w.
int cantor_levels_above(int m, double a, double w) {
    const double g = cantor_gap_ratio(m, a);
    if (w >= g) return 0;
    int n = static_cast<int>(std::ceil(std::log(w / g) / std::log(a)));
    n = std::max(n, 0);
    while (n > 0 && g * std::pow(a, n - 1) <= w) --n;
    while (g * std::pow(a, n) > w) ++n;
    return n;
}

std::vector<std::pair<double, double>> union_intervals(const DisjointUnion& u) {
    std::vector<std::pair<double, double>> iv;
    for (const auto& [set, offset] : u.components) {
        const auto& side = set.hull().sides.front();
        iv.emplace_back(side.lo + offset, side.hi + offset);
    }
    std::sort(iv.begin(), iv.end());
    return iv;
}

void require_1d(const FractalSet& set, const char* what) {
    if (!set.one_dimensional()) throw DomainError(std::string(what) + ": set is not one-dimensional");
}

}  // namespace

// --- LengthSequence -------------------------------------------------------

LengthSequence LengthSequence::explicit_lengths(std::vector<double> lengths, double tail_residual) {
    if (tail_residual < 0.0 || !std::isfinite(tail_residual)) throw DomainError("string: negative tail residual");
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i])) throw DomainError("string: lengths must be positive");
        if (i > 0 && lengths[i] > lengths[i - 1]) throw DomainError("string: lengths must be nonincreasing");
    }
    if (lengths.empty()) throw DomainError("string: no lengths");
    LengthSequence out;
    out.kind_ = Kind::Explicit;
    out.residual_ = tail_residual;
    out.suffix_.assign(lengths.size(), 0.0);
    double acc = tail_residual;
    for (std::size_t i = lengths.size(); i-- > 0;) {
        acc += lengths[i];
        out.suffix_[i] = acc;
    }
    out.lengths_ = std::move(lengths);
    return out;
}

LengthSequence LengthSequence::geometric(double first, double ratio) {
    if (!(first > 0.0) || !(ratio > 0.0 && ratio < 1.0)) throw DomainError("geometric string: need first > 0, 0 < ratio < 1");
    LengthSequence out;
    out.kind_ = Kind::Geometric;
    out.p_ = first;
    out.q_ = ratio;
    return out;
}

LengthSequence LengthSequence::power_law(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("a-string: need a > 0");
    LengthSequence out;
    out.kind_ = Kind::PowerLaw;
    out.p_ = a;
    return out;
}

double LengthSequence::length(double j) const {
    switch (kind_) {
        case Kind::Explicit: {
            const auto idx = static_cast<std::size_t>(j);
            return (idx >= 1 && idx <= lengths_.size()) ? lengths_[idx - 1] : 0.0;
        }
        case Kind::Geometric: return p_ * std::pow(q_, j - 1.0);
        case Kind::PowerLaw: return -std::pow(j, -p_) * std::expm1(-p_ * std::log1p(1.0 / j));
    }
    return 0.0;
}

double LengthSequence::tail(double k) const {
    switch (kind_) {
        case Kind::Explicit: {
            const auto idx = static_cast<std::size_t>(std::max(k, 1.0));
            return idx <= suffix_.size() ? suffix_[idx - 1] : residual_;
        }
        case Kind::Geometric: return p_ * std::pow(q_, k - 1.0) / (1.0 - q_);
        case Kind::PowerLaw: return std::pow(k, -p_);
    }
    return 0.0;
}

double LengthSequence::count_longer_than(double w) const {
    switch (kind_) {
        case Kind::Explicit: {
            auto it = std::partition_point(lengths_.begin(), lengths_.end(), [w](double l) { return l > w; });
            return static_cast<double>(it - lengths_.begin());
        }
        case Kind::Geometric: {
            if (w >= p_) return 0.0;
            double n = std::ceil(std::log(w / p_) / std::log(q_));
            if (n < 1e15) {
                while (n > 0.0 && length(n) <= w) n -= 1.0;
                while (length(n + 1.0) > w) n += 1.0;
            }
            return n;
        }
        case Kind::PowerLaw: {
            if (w >= length(1.0)) return 0.0;
            const double x0 = std::pow(p_ / w, 1.0 / (1.0 + p_));
            double lo = std::max(1.0, x0 - 1.0), hi = std::max(x0, 1.0);
            while (length(hi) > w) hi *= 2.0;
            for (int it = 0; it < 200 && hi - lo > std::max(1e-9, 4e-16 * hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                if (length(mid) > w) lo = mid;
                else hi = mid;
            }
            double n = std::floor(lo);
            if (n < 1e15) {
                while (n > 0.0 && length(n) <= w) n -= 1.0;
                while (length(n + 1.0) > w) n += 1.0;
            }
            return n;
        }
    }
    return 0.0;
}

LengthSequence make_length_sequence(const std::function<double(std::size_t)>& length, double tail_tol,
                                    std::size_t max_terms) {
    std::vector<double> terms;
    double ratio_max = 0.0;
    int window = 0;
    for (std::size_t j = 1; j <= max_terms; ++j) {
        const double l = length(j);
        if (l == 0.0) return LengthSequence::explicit_lengths(std::move(terms), 0.0);
        if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("string: lengths must be positive");
        if (!terms.empty() && l > terms.back()) throw DomainError("string: lengths must be nonincreasing");
        if (!terms.empty()) {
            const double r = l / terms.back();
            ratio_max = window == 0 ? r : std::max(ratio_max, r);
            window = std::min(window + 1, 16);
        }
        terms.push_back(l);
        if (window >= 16 && ratio_max < 1.0 - 1e-6) {
            const double bound = l * ratio_max / (1.0 - ratio_max);
            if (bound < tail_tol) return LengthSequence::explicit_lengths(std::move(terms), bound);
        }
        if (window >= 16 && (j % 16) == 0) window = 0;  // refresh the ratio window
    }
    throw DomainError("string: not summable (no geometric decay detected within term budget)");
}

// --- FractalSet -----------------------------------------------------------

const FractalSet::Variant& FractalSet::variant() const { return node_->shape; }
int FractalSet::ambient_dim() const { return node_->ambient; }
const Box& FractalSet::hull() const { return node_->hull; }
double FractalSet::dimension() const { return node_->dimension; }

std::string FractalSet::kind_name() const {
    return std::visit(overloaded{
                          [](const GeneralizedCantor&) { return std::string("cantor"); },
                          [](const AString&) { return std::string("astring"); },
                          [](const FractalString&) { return std::string("string"); },
                          [](const Sphere&) { return std::string("sphere"); },
                          [](const Grill&) { return std::string("grill"); },
                          [](const DisjointUnion&) { return std::string("union"); },
                          [](const Scaled&) { return std::string("scaled"); },
                      },
                      variant());
}

double cantor_dimension(int m, double a) { return std::log(static_cast<double>(m)) / std::log(1.0 / a); }

double cantor_gap_ratio(int m, double a) { return (1.0 - m * a) / (m - 1); }

FractalSet make_cantor(int m, double a) {
    if (m < 2) throw DomainError("cantor: need m >= 2");
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("cantor: need a > 0");
    if (!(m * a < 1.0)) throw DomainError("cantor: m*a >= 1 (subintervals would overlap)");
    return make_node(GeneralizedCantor{m, a}, 1, interval_box(0.0, 1.0), cantor_dimension(m, a));
}

FractalSet make_astring(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("astring: need a > 0");
    return make_node(AString{a}, 1, interval_box(0.0, 1.0), 1.0 / (1.0 + a));
}

FractalSet make_fractal_string(LengthSequence lengths) {
    double D = 0.0;
    if (lengths.kind() == LengthSequence::Kind::PowerLaw) D = 1.0 / (1.0 + lengths.exponent());
    const double top = lengths.total();
    return make_node(FractalString{std::move(lengths)}, 1, interval_box(0.0, top), D);
}

FractalSet make_sphere(int N) {
    if (N < 1) throw DomainError("sphere: need N >= 1");
    Box b;
    b.sides.assign(static_cast<std::size_t>(N), Interval{-1.0, 1.0});
    return make_node(Sphere{N}, N, std::move(b), N - 1.0);
}

FractalSet make_grill(const FractalSet& base, int d, double side) {
    if (d < 0) throw DomainError("grill: need d >= 0");
    if (!(side > 0.0)) throw DomainError("grill: need side > 0");
    if (d == 0) return base;
    Box b = base.hull();
    for (int i = 0; i < d; ++i) b.sides.push_back(Interval{0.0, side});
    return make_node(Grill{base, d, side}, base.ambient_dim() + d, std::move(b), base.dimension() + d);
}

FractalSet make_union(std::vector<std::pair<FractalSet, double>> components) {
    if (components.empty()) throw DomainError("union: no components");
    const int N = components.front().first.ambient_dim();
    Box b = components.front().first.hull();
    b.sides[0].lo += components.front().second;
    b.sides[0].hi += components.front().second;
    double D = 0.0;
    for (const auto& [set, offset] : components) {
        if (set.ambient_dim() != N) throw DomainError("union: components live in different dimensions");
        if (!std::isfinite(offset)) throw DomainError("union: non-finite translation");
        const auto& h = set.hull();
        b.sides[0].lo = std::min(b.sides[0].lo, h.sides[0].lo + offset);
        b.sides[0].hi = std::max(b.sides[0].hi, h.sides[0].hi + offset);
        for (int i = 1; i < N; ++i) {
            b.sides[i].lo = std::min(b.sides[i].lo, h.sides[i].lo);
            b.sides[i].hi = std::max(b.sides[i].hi, h.sides[i].hi);
        }
        D = std::max(D, set.dimension());
    }
    DisjointUnion u{std::move(components)};
    const auto iv = union_intervals(u);
    for (std::size_t i = 1; i < iv.size(); ++i) {
        if (!(iv[i].first > iv[i - 1].second)) throw DomainError("union: component hulls overlap");
    }
    return make_node(std::move(u), N, std::move(b), D);
}

FractalSet scale(const FractalSet& set, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("scale: need lambda > 0");
    if (lambda == 1.0) return set;
    if (auto* s = std::get_if<Scaled>(&set.variant())) return scale(s->base, s->lambda * lambda);
    Box b = set.hull();
    for (auto& side : b.sides) {
        side.lo *= lambda;
        side.hi *= lambda;
    }
    return make_node(Scaled{set, lambda}, set.ambient_dim(), std::move(b), set.dimension());
}

// --- distance -------------------------------------------------------------

double distance(const FractalSet& set, std::span<const double> x) {
    if (static_cast<int>(x.size()) != set.ambient_dim()) throw DomainError("distance: point has wrong dimension");
    return std::visit(
        overloaded{
            [&](const GeneralizedCantor& c) { return cantor_distance(c.m, c.a, x[0]); },
            [&](const AString& s) { return string_distance(LengthSequence::power_law(s.a), x[0]); },
            [&](const FractalString& s) { return string_distance(s.lengths, x[0]); },
            [&](const Sphere&) {
                double r2 = 0.0;
                for (double v : x) r2 += v * v;
                return std::abs(std::sqrt(r2) - 1.0);
            },
            [&](const Grill& g) {
                const int N = g.base.ambient_dim();
                const double db = distance(g.base, x.subspan(0, static_cast<std::size_t>(N)));
                double acc = db * db;
                for (std::size_t i = static_cast<std::size_t>(N); i < x.size(); ++i) {
                    const double e = std::max({0.0, -x[i], x[i] - g.side});
                    acc += e * e;
                }
                return std::sqrt(acc);
            },
            [&](const DisjointUnion& u) {
                std::vector<double> y(x.begin(), x.end());
                double best = std::numeric_limits<double>::infinity();
                for (const auto& [comp, offset] : u.components) {
                    y[0] = x[0] - offset;
                    best = std::min(best, distance(comp, y));
                }
                return best;
            },
            [&](const Scaled& s) {
                std::vector<double> y(x.begin(), x.end());
                for (double& v : y) v /= s.lambda;
                return s.lambda * distance(s.base, y);
            },
        },
        set.variant());
}

double distance(const FractalSet& set, double x) {
    const double p[1] = {x};
    return distance(set, std::span<const double>(p, 1));
}

// --- gap structure --------------------------------------------------------

void for_each_gap_level(const FractalSet& set, double min_length,
                        const std::function<void(double, double)>& fn) {
    require_1d(set, "gap levels");
    std::visit(overloaded{
                   [&](const GeneralizedCantor& c) {
                       const double g = cantor_gap_ratio(c.m, c.a);
                       const int n = cantor_levels_above(c.m, c.a, min_length);
                       for (int k = 0; k < n; ++k) fn(g * std::pow(c.a, k), (c.m - 1) * std::pow(c.m, k));
                   },
                   [&](const Sphere&) {
                       if (2.0 > min_length) fn(2.0, 1.0);
                   },
                   [&](const DisjointUnion& u) {
                       for (const auto& [comp, offset] : u.components) for_each_gap_level(comp, min_length, fn);
                       const auto iv = union_intervals(u);
                       for (std::size_t i = 1; i < iv.size(); ++i) {
                           const double gap = iv[i].first - iv[i - 1].second;
                           if (gap > min_length) fn(gap, 1.0);
                       }
                   },
                   [&](const Scaled& s) {
                       for_each_gap_level(s.base, min_length / s.lambda,
                                          [&](double g, double n) { fn(s.lambda * g, n); });
                   },
                   [&](const Grill&) {},
                   [&](const auto&) {
                       LengthSequence scratch;
                       const LengthSequence* L = string_lengths(set, scratch);
                       const double J = L->count_longer_than(min_length);
                       if (J > 1e8) throw DomainError("gap levels: too many gaps above the requested length");
                       for (double j = 1.0; j <= J; j += 1.0) fn(L->length(j), 1.0);
                   },
               },
               set.variant());
}

std::vector<GapLevel> gap_table(const FractalSet& set, double min_length) {
    std::vector<GapLevel> levels;
    for_each_gap_level(set, min_length, [&](double g, double n) { levels.push_back({g, n}); });
    std::stable_sort(levels.begin(), levels.end(), [](const GapLevel& x, const GapLevel& y) { return x.length > y.length; });
    std::vector<GapLevel> merged;
    for (const auto& lv : levels) {
        if (!merged.empty() && std::abs(merged.back().length - lv.length) <= 1e-12 * lv.length) {
            merged.back().count += lv.count;
        } else {
            merged.push_back(lv);
        }
    }
    return merged;
}

double gap_cover(const FractalSet& set, double w) {
    require_1d(set, "gap cover");
    if (!(w > 0.0)) return 0.0;
    return std::visit(overloaded{
                          [&](const GeneralizedCantor& c) {
                              const int n = cantor_levels_above(c.m, c.a, w);
                              // Gaps above w contribute w each; the rest sum to (m a)^n.
                              return w * (std::pow(c.m, n) - 1.0) + std::pow(c.m * c.a, n);
                          },
                          [&](const Sphere&) { return std::min(2.0, w); },
                          [&](const DisjointUnion& u) {
                              double acc = 0.0;
                              for (const auto& [comp, offset] : u.components) acc += gap_cover(comp, w);
                              const auto iv = union_intervals(u);
                              for (std::size_t i = 1; i < iv.size(); ++i) acc += std::min(iv[i].first - iv[i - 1].second, w);
                              return acc;
                          },
                          [&](const Scaled& s) { return s.lambda * gap_cover(s.base, w / s.lambda); },
                          [&](const Grill&) { return 0.0; },
                          [&](const auto&) {
                              LengthSequence scratch;
                              const LengthSequence* L = string_lengths(set, scratch);
                              const double J = L->count_longer_than(w);
                              return w * J + L->tail(J + 1.0);
                          },
                      },
                      set.variant());
}

double small_gap_sum(const FractalSet& set, double w) {
    require_1d(set, "small gap sum");
    return std::visit(overloaded{
                          [&](const GeneralizedCantor& c) {
                              return std::pow(c.m * c.a, cantor_levels_above(c.m, c.a, w));
                          },
                          [&](const Sphere&) { return w >= 2.0 ? 2.0 : 0.0; },
                          [&](const DisjointUnion& u) {
                              double acc = 0.0;
                              for (const auto& [comp, offset] : u.components) acc += small_gap_sum(comp, w);
                              const auto iv = union_intervals(u);
                              for (std::size_t i = 1; i < iv.size(); ++i) {
                                  const double gap = iv[i].first - iv[i - 1].second;
                                  if (gap <= w) acc += gap;
                              }
                              return acc;
                          },
                          [&](const Scaled& s) { return s.lambda * small_gap_sum(s.base, w / s.lambda); },
                          [&](const Grill&) { return 0.0; },
                          [&](const auto&) {
                              LengthSequence scratch;
                              const LengthSequence* L = string_lengths(set, scratch);
                              return L->tail(L->count_longer_than(w) + 1.0);
                          },
                      },
                      set.variant());
}

double set_measure(const FractalSet& set) {
    require_1d(set, "set measure");
    return 0.0;
}

}  // namespace fzeta
