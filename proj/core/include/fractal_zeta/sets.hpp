#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fzeta {

// Invalid construction parameters (m*a >= 1, N < 1, overlapping hulls, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

// Axis-aligned bounding box, one interval per coordinate.
struct Box {
    std::vector<Interval> sides;
};

// Nonincreasing, summable lengths l_1 >= l_2 >= ... of a fractal string.
// Indices are 1-based. Infinite families carry a smooth extension in the
// index so tails and counts work at indices far beyond 2^53.
class LengthSequence {
public:
    enum class Kind { Explicit, Geometric, PowerLaw };

    // Finite list; `tail_residual` is the mass of a truncated remainder that
    // is not resolved into individual lengths.
    static LengthSequence explicit_lengths(std::vector<double> lengths, double tail_residual = 0.0);
    // l_j = first * ratio^(j-1), 0 < ratio < 1.
    static LengthSequence geometric(double first, double ratio);
    // l_j = j^-a - (j+1)^-a, the a-string.
    static LengthSequence power_law(double a);

    Kind kind() const { return kind_; }
    bool infinite() const { return kind_ != Kind::Explicit; }
    std::size_t explicit_size() const { return lengths_.size(); }
    double tail_residual() const { return residual_; }
    double first() const { return p_; }
    double ratio() const { return q_; }
    double exponent() const { return p_; }

    double length(double j) const;     // l_j; smooth in j for infinite kinds
    double tail(double k) const;       // a_k = sum_{j >= k} l_j
    double total() const { return tail(1.0); }
    // #{j : l_j > w}. Returned as double since it may exceed 2^53.
    double count_longer_than(double w) const;

private:
    Kind kind_ = Kind::Explicit;
    std::vector<double> lengths_;
    std::vector<double> suffix_;  // suffix_[k-1] = a_k for explicit lists
    double residual_ = 0.0;
    double p_ = 0.0;
    double q_ = 0.0;
};

// Validates a generic summable sequence given term by term. Geometric decay
// is detected by the ratio test and the remainder is folded into the tail
// residual once it drops below `tail_tol`; anything else that has not become
// negligible by `max_terms` is rejected as not summable.
LengthSequence make_length_sequence(const std::function<double(std::size_t)>& length,
                                    double tail_tol = 1e-15, std::size_t max_terms = 1000000);

class FractalSet;
struct GeneralizedCantor;
struct AString;
struct FractalString;
struct Sphere;
struct Grill;
struct DisjointUnion;
struct Scaled;

// Immutable, cheaply copyable handle to a compact set.
class FractalSet {
public:
    using Variant = std::variant<GeneralizedCantor, AString, FractalString, Sphere, Grill,
                                 DisjointUnion, Scaled>;
    struct Node;

    explicit FractalSet(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    const Variant& variant() const;
    int ambient_dim() const;
    const Box& hull() const;
    // Known (upper) box dimension of the family.
    double dimension() const;
    std::string kind_name() const;
    bool one_dimensional() const { return ambient_dim() == 1; }

private:
    std::shared_ptr<const Node> node_;
};

struct GeneralizedCantor {
    int m;
    double a;
};

struct AString {
    double a;
};

struct FractalString {
    LengthSequence lengths;
};

struct Sphere {
    int N;
};

// base x [0, side]^d in R^(N + d).
struct Grill {
    FractalSet base;
    int d;
    double side;
};

// Components translated along the first axis; hulls pairwise disjoint.
struct DisjointUnion {
    std::vector<std::pair<FractalSet, double>> components;
};

// lambda * base, scaling about the origin.
struct Scaled {
    FractalSet base;
    double lambda;
};

struct FractalSet::Node {
    Variant shape;
    int ambient = 1;
    Box hull;
    double dimension = 0.0;
};

FractalSet make_cantor(int m, double a);
FractalSet make_astring(double a);
FractalSet make_fractal_string(LengthSequence lengths);
FractalSet make_sphere(int N);
FractalSet make_grill(const FractalSet& base, int d, double side = 1.0);
FractalSet make_union(std::vector<std::pair<FractalSet, double>> components);
FractalSet scale(const FractalSet& set, double lambda);

double cantor_dimension(int m, double a);
// Gap between consecutive level-one subintervals of C^(m,a): (1 - m a)/(m - 1).
double cantor_gap_ratio(int m, double a);

double distance(const FractalSet& set, std::span<const double> x);
double distance(const FractalSet& set, double x);

// One-dimensional sets: the complement of A inside its hull is a disjoint
// union of open gaps. A level groups all gaps of one length.
struct GapLevel {
    double length;
    double count;
};

// Visits every gap level with length > min_length. Order is family specific.
void for_each_gap_level(const FractalSet& set, double min_length,
                        const std::function<void(double length, double count)>& fn);

// Gap levels sorted by decreasing length, merged by length.
std::vector<GapLevel> gap_table(const FractalSet& set, double min_length);

// sum over gaps of min(g, w). Exact for every 1-D family, including the
// infinitely many gaps shorter than w.
double gap_cover(const FractalSet& set, double w);

// sum over gaps with g <= w of g.
double small_gap_sum(const FractalSet& set, double w);

// Total gap length minus hull length is zero for every supported 1-D family;
// this returns the Lebesgue measure of A itself (always 0 here).
double set_measure(const FractalSet& set);

}  // namespace fzeta
