#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sumrange/rational.hpp"

namespace sumrange {

/// One of the unit cubes [0,1]^omega whose disjoint union carries the functions.
struct CubeId {
    int index = 1;

    std::string name() const { return "Q" + std::to_string(index); }
    auto operator<=>(const CubeId&) const = default;
};

/// Ordered list of cubes a function is defined on.
using Domain = std::vector<CubeId>;

/// Q1, ..., Qn.
Domain make_domain(int cube_count);

/// Half-open sub-interval [lo, hi) of [0, 1].
struct Interval {
    Rational lo;
    Rational hi;

    Interval(Rational lo_, Rational hi_);

    Rational length() const { return hi - lo; }
    bool contains(const Rational& x) const { return lo <= x && x < hi; }
    bool is_full() const { return lo.is_zero() && hi == Rational(1); }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// A coordinate box on one cube: unconstrained coordinates range over [0, 1).
struct Box {
    CubeId cube;
    std::map<int, Interval> constraints;

    Rational measure() const;
    friend bool operator==(const Box&, const Box&) = default;
};

struct Term {
    Box box;
    Rational value;

    friend bool operator==(const Term&, const Term&) = default;
};

/// (cube, coordinate index) pair.
struct Coordinate {
    CubeId cube;
    int index = 0;

    auto operator<=>(const Coordinate&) const = default;
};

using CoordinateFootprint = std::set<Coordinate>;

namespace detail {
struct Node;
using NodePtr = std::shared_ptr<const Node>;
} // namespace detail

/// A cylinder step function: finitely many rational values on a finite set
/// of disjoint rational boxes, per cube of its domain.
///
/// Internally each cube holds a canonical decision tree that splits on
/// coordinates in increasing index order. Along every split the pieces are
/// sorted, disjoint, non-zero, and adjacent pieces with equal subtrees are
/// merged; a split that would cover [0,1) with one piece is elided. The tree
/// is therefore unique for a function up to null sets, so structural
/// equality is almost-everywhere equality and the coordinates present in the
/// tree are exactly the ones the function depends on.
class StepFunction {
public:
    StepFunction() = default;
    explicit StepFunction(Domain domain);

    static StepFunction zero(Domain domain) { return StepFunction(std::move(domain)); }
    static StepFunction constant(Domain domain, CubeId cube, const Rational& value);
    static StepFunction constant_everywhere(Domain domain, const Rational& value);
    static StepFunction box(Domain domain, const Box& box, const Rational& value);
    /// Sum of the given weighted boxes; overlapping boxes add up.
    static StepFunction from_terms(Domain domain, std::span<const Term> terms);

    const Domain& domain() const noexcept { return domain_; }
    bool is_zero() const noexcept;
    bool is_zero_on(CubeId cube) const;

    /// Canonical disjoint boxes with non-zero values, cube by cube.
    std::vector<Term> terms() const;
    std::size_t box_count() const noexcept;
    std::size_t box_count(CubeId cube) const;

    StepFunction restricted_to(CubeId cube) const;

    /// Value at a point of a cube; coordinates absent from the map are read as 0.
    Rational evaluate(CubeId cube, const std::map<int, Rational>& point) const;

    /// Values attained on sets of positive measure on the cube (0 included when it is).
    std::set<Rational> value_set(CubeId cube) const;

    /// Almost-everywhere equality; false when the domains differ.
    friend bool operator==(const StepFunction& a, const StepFunction& b);

    // Tree access for the algebra in step_function.cpp.
    const detail::NodePtr& root(std::size_t pos) const { return roots_[pos]; }
    std::size_t cube_position(CubeId cube) const;
    static StepFunction from_roots(Domain domain, std::vector<detail::NodePtr> roots);

private:
    Domain domain_;
    std::vector<detail::NodePtr> roots_;
};

StepFunction add(const StepFunction& f, const StepFunction& g);
StepFunction subtract(const StepFunction& f, const StepFunction& g);
StepFunction scale(const StepFunction& f, const Rational& c);
StepFunction multiply(const StepFunction& f, const StepFunction& g);

inline StepFunction operator+(const StepFunction& f, const StepFunction& g) { return add(f, g); }
inline StepFunction operator-(const StepFunction& f, const StepFunction& g) { return subtract(f, g); }
inline StepFunction operator-(const StepFunction& f) { return scale(f, Rational(-1)); }
inline StepFunction operator*(const StepFunction& f, const StepFunction& g) { return multiply(f, g); }
inline StepFunction operator*(const Rational& c, const StepFunction& f) { return scale(f, c); }

/// Sum of many functions on one domain, combined pairwise.
StepFunction sum(Domain domain, std::span<const StepFunction> parts);

/// Integral of |f|^p over the whole domain (p >= 1). The L_p norm is its p-th root.
Rational moment(const StepFunction& f, unsigned p = 1);
/// Integral of |f|^p over one cube.
Rational moment(const StepFunction& f, CubeId cube, unsigned p = 1);
/// Integral of |f - c|^p over one cube, without materializing f - c.
Rational deviation_moment(const StepFunction& f, CubeId cube, const Rational& c, unsigned p = 1);

/// deviation_moment(f + delta, ...) - deviation_moment(f, ...), visiting only the support of delta.
Rational deviation_change(const StepFunction& f, const StepFunction& delta, CubeId cube, const Rational& c,
                          unsigned p = 1);

Rational sup_norm(const StepFunction& f);
Rational integral(const StepFunction& f, CubeId cube);
Rational support_measure(const StepFunction& f, CubeId cube);

/// Same as ==, but mismatched domains are a DomainError.
bool canonical_equals(const StepFunction& f, const StepFunction& g);

CoordinateFootprint footprint(const StepFunction& f);
/// Coordinate indices the function depends on within one cube.
std::set<int> footprint(const StepFunction& f, CubeId cube);

} // namespace sumrange
