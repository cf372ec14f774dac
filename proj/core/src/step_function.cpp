#include "sumrange/step_function.hpp"

#include <algorithm>
#include <climits>
#include <utility>

#include "sumrange/errors.hpp"

namespace sumrange {
namespace detail {

struct Piece {
    Rational lo;
    Rational hi;
    NodePtr child;
};

// coord == 0 marks a leaf. Coordinates are 1-based.
struct Node {
    int coord = 0;
    Rational value;
    std::vector<Piece> pieces;
    std::size_t leaves = 1;
};

} // namespace detail

namespace {

using detail::Node;
using detail::NodePtr;
using detail::Piece;

constexpr int kLeafCoord = INT_MAX;

int top_coord(const NodePtr& n) { return n->coord == 0 ? kLeafCoord : n->coord; }

NodePtr make_leaf(Rational v)
{
    if (v.is_zero()) return nullptr;
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    return n;
}

bool nodes_equal(const NodePtr& a, const NodePtr& b)
{
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->coord != b->coord) return false;
    if (a->coord == 0) return a->value == b->value;
    if (a->pieces.size() != b->pieces.size()) return false;
    for (std::size_t i = 0; i < a->pieces.size(); ++i) {
        const Piece& p = a->pieces[i];
        const Piece& q = b->pieces[i];
        if (p.lo != q.lo || p.hi != q.hi || !nodes_equal(p.child, q.child)) return false;
    }
    return true;
}

// Builds a split node from already-merged pieces, eliding trivial splits.
NodePtr make_split(int coord, std::vector<Piece> pieces)
{
    if (pieces.empty()) return nullptr;
    if (pieces.size() == 1 && pieces[0].lo.is_zero() && pieces[0].hi == Rational(1)) {
        return pieces[0].child;
    }
    auto n = std::make_shared<Node>();
    n->coord = coord;
    n->pieces = std::move(pieces);
    n->leaves = 0;
    for (const Piece& p : n->pieces) n->leaves += p.child->leaves;
    return n;
}

void push_merged(std::vector<Piece>& out, const Rational& lo, const Rational& hi, NodePtr child)
{
    if (!child) return;
    if (!out.empty() && out.back().hi == lo && nodes_equal(out.back().child, child)) {
        out.back().hi = hi;
        return;
    }
    out.push_back(Piece{lo, hi, std::move(child)});
}

template <typename Fn>
NodePtr map_leaves(const NodePtr& n, const Fn& fn)
{
    if (!n) return nullptr;
    if (n->coord == 0) return make_leaf(fn(n->value));
    std::vector<Piece> pieces;
    pieces.reserve(n->pieces.size());
    for (const Piece& p : n->pieces) {
        push_merged(pieces, p.lo, p.hi, map_leaves(p.child, fn));
    }
    return make_split(n->coord, std::move(pieces));
}

enum class Op { Add, Mul };

NodePtr combine(const NodePtr& a, const NodePtr& b, Op op)
{
    if (op == Op::Add) {
        if (!a) return b;
        if (!b) return a;
    } else {
        if (!a || !b) return nullptr;
        if (a->coord == 0) {
            const Rational& c = a->value;
            return map_leaves(b, [&](const Rational& v) { return c * v; });
        }
        if (b->coord == 0) {
            const Rational& c = b->value;
            return map_leaves(a, [&](const Rational& v) { return v * c; });
        }
    }
    if (a->coord == 0 && b->coord == 0) {
        return make_leaf(op == Op::Add ? a->value + b->value : a->value * b->value);
    }

    const int coord = std::min(top_coord(a), top_coord(b));
    std::vector<Piece> whole_a;
    std::vector<Piece> whole_b;
    if (a->coord != coord) whole_a.push_back(Piece{Rational(0), Rational(1), a});
    if (b->coord != coord) whole_b.push_back(Piece{Rational(0), Rational(1), b});
    const std::vector<Piece>& pa = a->coord == coord ? a->pieces : whole_a;
    const std::vector<Piece>& pb = b->coord == coord ? b->pieces : whole_b;

    // Linear sweep over both sorted piece lists.
    std::vector<Piece> out;
    out.reserve(pa.size() + pb.size());
    Rational pos(0);
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (true) {
        while (ia < pa.size() && pa[ia].hi <= pos) ++ia;
        while (ib < pb.size() && pb[ib].hi <= pos) ++ib;
        if (ia == pa.size() && ib == pb.size()) break;
        const bool in_a = ia < pa.size() && pa[ia].lo <= pos;
        const bool in_b = ib < pb.size() && pb[ib].lo <= pos;
        Rational next(1);
        if (ia < pa.size()) next = std::min(next, in_a ? pa[ia].hi : pa[ia].lo);
        if (ib < pb.size()) next = std::min(next, in_b ? pb[ib].hi : pb[ib].lo);
        if (in_a || in_b) {
            if (op == Op::Add || (in_a && in_b)) {
                push_merged(out, pos, next,
                            combine(in_a ? pa[ia].child : nullptr, in_b ? pb[ib].child : nullptr, op));
            }
        }
        pos = std::move(next);
    }
    return make_split(coord, std::move(out));
}

NodePtr box_chain(const Box& box, const Rational& value)
{
    NodePtr node = make_leaf(value);
    if (!node) return nullptr;
    for (auto it = box.constraints.rbegin(); it != box.constraints.rend(); ++it) {
        if (it->first < 1) {
            throw DomainError("coordinate indices are 1-based, got " + std::to_string(it->first));
        }
        if (it->second.is_full()) continue;
        std::vector<Piece> pieces{Piece{it->second.lo, it->second.hi, node}};
        node = make_split(it->first, std::move(pieces));
    }
    return node;
}

NodePtr sum_range(std::vector<NodePtr>& nodes, std::size_t lo, std::size_t hi)
{
    if (hi - lo == 0) return nullptr;
    if (hi - lo == 1) return nodes[lo];
    std::size_t mid = lo + (hi - lo) / 2;
    return combine(sum_range(nodes, lo, mid), sum_range(nodes, mid, hi), Op::Add);
}

Rational node_moment(const NodePtr& n, unsigned p)
{
    if (!n) return Rational(0);
    if (n->coord == 0) return n->value.abs().pow(p);
    Rational total;
    for (const Piece& piece : n->pieces) {
        total += (piece.hi - piece.lo) * node_moment(piece.child, p);
    }
    return total;
}

Rational node_deviation(const NodePtr& n, const Rational& c, const Rational& c_pow, unsigned p)
{
    if (!n) return c_pow;
    if (n->coord == 0) return (n->value - c).abs().pow(p);
    Rational total;
    Rational covered;
    for (const Piece& piece : n->pieces) {
        Rational len = piece.hi - piece.lo;
        covered += len;
        total += len * node_deviation(piece.child, c, c_pow, p);
    }
    if (!c_pow.is_zero()) total += (Rational(1) - covered) * c_pow;
    return total;
}

// Integral of |s + d - c|^p - |s - c|^p; only the support of d is visited.
Rational node_delta(const NodePtr& s, const NodePtr& d, const Rational& c, unsigned p)
{
    if (!d) return Rational(0);
    auto f = [&](const Rational& x) { return (x - c).abs().pow(p); };
    if (d->coord == 0) {
        const Rational& v = d->value;
        if (!s) return f(v) - f(Rational(0));
        if (s->coord == 0) return f(s->value + v) - f(s->value);
        Rational total;
        Rational covered;
        for (const Piece& piece : s->pieces) {
            Rational len = piece.hi - piece.lo;
            covered += len;
            total += len * node_delta(piece.child, d, c, p);
        }
        total += (Rational(1) - covered) * (f(v) - f(Rational(0)));
        return total;
    }
    const int k = d->coord;
    if (!s || top_coord(s) > k) {
        Rational total;
        for (const Piece& piece : d->pieces) total += (piece.hi - piece.lo) * node_delta(s, piece.child, c, p);
        return total;
    }
    if (s->coord < k) {
        Rational total;
        Rational covered;
        for (const Piece& piece : s->pieces) {
            Rational len = piece.hi - piece.lo;
            covered += len;
            total += len * node_delta(piece.child, d, c, p);
        }
        if (covered < Rational(1)) total += (Rational(1) - covered) * node_delta(nullptr, d, c, p);
        return total;
    }
    Rational total;
    std::size_t is = 0;
    for (const Piece& piece : d->pieces) {
        Rational pos = piece.lo;
        while (is < s->pieces.size() && s->pieces[is].hi <= pos) ++is;
        std::size_t j = is;
        while (pos < piece.hi) {
            if (j < s->pieces.size() && s->pieces[j].lo < piece.hi) {
                const Piece& sp = s->pieces[j];
                if (sp.lo > pos) {
                    total += (sp.lo - pos) * node_delta(nullptr, piece.child, c, p);
                    pos = sp.lo;
                }
                Rational hi = std::min(sp.hi, piece.hi);
                total += (hi - pos) * node_delta(sp.child, piece.child, c, p);
                pos = hi;
                if (sp.hi <= piece.hi) ++j;
            } else {
                total += (piece.hi - pos) * node_delta(nullptr, piece.child, c, p);
                pos = piece.hi;
            }
        }
    }
    return total;
}

Rational node_integral(const NodePtr& n)
{
    if (!n) return Rational(0);
    if (n->coord == 0) return n->value;
    Rational total;
    for (const Piece& piece : n->pieces) {
        total += (piece.hi - piece.lo) * node_integral(piece.child);
    }
    return total;
}

Rational node_support(const NodePtr& n)
{
    if (!n) return Rational(0);
    if (n->coord == 0) return Rational(1);
    Rational total;
    for (const Piece& piece : n->pieces) {
        total += (piece.hi - piece.lo) * node_support(piece.child);
    }
    return total;
}

void node_sup(const NodePtr& n, Rational& best)
{
    if (!n) return;
    if (n->coord == 0) {
        Rational a = n->value.abs();
        if (a > best) best = a;
        return;
    }
    for (const Piece& piece : n->pieces) node_sup(piece.child, best);
}

void node_coords(const NodePtr& n, std::set<int>& out)
{
    if (!n || n->coord == 0) return;
    out.insert(n->coord);
    for (const Piece& piece : n->pieces) node_coords(piece.child, out);
}

std::size_t node_leaves(const NodePtr& n) { return n ? n->leaves : 0; }

void node_terms(const NodePtr& n, CubeId cube, std::map<int, Interval>& path, std::vector<Term>& out)
{
    if (!n) return;
    if (n->coord == 0) {
        out.push_back(Term{Box{cube, path}, n->value});
        return;
    }
    for (const Piece& piece : n->pieces) {
        path.insert_or_assign(n->coord, Interval(piece.lo, piece.hi));
        node_terms(piece.child, cube, path, out);
    }
    path.erase(n->coord);
}

void node_values(const NodePtr& n, std::set<Rational>& out)
{
    if (!n) {
        out.insert(Rational(0));
        return;
    }
    if (n->coord == 0) {
        out.insert(n->value);
        return;
    }
    Rational covered;
    for (const Piece& piece : n->pieces) {
        covered += piece.hi - piece.lo;
        node_values(piece.child, out);
    }
    if (covered < Rational(1)) out.insert(Rational(0));
}

void require_same_domain(const StepFunction& f, const StepFunction& g)
{
    if (f.domain() != g.domain()) {
        throw DomainError("step functions live on different cube lists");
    }
}

template <typename Fn>
StepFunction zip(const StepFunction& f, const StepFunction& g, const Fn& fn)
{
    require_same_domain(f, g);
    std::vector<NodePtr> roots;
    roots.reserve(f.domain().size());
    for (std::size_t i = 0; i < f.domain().size(); ++i) {
        roots.push_back(fn(f.root(i), g.root(i)));
    }
    return StepFunction::from_roots(f.domain(), std::move(roots));
}

} // namespace

Domain make_domain(int cube_count)
{
    if (cube_count < 1) {
        throw ConfigError("a domain needs at least one cube");
    }
    Domain d;
    for (int i = 1; i <= cube_count; ++i) d.push_back(CubeId{i});
    return d;
}

Interval::Interval(Rational lo_, Rational hi_) : lo(std::move(lo_)), hi(std::move(hi_))
{
    if (lo.sign() < 0 || hi > Rational(1) || !(lo < hi)) {
        throw DomainError("interval [" + lo.str() + ", " + hi.str() + ") is not a non-empty subset of [0,1)");
    }
}

Rational Box::measure() const
{
    Rational m(1);
    for (const auto& [coord, iv] : constraints) m *= iv.length();
    return m;
}

StepFunction::StepFunction(Domain domain) : domain_(std::move(domain)), roots_(domain_.size())
{
    for (std::size_t i = 1; i < domain_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (domain_[i] == domain_[j]) throw DomainError("duplicate cube " + domain_[i].name() + " in domain");
        }
    }
}

StepFunction StepFunction::from_roots(Domain domain, std::vector<NodePtr> roots)
{
    StepFunction f;
    f.domain_ = std::move(domain);
    f.roots_ = std::move(roots);
    return f;
}

std::size_t StepFunction::cube_position(CubeId cube) const
{
    for (std::size_t i = 0; i < domain_.size(); ++i) {
        if (domain_[i] == cube) return i;
    }
    throw DomainError("cube " + cube.name() + " is not part of the domain");
}

StepFunction StepFunction::constant(Domain domain, CubeId cube, const Rational& value)
{
    StepFunction f(std::move(domain));
    f.roots_[f.cube_position(cube)] = make_leaf(value);
    return f;
}

StepFunction StepFunction::constant_everywhere(Domain domain, const Rational& value)
{
    StepFunction f(std::move(domain));
    for (auto& r : f.roots_) r = make_leaf(value);
    return f;
}

StepFunction StepFunction::box(Domain domain, const Box& box, const Rational& value)
{
    StepFunction f(std::move(domain));
    f.roots_[f.cube_position(box.cube)] = box_chain(box, value);
    return f;
}

StepFunction StepFunction::from_terms(Domain domain, std::span<const Term> terms)
{
    StepFunction f(std::move(domain));
    std::vector<std::vector<NodePtr>> per_cube(f.domain_.size());
    for (const Term& t : terms) {
        per_cube[f.cube_position(t.box.cube)].push_back(box_chain(t.box, t.value));
    }
    for (std::size_t i = 0; i < per_cube.size(); ++i) {
        f.roots_[i] = sum_range(per_cube[i], 0, per_cube[i].size());
    }
    return f;
}

bool StepFunction::is_zero() const noexcept
{
    return std::all_of(roots_.begin(), roots_.end(), [](const NodePtr& r) { return !r; });
}

bool StepFunction::is_zero_on(CubeId cube) const { return !roots_[cube_position(cube)]; }

std::vector<Term> StepFunction::terms() const
{
    std::vector<Term> out;
    for (std::size_t i = 0; i < domain_.size(); ++i) {
        std::map<int, Interval> path;
        node_terms(roots_[i], domain_[i], path, out);
    }
    return out;
}

std::size_t StepFunction::box_count() const noexcept
{
    std::size_t total = 0;
    for (const auto& r : roots_) total += node_leaves(r);
    return total;
}

std::size_t StepFunction::box_count(CubeId cube) const { return node_leaves(roots_[cube_position(cube)]); }

StepFunction StepFunction::restricted_to(CubeId cube) const
{
    StepFunction f(domain_);
    std::size_t pos = cube_position(cube);
    f.roots_[pos] = roots_[pos];
    return f;
}

Rational StepFunction::evaluate(CubeId cube, const std::map<int, Rational>& point) const
{
    NodePtr n = roots_[cube_position(cube)];
    while (n && n->coord != 0) {
        auto it = point.find(n->coord);
        Rational x = it == point.end() ? Rational(0) : it->second;
        NodePtr next;
        for (const Piece& piece : n->pieces) {
            if (piece.lo <= x && x < piece.hi) {
                next = piece.child;
                break;
            }
        }
        n = next;
    }
    return n ? n->value : Rational(0);
}

std::set<Rational> StepFunction::value_set(CubeId cube) const
{
    std::set<Rational> out;
    node_values(roots_[cube_position(cube)], out);
    return out;
}

bool operator==(const StepFunction& a, const StepFunction& b)
{
    if (a.domain_ != b.domain_) return false;
    for (std::size_t i = 0; i < a.roots_.size(); ++i) {
        if (!nodes_equal(a.roots_[i], b.roots_[i])) return false;
    }
    return true;
}

StepFunction add(const StepFunction& f, const StepFunction& g)
{
    return zip(f, g, [](const NodePtr& a, const NodePtr& b) { return combine(a, b, Op::Add); });
}

StepFunction subtract(const StepFunction& f, const StepFunction& g) { return add(f, scale(g, Rational(-1))); }

StepFunction scale(const StepFunction& f, const Rational& c)
{
    std::vector<NodePtr> roots(f.domain().size());
    if (!c.is_zero()) {
        for (std::size_t i = 0; i < roots.size(); ++i) {
            roots[i] = map_leaves(f.root(i), [&](const Rational& v) { return v * c; });
        }
    }
    return StepFunction::from_roots(f.domain(), std::move(roots));
}

StepFunction multiply(const StepFunction& f, const StepFunction& g)
{
    return zip(f, g, [](const NodePtr& a, const NodePtr& b) { return combine(a, b, Op::Mul); });
}

StepFunction sum(Domain domain, std::span<const StepFunction> parts)
{
    std::vector<std::vector<NodePtr>> per_cube(domain.size());
    for (const StepFunction& p : parts) {
        if (p.domain() != domain) throw DomainError("step functions live on different cube lists");
        for (std::size_t i = 0; i < domain.size(); ++i) {
            if (p.root(i)) per_cube[i].push_back(p.root(i));
        }
    }
    std::vector<NodePtr> roots(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i) {
        roots[i] = sum_range(per_cube[i], 0, per_cube[i].size());
    }
    return StepFunction::from_roots(std::move(domain), std::move(roots));
}

Rational moment(const StepFunction& f, unsigned p)
{
    if (p < 1) throw DomainError("moment order must be at least 1");
    Rational total;
    for (std::size_t i = 0; i < f.domain().size(); ++i) total += node_moment(f.root(i), p);
    return total;
}

Rational moment(const StepFunction& f, CubeId cube, unsigned p)
{
    if (p < 1) throw DomainError("moment order must be at least 1");
    return node_moment(f.root(f.cube_position(cube)), p);
}

Rational deviation_moment(const StepFunction& f, CubeId cube, const Rational& c, unsigned p)
{
    if (p < 1) throw DomainError("moment order must be at least 1");
    return node_deviation(f.root(f.cube_position(cube)), c, c.abs().pow(p), p);
}

Rational deviation_change(const StepFunction& f, const StepFunction& delta, CubeId cube, const Rational& c,
                          unsigned p)
{
    require_same_domain(f, delta);
    if (p < 1) throw DomainError("moment order must be at least 1");
    const std::size_t pos = f.cube_position(cube);
    return node_delta(f.root(pos), delta.root(pos), c, p);
}

Rational sup_norm(const StepFunction& f)
{
    Rational best;
    for (std::size_t i = 0; i < f.domain().size(); ++i) node_sup(f.root(i), best);
    return best;
}

Rational integral(const StepFunction& f, CubeId cube) { return node_integral(f.root(f.cube_position(cube))); }

Rational support_measure(const StepFunction& f, CubeId cube) { return node_support(f.root(f.cube_position(cube))); }

bool canonical_equals(const StepFunction& f, const StepFunction& g)
{
    require_same_domain(f, g);
    return f == g;
}

CoordinateFootprint footprint(const StepFunction& f)
{
    CoordinateFootprint out;
    for (std::size_t i = 0; i < f.domain().size(); ++i) {
        std::set<int> coords;
        node_coords(f.root(i), coords);
        for (int c : coords) out.insert(Coordinate{f.domain()[i], c});
    }
    return out;
}

std::set<int> footprint(const StepFunction& f, CubeId cube)
{
    std::set<int> coords;
    node_coords(f.root(f.cube_position(cube)), coords);
    return coords;
}

} // namespace sumrange
