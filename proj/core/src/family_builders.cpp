#include <algorithm>

#include "sumrange/errors.hpp"
#include "sumrange/family.hpp"

namespace sumrange {

namespace {

Interval cell(std::int64_t m, std::int64_t count) { return Interval(Rational(m - 1, count), Rational(m, count)); }

void check_index(std::int64_t i, std::int64_t count, const TermId& id)
{
    if (i < 1 || i > count) throw StructuralError("index out of range in " + id.str());
}

// Terms of a chain of Kadets pairs, built from the layout formulas.
class ChainSource final : public TermSource {
public:
    ChainSource(ChainLayout layout, Domain domain) : layout_(std::move(layout)), domain_(std::move(domain)) {}

    StepFunction make(const TermId& id) const override
    {
        const int n = id.level;
        const int s = layout_.q_stage(id);
        std::vector<Term> terms;
        if (s < 0) {
            if (id.indices.size() != 1) throw StructuralError("bad index count in " + id.str());
            const std::int64_t count = layout_.alpha(0, n);
            check_index(id.indices[0], count, id);
            terms.push_back(Term{Box{CubeId{1}, {{n, cell(id.indices[0], count)}}}, Rational(1)});
            return StepFunction::from_terms(domain_, terms);
        }
        if (s >= layout_.stages()) throw StructuralError("term " + id.str() + " is beyond the chain");
        for (std::size_t i = 0; i + 1 < id.indices.size(); ++i) {
            if (id.indices[i] < 1) throw StructuralError("index out of range in " + id.str());
        }
        auto [row, col] = layout_.q_position(id);
        const std::int64_t rows = layout_.alpha(s, n);
        const std::int64_t cols = layout_.alpha(s, n + 1);
        check_index(row, rows, id);
        check_index(col, cols, id);

        terms.push_back(
            Term{Box{layout_.pair_cube(s), {{n, cell(row, rows)}, {n + 1, cell(col, cols)}}}, Rational(-1)});
        if (s >= 1) {
            auto [parent_row, parent_col] = layout_.unflatten(s - 1, n, row);
            (void)parent_col;
            const Rational value = -Rational(1) / (Rational(cols) * Rational(layout_.alpha(s - 1, n + 1)));
            terms.push_back(
                Term{Box{layout_.middle_cube(s), {{n, cell(parent_row, layout_.alpha(s - 1, n))}}}, value});
        }
        if (s + 1 < layout_.stages()) {
            terms.push_back(Term{Box{layout_.middle_cube(s + 1), {{n, cell(row, rows)}}}, Rational(1) / Rational(cols)});
            terms.push_back(Term{Box{layout_.pair_cube(s + 1), {{n, cell(layout_.flatten(s, n, row, col),
                                                                           layout_.alpha(s + 1, n))}}},
                                 Rational(1)});
        }
        return StepFunction::from_terms(domain_, terms);
    }

private:
    ChainLayout layout_;
    Domain domain_;
};

// The three-cube family written out directly with |M_n| = n; t, u, v are
// the coordinates of Q1, Q2, Q3.
class ThreeKadetsSource final : public TermSource {
public:
    StepFunction make(const TermId& id) const override
    {
        const std::int64_t n = id.level;
        std::vector<Term> terms;
        switch (id.kind) {
        case TermKind::F: {
            if (id.indices.size() != 1) throw StructuralError("bad index count in " + id.str());
            const std::int64_t m = id.indices[0];
            check_index(m, n, id);
            terms.push_back(Term{Box{CubeId{1}, {{id.level, cell(m, n)}}}, Rational(1)});
            break;
        }
        case TermKind::G: {
            if (id.indices.size() != 2) throw StructuralError("bad index count in " + id.str());
            const std::int64_t m = id.indices[0];
            const std::int64_t j = id.indices[1];
            check_index(m, n, id);
            check_index(j, n + 1, id);
            terms.push_back(Term{Box{CubeId{1}, {{id.level, cell(m, n)}, {id.level + 1, cell(j, n + 1)}}}, Rational(-1)});
            terms.push_back(Term{Box{CubeId{2}, {{id.level, cell(m, n)}}}, Rational(1, n + 1)});
            terms.push_back(Term{Box{CubeId{3}, {{id.level, cell((m - 1) * (n + 1) + j, n * (n + 1))}}}, Rational(1)});
            break;
        }
        case TermKind::H: {
            if (id.indices.size() != 3 || id.tier != 0) throw StructuralError("bad h term " + id.str());
            const std::int64_t m = id.indices[0];
            const std::int64_t j = id.indices[1];
            const std::int64_t k = id.indices[2];
            check_index(m, n, id);
            check_index(j, n + 1, id);
            check_index(k, (n + 1) * (n + 2), id);
            terms.push_back(
                Term{Box{CubeId{2}, {{id.level, cell(m, n)}}}, Rational(-1, (n + 1) * (n + 1) * (n + 2))});
            terms.push_back(Term{Box{CubeId{3},
                                     {{id.level, cell((m - 1) * (n + 1) + j, n * (n + 1))},
                                      {id.level + 1, cell(k, (n + 1) * (n + 2))}}},
                                 Rational(-1)});
            break;
        }
        default: throw StructuralError("the three-point family has no term " + id.str());
        }
        return StepFunction::from_terms(make_domain(3), terms);
    }
};

std::size_t paired_index(std::size_t cube_position) { return (cube_position + 1) / 2; }

std::vector<Rational> apply_matrix(const TransformSpec& t, const std::vector<Rational>& y)
{
    std::vector<Rational> out(t.dimension());
    for (std::size_t i = 0; i < t.dimension(); ++i) {
        for (std::size_t j = 0; j < t.dimension(); ++j) {
            if (!t.matrix[i][j].is_zero() && !y[j].is_zero()) out[i] += t.matrix[i][j] * y[j];
        }
    }
    return out;
}

// Paired coordinates of per-cube values; throws when a pair disagrees.
std::vector<Rational> to_paired(const std::vector<Rational>& per_cube, const std::string& what)
{
    std::vector<Rational> y(paired_dimension(per_cube.size()));
    for (std::size_t i = 0; i < per_cube.size(); ++i) {
        if (i >= 1 && i % 2 == 0 && per_cube[i] != per_cube[i - 1]) {
            throw StructuralError(what + " has different integrals on Q" + std::to_string(i) + " and Q" +
                                  std::to_string(i + 1));
        }
        y[paired_index(i)] = per_cube[i];
    }
    return y;
}

std::vector<Rational> from_paired(const std::vector<Rational>& y, std::size_t cubes)
{
    std::vector<Rational> out(cubes);
    for (std::size_t i = 0; i < cubes; ++i) out[i] = y[paired_index(i)];
    return out;
}

class TransformedSource final : public TermSource {
public:
    TransformedSource(Family base, TransformSpec t) : base_(std::move(base)), t_(std::move(t)) {}

    StepFunction make(const TermId& id) const override
    {
        StepFunction d = base_.term(id);
        std::vector<Rational> y = to_paired(project_P(d), "term " + id.str());
        std::vector<Rational> shift = from_paired(apply_matrix(t_, y), d.domain().size());
        return d + cube_constants(d.domain(), shift);
    }

private:
    Family base_;
    TransformSpec t_;
};

void validate_transform(const TransformSpec& t, std::size_t dim)
{
    if (t.dimension() != dim) {
        throw ConfigError("transform has dimension " + std::to_string(t.dimension()) + ", the family needs " +
                          std::to_string(dim));
    }
    for (const auto& row : t.matrix) {
        if (row.size() != dim) throw ConfigError("transform matrix is not square");
    }
}

Family make_chain_family(Flavor flavor, int points, int depth, const IndexSets& sizes)
{
    if (depth < 1) throw ConfigError("depth must be at least 1");
    FamilyManifest manifest;
    manifest.flavor = flavor;
    manifest.base_flavor = flavor;
    manifest.depth = depth;
    manifest.sizes = sizes;
    manifest.points = points;
    ChainLayout layout(flavor, stage_count(flavor, points), sizes);
    if (sizes.max_level() < layout.required_level(depth)) {
        throw ConfigError("index-set sizes must cover levels 1.." + std::to_string(layout.required_level(depth)) +
                          " for depth " + std::to_string(depth));
    }
    if (layout.term_count(depth) > 50'000'000) throw ConfigError("family too large for this depth");
    manifest.domain = make_domain(layout.cube_count());
    std::vector<TermId> ids = layout.enumerate(depth);
    auto source = generated_source(manifest);
    return Family(std::move(manifest), std::move(ids), std::move(source));
}

bool is_linear(const IndexSets& sizes)
{
    for (int n = 1; n <= sizes.max_level(); ++n) {
        if (sizes.size(n) != n) return false;
    }
    return true;
}

} // namespace

std::shared_ptr<const TermSource> generated_source(const FamilyManifest& manifest)
{
    switch (manifest.flavor) {
    case Flavor::ThreeKadets: return std::make_shared<ThreeKadetsSource>();
    case Flavor::Kadets:
    case Flavor::MultiPoint:
        return std::make_shared<ChainSource>(
            ChainLayout(manifest.flavor, stage_count(manifest.flavor, manifest.points), manifest.sizes),
            manifest.domain);
    case Flavor::Transformed: break;
    }
    throw StructuralError("transformed families have no formula source");
}

Family build_kadets(int depth, const IndexSets& sizes) { return make_chain_family(Flavor::Kadets, 2, depth, sizes); }

Family build_kadets(int depth)
{
    if (depth < 1) throw ConfigError("depth must be at least 1");
    return build_kadets(depth, IndexSets::linear(depth + 1));
}

Family build_three_kadets(int depth)
{
    if (depth < 1) throw ConfigError("depth must be at least 1");
    return make_chain_family(Flavor::ThreeKadets, 3, depth, IndexSets::linear(depth + 2));
}

Family extend_multipoint(const Family& family, int depth)
{
    if (family.flavor() != Flavor::Kadets && family.flavor() != Flavor::MultiPoint) {
        throw StructuralError("only Kadets and multi-point families carry a distinguished pair on their last cube");
    }
    if (family.has_overrides()) {
        throw StructuralError("the distinguished pair of a modified family is not known to be a Kadets pair");
    }
    const int points = family.points() + 1;
    const int needed = depth + stage_count(Flavor::MultiPoint, points);
    IndexSets sizes = family.sizes();
    if (sizes.max_level() < needed) {
        if (!is_linear(sizes)) {
            throw ConfigError("index-set sizes must cover levels 1.." + std::to_string(needed));
        }
        sizes = IndexSets::linear(needed);
    }
    return make_chain_family(Flavor::MultiPoint, points, depth, sizes);
}

Family build_multipoint(int points, int depth, const IndexSets& sizes)
{
    if (points < 2) throw ConfigError("a sum range with fewer than 2 points is not built by this construction");
    if (depth < 1) throw ConfigError("depth must be at least 1");
    Family family = build_kadets(depth, sizes);
    for (int r = 3; r <= points; ++r) family = extend_multipoint(family, depth);
    return family;
}

Family build_multipoint(int points, int depth)
{
    if (points < 2) throw ConfigError("a sum range with fewer than 2 points is not built by this construction");
    if (depth < 1) throw ConfigError("depth must be at least 1");
    return build_multipoint(points, depth, IndexSets::linear(depth + points - 1));
}

std::vector<SumRangePoint> expected_sum_range(const Family& family)
{
    const ChainLayout& layout = family.layout();
    const std::size_t cubes = static_cast<std::size_t>(layout.cube_count());
    std::vector<SumRangePoint> out;
    // k leading stages converge to 1 on their cubes, the rest to 0.
    for (int k = 0; k <= layout.stages(); ++k) {
        SumRangePoint p;
        p.values.assign(cubes, Rational(0));
        for (int s = 0; s < k; ++s) {
            p.values[static_cast<std::size_t>(layout.pair_cube(s).index - 1)] = Rational(1);
            if (s >= 1) p.values[static_cast<std::size_t>(layout.middle_cube(s).index - 1)] = Rational(1);
        }
        out.push_back(std::move(p));
    }
    if (family.flavor() == Flavor::Transformed) {
        for (auto& p : out) p = transform_point(p, *family.manifest().transform);
    }
    return out;
}

std::vector<Rational> project_P(const StepFunction& f)
{
    std::vector<Rational> out;
    out.reserve(f.domain().size());
    for (CubeId c : f.domain()) out.push_back(integral(f, c));
    return out;
}

std::size_t paired_dimension(std::size_t cube_count) { return (cube_count + 1) / 2; }

SumRangePoint transform_point(const SumRangePoint& point, const TransformSpec& transform)
{
    validate_transform(transform, paired_dimension(point.values.size()));
    std::vector<Rational> y = to_paired(point.values, "point " + point.str());
    std::vector<Rational> shift = apply_matrix(transform, y);
    SumRangePoint out = point;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += shift[paired_index(i)];
    return out;
}

StepFunction cube_constants(const Domain& domain, const std::vector<Rational>& values)
{
    if (values.size() != domain.size()) throw DomainError("one constant per cube expected");
    std::vector<Term> terms;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        if (!values[i].is_zero()) terms.push_back(Term{Box{domain[i], {}}, values[i]});
    }
    return StepFunction::from_terms(domain, terms);
}

Family apply_transform(const Family& family, const TransformSpec& transform)
{
    if (family.flavor() == Flavor::Transformed) {
        throw StructuralError("the family is already transformed; transform its base family instead");
    }
    validate_transform(transform, paired_dimension(family.domain().size()));
    for (const TermId& id : family.ids()) {
        to_paired(project_P(family.term(id)), "term " + id.str());
    }
    FamilyManifest manifest = family.manifest();
    manifest.base_flavor = family.flavor();
    manifest.flavor = Flavor::Transformed;
    manifest.transform = transform;
    auto source = std::make_shared<TransformedSource>(family, transform);
    return Family(std::move(manifest), family.ids(), std::move(source));
}

} // namespace sumrange
