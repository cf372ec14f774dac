#include <gtest/gtest.h>

#include <set>

#include "sumrange/errors.hpp"
#include "sumrange/family.hpp"
#include "sumrange/random.hpp"
#include "sumrange/step_function.hpp"
#include "sumrange/step_function_io.hpp"

using namespace sumrange;

namespace {

const CubeId Q1{1};
const CubeId Q2{2};

StepFunction indicator(const Domain& dom, CubeId cube, std::map<int, Interval> constraints, Rational value = 1)
{
    return StepFunction::box(dom, Box{cube, std::move(constraints)}, value);
}

StepFunction cell(const Domain& dom, int coord, Rational lo, Rational hi, Rational value = 1)
{
    return indicator(dom, Q1, {{coord, Interval(lo, hi)}}, value);
}

// a_m^n with |M_n| = n on a one-cube domain.
StepFunction a_term(int n, int m)
{
    return cell(make_domain(1), n, Rational(m - 1, n), Rational(m, n));
}

// Random sum of up to four boxes over coordinates 1..3 on two cubes, cuts with denominators <= 8.
StepFunction random_function(Rng& rng, const Domain& dom)
{
    std::vector<Term> terms;
    const auto count = rng.uniform(0, 4);
    for (std::int64_t i = 0; i < count; ++i) {
        Box box{dom[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(dom.size()) - 1))], {}};
        for (int coord = 1; coord <= 3; ++coord) {
            if (!rng.coin()) continue;
            const std::int64_t d = rng.uniform(2, 8);
            const std::int64_t lo = rng.uniform(0, d - 1);
            const std::int64_t hi = rng.uniform(lo + 1, d);
            box.constraints.emplace(coord, Interval(Rational(lo, d), Rational(hi, d)));
        }
        terms.push_back(Term{std::move(box), Rational(rng.uniform(-3, 3), rng.uniform(1, 3))});
    }
    return StepFunction::from_terms(dom, terms);
}

// Cells of the common refinement of every cut on coordinates 1..3.
struct Grid {
    std::vector<Rational> cuts[3];

    explicit Grid(std::initializer_list<const StepFunction*> fs)
    {
        std::set<Rational> s[3];
        for (auto& set : s) {
            set.insert(Rational(0));
            set.insert(Rational(1));
        }
        for (const StepFunction* f : fs) {
            for (const Term& t : f->terms()) {
                for (const auto& [coord, iv] : t.box.constraints) {
                    s[coord - 1].insert(iv.lo);
                    s[coord - 1].insert(iv.hi);
                }
            }
        }
        for (int c = 0; c < 3; ++c) cuts[c].assign(s[c].begin(), s[c].end());
    }

    template <typename Fn>
    void for_each(const Fn& fn) const
    {
        for (std::size_t i = 0; i + 1 < cuts[0].size(); ++i) {
            for (std::size_t j = 0; j + 1 < cuts[1].size(); ++j) {
                for (std::size_t k = 0; k + 1 < cuts[2].size(); ++k) {
                    const std::map<int, Rational> point{{1, cuts[0][i]}, {2, cuts[1][j]}, {3, cuts[2][k]}};
                    const Rational vol = (cuts[0][i + 1] - cuts[0][i]) * (cuts[1][j + 1] - cuts[1][j]) *
                                         (cuts[2][k + 1] - cuts[2][k]);
                    fn(point, vol);
                }
            }
        }
    }
};

Rational oracle_moment(const StepFunction& f, CubeId cube, unsigned p)
{
    Rational total;
    Grid(std::initializer_list<const StepFunction*>{&f}).for_each([&](const std::map<int, Rational>& pt, const Rational& vol) {
        total += f.evaluate(cube, pt).abs().pow(p) * vol;
    });
    return total;
}

} // namespace

TEST(StepFunction, ZeroAndConstants)
{
    const Domain dom = make_domain(2);
    const StepFunction z = StepFunction::zero(dom);
    EXPECT_TRUE(z.is_zero());
    EXPECT_EQ(z.box_count(), 0u);
    EXPECT_EQ(moment(z, 3), Rational(0));
    EXPECT_EQ(sup_norm(z), Rational(0));
    EXPECT_EQ(integral(z, Q2), Rational(0));
    EXPECT_EQ(support_measure(z, Q1), Rational(0));
    const StepFunction c = StepFunction::constant(dom, Q2, Rational(3, 2));
    EXPECT_TRUE(footprint(c).empty());
    EXPECT_EQ(c.box_count(), 1u);
    EXPECT_TRUE(c.is_zero_on(Q1));
    EXPECT_EQ(integral(c, Q2), Rational(3, 2));
}

TEST(StepFunction, PartitionOfUnitySums)
{
    const StepFunction sum = a_term(2, 1) + a_term(2, 2);
    EXPECT_EQ(sum, StepFunction::constant(make_domain(1), Q1, Rational(1)));
    EXPECT_TRUE(footprint(sum).empty());
}

TEST(StepFunction, AddZeroIsIdentity)
{
    const StepFunction f = a_term(3, 2);
    EXPECT_EQ(f + StepFunction::zero(f.domain()), f);
}

TEST(StepFunction, OverlappingIndicators)
{
    const Domain dom = make_domain(1);
    const StepFunction s = cell(dom, 1, Rational(0), Rational(1, 2)) + cell(dom, 1, Rational(1, 4), Rational(3, 4));
    EXPECT_EQ(s.evaluate(Q1, {{1, Rational(1, 3)}}), Rational(2));
    EXPECT_EQ(s.evaluate(Q1, {{1, Rational(1, 8)}}), Rational(1));
    EXPECT_EQ(s.evaluate(Q1, {{1, Rational(5, 8)}}), Rational(1));
    EXPECT_EQ(s.evaluate(Q1, {{1, Rational(7, 8)}}), Rational(0));
    EXPECT_EQ(s.box_count(), 3u);
}

TEST(StepFunction, Scaling)
{
    const StepFunction a = a_term(2, 1);
    EXPECT_TRUE(scale(a, Rational(0)).is_zero());
    EXPECT_EQ(moment(scale(a, Rational(-1)), 1), Rational(1, 2));
    const Family three = build_three_kadets(2);
    const StepFunction g = three.term(TermId::parse("g.1.1.2")).restricted_to(CubeId{2});
    EXPECT_EQ(scale(g, Rational(2)), StepFunction::constant(three.domain(), CubeId{2}, Rational(1)));
}

TEST(StepFunction, ProductOfIndicators)
{
    const Domain dom = make_domain(1);
    const StepFunction b = -(a_term(2, 1) * a_term(3, 1));
    EXPECT_EQ(moment(b, 1), Rational(1, 6));
    EXPECT_EQ(b.evaluate(Q1, {{2, Rational(1, 4)}, {3, Rational(1, 6)}}), Rational(-1));
    EXPECT_EQ(b.evaluate(Q1, {{2, Rational(3, 4)}, {3, Rational(1, 6)}}), Rational(0));
    EXPECT_EQ(footprint(b, Q1), (std::set<int>{2, 3}));
    const StepFunction f = a_term(3, 2);
    EXPECT_EQ(f * StepFunction::constant(dom, Q1, Rational(1)), f);
    EXPECT_TRUE((a_term(3, 1) * a_term(3, 2)).is_zero());
}

TEST(StepFunction, Moments)
{
    const StepFunction a = a_term(2, 1);
    EXPECT_EQ(moment(a, 1), Rational(1, 2));
    EXPECT_EQ(moment(a, 2), Rational(1, 2));
    const StepFunction half = scale(a, Rational(1, 2));
    EXPECT_EQ(moment(half, 2), Rational(1, 8));
    EXPECT_EQ(sup_norm(half - a_term(2, 2)), Rational(1));
    EXPECT_EQ(deviation_moment(a, Q1, Rational(1), 1), Rational(1, 2));
    EXPECT_EQ(deviation_moment(a, Q1, Rational(2), 2), Rational(1, 2) + Rational(4, 2));
}

TEST(StepFunction, IntegralsOnThreeCubeTerms)
{
    const Family three = build_three_kadets(2);
    const StepFunction g = three.term(TermId::parse("g.1.1.2"));
    EXPECT_EQ(integral(g, CubeId{2}), Rational(1, 2));
    EXPECT_EQ(integral(g, CubeId{3}), Rational(1, 2));
    const StepFunction h = three.term(TermId::parse("h.1.1.2.3"));
    EXPECT_EQ(integral(h, CubeId{2}), Rational(-1, 12));
    EXPECT_EQ(integral(h, CubeId{3}), Rational(-1, 12));
    EXPECT_THROW(integral(g, CubeId{7}), DomainError);
}

TEST(StepFunction, SupportMeasure)
{
    EXPECT_EQ(support_measure(a_term(2, 1), Q1), Rational(1, 2));
    const Family three = build_three_kadets(2);
    StepFunction row = StepFunction::zero(three.domain());
    for (int j = 1; j <= 2; ++j) row = row + three.term(TermId::parse("g.1.1." + std::to_string(j)));
    EXPECT_EQ(support_measure(row.restricted_to(CubeId{2}), CubeId{2}), Rational(1));
}

TEST(StepFunction, CanonicalEquality)
{
    const Domain dom = make_domain(1);
    EXPECT_TRUE(canonical_equals(a_term(1, 1), StepFunction::constant(dom, Q1, Rational(1))));
    const StepFunction coarse = cell(dom, 2, Rational(0), Rational(1, 2), Rational(5));
    const StepFunction fine = cell(dom, 2, Rational(0), Rational(1, 6), Rational(5)) +
                              cell(dom, 2, Rational(1, 6), Rational(1, 3), Rational(5)) +
                              cell(dom, 2, Rational(1, 3), Rational(1, 2), Rational(5));
    EXPECT_TRUE(canonical_equals(coarse, fine));
    EXPECT_EQ(fine.box_count(), 1u);
    EXPECT_FALSE(canonical_equals(a_term(2, 1), a_term(2, 2)));
    EXPECT_THROW(canonical_equals(coarse, StepFunction::zero(make_domain(2))), DomainError);
}

TEST(StepFunction, Footprints)
{
    const StepFunction a = a_term(2, 1);
    EXPECT_EQ(footprint(a), (CoordinateFootprint{{Q1, 2}}));
    EXPECT_TRUE(footprint(StepFunction::constant(make_domain(1), Q1, Rational(4))).empty());
    const Family k = build_kadets(3);
    EXPECT_EQ(footprint(k.term(TermId::parse("b.2.1.1"))), (CoordinateFootprint{{Q1, 2}, {Q1, 3}}));
}

TEST(StepFunction, DomainMismatch)
{
    const StepFunction f = StepFunction::zero(make_domain(1));
    const StepFunction g = StepFunction::zero(make_domain(2));
    EXPECT_THROW(f + g, DomainError);
    EXPECT_THROW(f * g, DomainError);
    EXPECT_FALSE(f == g);
}

TEST(StepFunction, InvalidIntervals)
{
    EXPECT_THROW(Interval(Rational(1, 2), Rational(1, 2)), DomainError);
    EXPECT_THROW(Interval(Rational(-1, 2), Rational(1, 2)), DomainError);
    EXPECT_THROW(Interval(Rational(0), Rational(3, 2)), DomainError);
}

TEST(StepFunctionOracle, AlgebraMatchesCellwiseEvaluation)
{
    const Domain dom = make_domain(2);
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const StepFunction f = random_function(rng, dom);
        const StepFunction g = random_function(rng, dom);
        const Rational c(rng.uniform(-4, 4), rng.uniform(1, 5));
        const StepFunction sum = f + g;
        const StepFunction diff = f - g;
        const StepFunction prod = f * g;
        const StepFunction scaled = scale(f, c);
        for (CubeId cube : dom) {
            Grid({&f, &g}).for_each([&](const std::map<int, Rational>& pt, const Rational&) {
                const Rational fv = f.evaluate(cube, pt);
                const Rational gv = g.evaluate(cube, pt);
                ASSERT_EQ(sum.evaluate(cube, pt), fv + gv);
                ASSERT_EQ(diff.evaluate(cube, pt), fv - gv);
                ASSERT_EQ(prod.evaluate(cube, pt), fv * gv);
                ASSERT_EQ(scaled.evaluate(cube, pt), c * fv);
            });
            for (unsigned p = 1; p <= 3; ++p) ASSERT_EQ(moment(sum, cube, p), oracle_moment(sum, cube, p));
        }
    }
}

TEST(StepFunctionOracle, CanonicalFormIsIdempotentAndUnique)
{
    const Domain dom = make_domain(2);
    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const StepFunction f = random_function(rng, dom);
        const std::vector<Term> terms = f.terms();
        const StepFunction again = StepFunction::from_terms(dom, terms);
        ASSERT_EQ(again.terms(), terms);
        ASSERT_EQ(again, f);
        for (const Term& t : terms) ASSERT_FALSE(t.value.is_zero());
        // f - f must vanish identically, in any grouping.
        const StepFunction g = random_function(rng, dom);
        ASSERT_TRUE(((f + g) - g - f).is_zero());
    }
}

TEST(StepFunctionOracle, NormProperties)
{
    const Domain dom = make_domain(2);
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const StepFunction f = random_function(rng, dom);
        const StepFunction g = random_function(rng, dom);
        ASSERT_EQ(moment(f, 1), moment(f, Q1, 1) + moment(f, Q2, 1));
        const Rational c(rng.uniform(-3, 3), rng.uniform(1, 4));
        for (unsigned p = 1; p <= 3; ++p) ASSERT_EQ(moment(scale(f, c), p), c.abs().pow(p) * moment(f, p));
        ASSERT_LE(moment(f + g, 1), moment(f, 1) + moment(g, 1));
        const CoordinateFootprint fs = footprint(f);
        const CoordinateFootprint gs = footprint(g);
        for (const Coordinate& x : footprint(f + g)) ASSERT_TRUE(fs.count(x) || gs.count(x));
        const Rational s = sup_norm(f);
        if (!s.is_zero()) {
            const StepFunction unit = scale(f, Rational(1) / s);
            for (unsigned p = 2; p <= 4; ++p) ASSERT_LE(moment(unit, p), moment(unit, 1));
        }
    }
}

TEST(StepFunctionOracle, DeviationChangeMatchesRecomputation)
{
    const Domain dom = make_domain(2);
    Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const StepFunction f = random_function(rng, dom);
        const StepFunction d = random_function(rng, dom);
        const Rational c(rng.uniform(-2, 2));
        for (unsigned p = 1; p <= 3; ++p) {
            for (CubeId cube : dom) {
                ASSERT_EQ(deviation_change(f, d, cube, c, p),
                          deviation_moment(f + d, cube, c, p) - deviation_moment(f, cube, c, p));
            }
        }
    }
}

TEST(StepFunctionText, RoundTrip)
{
    const Domain dom = make_domain(2);
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const StepFunction f = random_function(rng, dom);
        const std::string text = to_text(f);
        const StepFunction back = step_function_from_text(text);
        ASSERT_EQ(back, f);
        ASSERT_EQ(to_text(back), text);
    }
}

TEST(StepFunctionText, Rejects)
{
    EXPECT_THROW(step_function_from_text("{"), ParseError);
    EXPECT_THROW(step_function_from_text(R"({"domain":[1],"terms":[{"cube":1,"box":{"1":["1/2","1/4"]},"value":"1"}]})"),
                 ParseError);
    EXPECT_THROW(step_function_from_text(R"({"domain":[1],"terms":[{"cube":1,"box":{},"value":"x"}]})"), ParseError);
    EXPECT_THROW(step_function_from_text(R"({"domain":[1]})"), ParseError);
}
