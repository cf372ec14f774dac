#include <gtest/gtest.h>

#include <sstream>

#include "sumrange/errors.hpp"
#include "sumrange/family.hpp"
#include "sumrange/family_verify.hpp"

using namespace sumrange;

namespace {

TermId id(const char* text) { return TermId::parse(text); }

bool failed_at(const AxiomReport& r, const std::string& axiom, const std::string& term)
{
    for (const AxiomCheck& c : r.failures()) {
        if (c.axiom == axiom && c.term == term) return true;
    }
    return false;
}

} // namespace

TEST(VerifyKadets, BuiltFamilyPasses)
{
    const AxiomReport r = verify_kadets(build_kadets(6));
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.failure_count(), 0u);
    for (const char* axiom : {"p-partition-of-unity", "p-norm", "p-footprint", "p-values", "p-disjoint", "q-product",
                              "q-norm", "q-footprint", "q-values", "p-row-sum", "p-column-sum", "q-sum"}) {
        EXPECT_TRUE(r.has(axiom)) << axiom;
    }
}

TEST(VerifyKadets, ParallelMatchesSequential)
{
    const Family k = build_kadets(5);
    std::ostringstream a;
    std::ostringstream b;
    verify_kadets(k, 1).write_csv(a);
    verify_kadets(k, 4).write_csv(b);
    EXPECT_EQ(a.str(), b.str());
}

TEST(VerifyKadets, NegatedBTermIsCaught)
{
    const Family k = build_kadets(6);
    const Family bad = k.with_term(id("b.3.2.1"), -k.term(id("b.3.2.1")));
    const AxiomReport r = verify_kadets(bad);
    EXPECT_FALSE(r.passed());
    EXPECT_TRUE(failed_at(r, "q-product", "b.3.2.1"));
    EXPECT_TRUE(r.failed("q-values"));
    for (const AxiomCheck& c : r.failures()) EXPECT_FALSE(c.witness.empty());
}

TEST(VerifyKadets, UnequalPartitionIsCaught)
{
    const Family k = build_kadets(4);
    const Domain& dom = k.domain();
    auto cell = [&](Rational lo, Rational hi) {
        return StepFunction::box(dom, Box{CubeId{1}, {{2, Interval(lo, hi)}}}, Rational(1));
    };
    const Family bad = k.with_term(id("a.2.1"), cell(Rational(0), Rational(1, 3)))
                           .with_term(id("a.2.2"), cell(Rational(1, 3), Rational(1)));
    const AxiomReport r = verify_kadets(bad);
    EXPECT_TRUE(failed_at(r, "p-norm", "a.2.1"));
    EXPECT_FALSE(r.failed("p-partition-of-unity"));
}

TEST(VerifyKadets, WrongFootprintIsCaught)
{
    const Family k = build_kadets(3);
    const Domain& dom = k.domain();
    const StepFunction moved = StepFunction::box(dom, Box{CubeId{1}, {{5, Interval(Rational(0), Rational(1, 3))}}}, Rational(1));
    const AxiomReport r = verify_kadets(k.with_term(id("a.3.1"), moved));
    EXPECT_TRUE(failed_at(r, "p-footprint", "a.3.1"));
}

TEST(VerifyKadets, RequiresKadetsFlavor)
{
    EXPECT_THROW(verify_kadets(build_three_kadets(2)), StructuralError);
}

TEST(VerifyThreeKadets, BuiltFamilyPasses)
{
    const AxiomReport r = verify_three_kadets(build_three_kadets(5));
    EXPECT_TRUE(r.passed());
    for (const char* axiom : {"h-norm", "h-integrals", "mid-footprint", "g-norm", "g-integrals", "g-h-row",
                              "g-row-values", "h-total", "level-coupling", "g-total", "q-product"}) {
        EXPECT_TRUE(r.has(axiom)) << axiom;
    }
}

TEST(VerifyThreeKadets, PerturbedHOnMiddleCubeIsCaught)
{
    const Family t = build_three_kadets(5);
    const TermId h = id("h.2.1.1.1");
    const StepFunction bump = cube_constants(t.domain(), {Rational(0), Rational(1, 1000), Rational(0)});
    const AxiomReport r = verify_three_kadets(t.with_term(h, t.term(h) + bump));
    EXPECT_TRUE(failed_at(r, "g-h-row", "g.2.1.1"));
    EXPECT_TRUE(r.failed("h-integrals"));
    EXPECT_FALSE(r.failed("q-product"));
}

TEST(VerifyThreeKadets, SwappedGSupportsOnLastCubeAreCaught)
{
    const Family t = build_three_kadets(4);
    const CubeId q3{3};
    const TermId g1 = id("g.2.1.1");
    const TermId g2 = id("g.2.1.2");
    const StepFunction a = t.term(g1);
    const StepFunction b = t.term(g2);
    const StepFunction a_swapped = a - a.restricted_to(q3) + b.restricted_to(q3);
    const StepFunction b_swapped = b - b.restricted_to(q3) + a.restricted_to(q3);
    const AxiomReport r = verify_three_kadets(t.with_term(g1, a_swapped).with_term(g2, b_swapped));
    EXPECT_FALSE(r.passed());
    bool product_on_q3 = false;
    for (const AxiomCheck& c : r.failures()) {
        if (c.axiom == "q-product" && c.scope == "Q3") product_on_q3 = true;
    }
    EXPECT_TRUE(product_on_q3);
}

TEST(VerifyFamily, MultiPointChains)
{
    EXPECT_TRUE(verify_family(build_multipoint(3, 3)).passed());
    const AxiomReport r = verify_family(build_multipoint(4, 2));
    EXPECT_TRUE(r.passed());
    EXPECT_TRUE(r.has("cube-placement"));
    EXPECT_TRUE(verify_three_kadets(build_multipoint(4, 2)).passed());
}

TEST(VerifyFamily, TransformedIsRejected)
{
    const Family t = build_three_kadets(2);
    EXPECT_THROW(verify_family(apply_transform(t, TransformSpec::identity(2))), ConfigError);
}

TEST(AxiomReport, TextAndCsv)
{
    const Family k = build_kadets(3);
    const AxiomReport good = verify_kadets(k);
    std::ostringstream text;
    good.write_text(text);
    EXPECT_NE(text.str().find("all axioms hold"), std::string::npos);

    const AxiomReport bad = verify_kadets(k.with_term(id("b.2.2.3"), -k.term(id("b.2.2.3"))));
    std::ostringstream csv;
    bad.write_csv(csv);
    EXPECT_EQ(csv.str().rfind("axiom,", 0), 0u);
    EXPECT_NE(csv.str().find("b.2.2.3"), std::string::npos);
    std::ostringstream bad_text;
    bad.write_text(bad_text);
    EXPECT_NE(bad_text.str().find("q-product"), std::string::npos);

    AxiomReport merged = good;
    merged.append(bad);
    EXPECT_EQ(merged.failure_count(), bad.failure_count());
}
