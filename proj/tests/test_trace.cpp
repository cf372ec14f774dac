#include <gtest/gtest.h>

#include <sstream>

#include "sumrange/errors.hpp"
#include "sumrange/family.hpp"
#include "sumrange/schedule.hpp"
#include "sumrange/trace.hpp"

using namespace sumrange;

namespace {

SumRangePoint point(std::vector<Rational> v)
{
    SumRangePoint p;
    p.values = std::move(v);
    return p;
}

TraceSummary summarize(const Family& f, const Schedule& s, unsigned p = 1)
{
    TraceSummary summary(f, s);
    run_trace(f, s, *s.target, p, summary.sink());
    return summary;
}

} // namespace

TEST(Trace, SigmaMarkersAreExact)
{
    const Family k = build_kadets(5);
    const Schedule s = schedule_sigma(k);
    const TraceSummary sum = summarize(k, s);
    EXPECT_EQ(sum.steps(), k.size());
    EXPECT_TRUE(sum.max_marker_deviation().is_zero());
    EXPECT_TRUE(sum.open_block_bound_holds()) << sum.open_block_violation();
    EXPECT_EQ(sum.checkpoints().size(), s.blocks.size());
    EXPECT_EQ(sum.verdict(), Verdict::Convergent);
    ASSERT_TRUE(sum.limit().has_value());
    EXPECT_EQ(sum.limit()->str(), "(0)");
}

TEST(Trace, TauSettlesOnOne)
{
    const Family k = build_kadets(5);
    const Schedule s = schedule_tau(k);
    for (unsigned p : {1u, 2u}) {
        const TraceSummary sum = summarize(k, s, p);
        EXPECT_GT(sum.settled_markers(), 0u);
        EXPECT_TRUE(sum.max_settled_deviation().is_zero());
        EXPECT_TRUE(sum.open_block_bound_holds()) << sum.open_block_violation();
        EXPECT_EQ(sum.verdict(), Verdict::Convergent);
    }
}

TEST(Trace, OpenBlockDeviationWithinBound)
{
    const Family k = build_kadets(4);
    const Schedule s = schedule_sigma(k);
    const Trace t = run_trace(k, s, *s.target, 1);
    ASSERT_EQ(t.rows.size(), k.size());
    for (const TraceRow& row : t.rows) {
        const Rational bound(2, k.sizes().size(row.block_level));
        EXPECT_LE(row.cube_deviation[0], bound) << row.k;
        EXPECT_EQ(row.total, row.cube_deviation[0]);
    }
}

TEST(Trace, ThreePointSchedulesConverge)
{
    const Family t = build_three_kadets(4);
    for (ThreePoint p : {ThreePoint::P00, ThreePoint::P10, ThreePoint::P11}) {
        const Schedule s = schedule_three_point(t, p);
        const TraceSummary sum = summarize(t, s);
        EXPECT_GT(sum.settled_markers(), 0u) << s.label;
        EXPECT_TRUE(sum.max_settled_deviation().is_zero()) << s.label;
        EXPECT_TRUE(sum.open_block_bound_holds()) << s.label << ": " << sum.open_block_violation();
        EXPECT_EQ(sum.verdict(), Verdict::Convergent) << s.label;
    }
}

TEST(Trace, DivergentOscillates)
{
    const Family t = build_three_kadets(6);
    const Schedule s = schedule_divergent(t);
    const MarkerEvaluation ev = evaluate_markers(t, s, point({Rational(0), Rational(1), Rational(1)}));
    ASSERT_FALSE(ev.checkpoints.empty());
    bool saw_half = false;
    for (const Checkpoint& cp : ev.checkpoints) {
        const Rational theta(static_cast<std::int64_t>(cp.index_in_level), static_cast<std::int64_t>(cp.blocks_in_level));
        EXPECT_EQ(cp.deviation[1], Rational(2) * theta * (Rational(1) - theta)) << cp.level << " " << theta.str();
        if (theta == Rational(1, 2)) saw_half = true;
    }
    EXPECT_TRUE(saw_half);

    TraceSummary sum(t, s);
    run_trace(t, s, *s.target, 1, sum.sink());
    EXPECT_EQ(sum.verdict(), Verdict::Divergent);
    EXPECT_GE(sum.limsup_estimate(), Rational(1, 2));
}

TEST(Trace, MarkersMatchFullTrace)
{
    const Family t = build_three_kadets(3);
    for (const std::string label : {"p00", "p10", "p11", "divergent"}) {
        const Schedule s = schedule_by_label(t, label);
        for (unsigned p : {1u, 2u}) {
            TraceSummary sum(t, s);
            run_trace(t, s, *s.target, p, sum.sink());
            const MarkerEvaluation ev = evaluate_markers(t, s, *s.target, p);
            ASSERT_EQ(ev.checkpoints.size(), sum.checkpoints().size()) << label;
            for (std::size_t i = 0; i < ev.checkpoints.size(); ++i) {
                EXPECT_EQ(ev.checkpoints[i].k, sum.checkpoints()[i].k);
                EXPECT_EQ(ev.checkpoints[i].deviation, sum.checkpoints()[i].deviation) << label << " " << i;
                EXPECT_EQ(ev.checkpoints[i].total, sum.checkpoints()[i].total);
            }
            EXPECT_EQ(ev.settled_markers, sum.settled_markers());
            EXPECT_EQ(ev.limit, sum.limit());
        }
    }
}

TEST(Trace, HigherMomentsAreSmaller)
{
    const Family k = build_kadets(4);
    const Schedule s = schedule_sigma(k);
    const Trace t1 = run_trace(k, s, *s.target, 1);
    const Trace t2 = run_trace(k, s, *s.target, 2);
    const Trace t3 = run_trace(k, s, *s.target, 3);
    for (std::size_t i = 0; i < t1.rows.size(); ++i) {
        EXPECT_LE(t2.rows[i].total, t1.rows[i].total);
        EXPECT_LE(t3.rows[i].total, t1.rows[i].total);
    }
}

TEST(Trace, BoxCountProfile)
{
    const Family k = build_kadets(4);
    const Schedule s = schedule_sigma(k);
    const Trace t = run_trace(k, s, *s.target, 1);
    const BoxCountProfile profile = box_count_profile(t);
    EXPECT_EQ(profile.final_count, 0u);
    EXPECT_GT(profile.max, 0u);
    for (const auto& [level, peak] : profile.per_level_max) {
        const auto m = static_cast<std::size_t>(k.sizes().size(level));
        const auto m1 = static_cast<std::size_t>(k.sizes().size(level + 1));
        EXPECT_LE(peak, m * (m1 + 1)) << level;
    }
    EXPECT_EQ(summarize(k, s).profile().max, profile.max);
}

TEST(Trace, CsvLayout)
{
    const Family k = build_kadets(1);
    const Schedule s = schedule_sigma(k);
    std::ostringstream os;
    write_trace_csv(os, run_trace(k, s, *s.target, 1));
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.front(), '#');
    std::getline(in, line);
    EXPECT_EQ(line, "k,term_id,cube,deviation_num,deviation_den,deviation_float,box_count,is_block_marker");
    std::getline(in, line);
    EXPECT_EQ(line.rfind("1,a.1.1,Q1,1,1,", 0), 0u) << line;
    std::size_t rows = 3;
    std::string last;
    while (std::getline(in, line)) {
        ++rows;
        last = line;
    }
    EXPECT_EQ(rows, 2 + 2 * k.size());
    EXPECT_EQ(last.rfind("3,b.1.1.2,all,0,1,", 0), 0u) << last;
    EXPECT_EQ(last.back(), '1');
}

TEST(Trace, StreamedCsvMatchesCollected)
{
    const Family k = build_kadets(3);
    const Schedule s = schedule_tau(k);
    std::ostringstream a;
    std::ostringstream b;
    write_trace_csv(a, run_trace(k, s, *s.target, 2));
    TraceCsvWriter writer(b);
    run_trace(k, s, *s.target, 2, writer.sink());
    EXPECT_EQ(a.str(), b.str());
}

TEST(Trace, InvalidArguments)
{
    const Family k = build_kadets(2);
    const Schedule s = schedule_sigma(k);
    EXPECT_THROW(run_trace(k, s, point({Rational(0), Rational(0)}), 1), ConfigError);
    EXPECT_THROW(run_trace(k, s, *s.target, 0), ConfigError);
    EXPECT_THROW(partial_sum(k, s.order, 2, 1), ConfigError);
}

TEST(Trace, ShuffleIsNotConvergent)
{
    const Family k = build_kadets(4);
    const Schedule s = schedule_shuffled(k, 1);
    TraceSummary sum(k, s);
    run_trace(k, s, point({Rational(0)}), 1, sum.sink());
    EXPECT_NE(sum.verdict(), Verdict::Convergent);
}

TEST(Trace, CubeConstantValues)
{
    const Domain d = make_domain(2);
    EXPECT_EQ(cube_constant_values(cube_constants(d, {Rational(1), Rational(-2)}))->str(), "(1,-2)");
    const StepFunction bumpy = StepFunction::box(d, Box{CubeId{1}, {{1, Interval(Rational(0), Rational(1, 2))}}}, Rational(1));
    EXPECT_FALSE(cube_constant_values(bumpy).has_value());
}
