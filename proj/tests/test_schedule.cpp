#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "sumrange/errors.hpp"
#include "sumrange/family.hpp"
#include "sumrange/schedule.hpp"
#include "sumrange/trace.hpp"

using namespace sumrange;

namespace {

std::vector<std::string> prefix(const Schedule& s, std::size_t n)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n && i < s.size(); ++i) out.push_back(s.order[i].str());
    return out;
}

void expect_well_formed(const Family& f, const Schedule& s)
{
    std::vector<TermId> sorted = s.order;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, f.ids()) << s.label;
    std::size_t last = 0;
    for (const Block& b : s.blocks) {
        EXPECT_GT(b.end, last) << s.label;
        last = b.end;
    }
    if (!s.blocks.empty()) {
        EXPECT_EQ(s.blocks.back().end, s.tail_start) << s.label;
    }
    EXPECT_LE(s.tail_start, s.size());
    if (s.settle_end != s.size() + 1) {
        EXPECT_LE(s.settle_end, s.tail_start) << s.label;
    }
}

} // namespace

TEST(Sigma, OrderStartsWithRows)
{
    const Family k = build_kadets(3);
    const Schedule s = schedule_sigma(k);
    EXPECT_EQ(prefix(s, 8), (std::vector<std::string>{"a.1.1", "b.1.1.1", "b.1.1.2", "a.2.1", "b.2.1.1", "b.2.1.2",
                                                      "b.2.1.3", "a.2.2"}));
    expect_well_formed(k, s);
    EXPECT_TRUE(s.convergent);
    ASSERT_TRUE(s.target.has_value());
    EXPECT_EQ(s.target->str(), "(0)");
    EXPECT_EQ(s.tail_start, s.size());
    ASSERT_EQ(s.blocks.size(), 6u);
    EXPECT_EQ(s.blocks[0].end, 3u);
    EXPECT_EQ(s.blocks[0].level, 1);
    EXPECT_EQ(s.blocks[5].level, 3);
}

TEST(Tau, ColumnsFollowAndTailIsLastLevel)
{
    const Family k = build_kadets(3);
    const Schedule s = schedule_tau(k);
    EXPECT_EQ(prefix(s, 7), (std::vector<std::string>{"a.1.1", "a.2.1", "b.1.1.1", "a.2.2", "b.1.1.2", "a.3.1",
                                                      "b.2.1.1"}));
    expect_well_formed(k, s);
    EXPECT_EQ(s.tail_start, 14u);
    EXPECT_EQ(s.target->str(), "(1)");
    for (std::size_t i = s.tail_start; i < s.size(); ++i) EXPECT_EQ(s.order[i].level, 3);
}

TEST(Schedules, WrongFlavorIsRejected)
{
    const Family k = build_kadets(2);
    const Family t = build_three_kadets(2);
    EXPECT_THROW(schedule_sigma(t), StructuralError);
    EXPECT_THROW(schedule_tau(t), StructuralError);
    EXPECT_THROW(schedule_divergent(k), StructuralError);
    EXPECT_THROW(schedule_three_point(k, ThreePoint::P10), StructuralError);
    EXPECT_THROW(schedule_multipoint(t, 7), ConfigError);
    const ChainChoice one[] = {ChainChoice::Sigma};
    EXPECT_THROW(schedule_chain(t, one, "x"), StructuralError);
}

TEST(Schedules, ThreePointTargets)
{
    const Family t = build_three_kadets(3);
    const std::vector<Schedule> all = convergent_schedules(t);
    const std::vector<SumRangePoint> points = expected_sum_range(t);
    ASSERT_EQ(all.size(), 3u);
    for (std::size_t i = 0; i < all.size(); ++i) {
        expect_well_formed(t, all[i]);
        EXPECT_TRUE(all[i].convergent);
        EXPECT_EQ(*all[i].target, points[i]);
    }
    EXPECT_EQ(schedule_three_point(t, ThreePoint::P00).target->str(), "(0,0,0)");
    EXPECT_EQ(schedule_three_point(t, ThreePoint::P10).target->str(), "(1,0,0)");
    EXPECT_EQ(schedule_three_point(t, ThreePoint::P11).target->str(), "(1,1,1)");
}

TEST(Schedules, DivergentInterleavesColumns)
{
    const Family t = build_three_kadets(2);
    const Schedule s = schedule_divergent(t);
    expect_well_formed(t, s);
    EXPECT_FALSE(s.convergent);
    EXPECT_EQ(s.target->str(), "(0,1,1)");
    EXPECT_EQ(prefix(s, 7), (std::vector<std::string>{"f.1.1", "g.1.1.1", "g.1.1.2", "f.2.1", "g.2.1.1",
                                                      "h.1.1.1.1", "h.1.1.2.1"}));
    ASSERT_EQ(s.blocks.size(), 3u);
    EXPECT_EQ(s.blocks[1].end, 13u);
    EXPECT_EQ(s.blocks[1].level, 2);
}

TEST(Schedules, MultiPointLabels)
{
    const Family m = build_multipoint(4, 2);
    const std::vector<std::string> labels = schedule_labels(m);
    EXPECT_NE(std::find(labels.begin(), labels.end(), "point:3"), labels.end());
    for (int k = 0; k <= 3; ++k) {
        const Schedule s = schedule_by_label(m, "point:" + std::to_string(k));
        expect_well_formed(m, s);
        const SumRangePoint& p = *s.target;
        for (std::size_t c = 0; c < p.values.size(); ++c) {
            const bool first_pairs = static_cast<int>(c) < 2 * k - 1;
            EXPECT_EQ(p.values[c], Rational(first_pairs ? 1 : 0)) << k << " cube " << c;
        }
    }
    EXPECT_THROW(schedule_by_label(m, "point:"), ConfigError);
    EXPECT_THROW(schedule_by_label(m, "point:x"), ConfigError);
}

TEST(Schedules, CustomValidation)
{
    const Family k = build_kadets(2);
    std::vector<TermId> order = k.ids();
    std::reverse(order.begin(), order.end());
    const Schedule s = schedule_custom(k, order);
    EXPECT_EQ(s.label, "custom");
    EXPECT_EQ(s.order, order);
    EXPECT_FALSE(s.convergent);

    std::vector<TermId> short_order(order.begin(), order.end() - 1);
    EXPECT_THROW(schedule_custom(k, short_order), ValidationError);
    std::vector<TermId> dup = order;
    dup.back() = dup.front();
    EXPECT_THROW(schedule_custom(k, dup), ValidationError);
    std::vector<TermId> foreign = order;
    foreign.back() = TermId::parse("a.9.1");
    EXPECT_THROW(schedule_custom(k, foreign), ValidationError);
}

TEST(Schedules, ShuffleIsSeeded)
{
    const Family k = build_kadets(3);
    const Schedule a = schedule_shuffled(k, 5);
    const Schedule b = schedule_shuffled(k, 5);
    const Schedule c = schedule_shuffled(k, 6);
    EXPECT_EQ(a.order, b.order);
    EXPECT_NE(a.order, c.order);
    expect_well_formed(k, a);
    EXPECT_EQ(schedule_by_label(k, "shuffle", 5).order, a.order);
}

TEST(Schedules, ByLabel)
{
    const Family k = build_kadets(2);
    EXPECT_EQ(schedule_by_label(k, "sigma").order, schedule_sigma(k).order);
    EXPECT_EQ(schedule_by_label(k, "identity").order, k.ids());
    EXPECT_THROW(schedule_by_label(k, "zigzag"), ConfigError);
    const Family t = build_three_kadets(2);
    EXPECT_EQ(schedule_by_label(t, "p11").order, schedule_three_point(t, ThreePoint::P11).order);
}

TEST(Schedules, FullSumIsOrderIndependent)
{
    const Family t = build_three_kadets(2);
    const StepFunction reference = partial_sum(t, t.ids(), 0, t.size());
    for (const std::string label : {"p00", "p10", "p11", "divergent", "shuffle"}) {
        const Schedule s = schedule_by_label(t, label, 3);
        EXPECT_EQ(partial_sum(t, s.order, 0, s.size()), reference) << label;
    }
}
