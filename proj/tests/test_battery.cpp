#include <gtest/gtest.h>

#include <sstream>

#include "sumrange/battery.hpp"
#include "sumrange/errors.hpp"

using namespace sumrange;

TEST(Battery, OutOfRangeCriterion)
{
    EXPECT_THROW(run_criterion(0), ConfigError);
    EXPECT_THROW(run_criterion(kCriterionCount + 1), ConfigError);
}

TEST(Battery, DivergentCriterionPasses)
{
    const CriterionResult r = run_criterion(5);
    EXPECT_EQ(r.number, 5);
    EXPECT_TRUE(r.passed) << r.detail;
    EXPECT_FALSE(r.title.empty());
}

TEST(Battery, BoxCountCriterionPasses)
{
    const CriterionResult r = run_criterion(10);
    EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Battery, LineFormat)
{
    CriterionResult r;
    r.number = 3;
    r.title = "example";
    r.passed = false;
    r.detail = "something broke";
    r.seconds = 1.25;
    std::ostringstream os;
    write_criterion_line(os, r);
    const std::string line = os.str();
    EXPECT_EQ(line.rfind("criterion 3: FAIL example (something broke)", 0), 0u) << line;
    EXPECT_EQ(line.back(), '\n');
    r.passed = true;
    std::ostringstream ok;
    write_criterion_line(ok, r);
    EXPECT_NE(ok.str().find(": PASS "), std::string::npos);
}
