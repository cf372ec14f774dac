#include "sumrange/battery.hpp"

#include <chrono>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "parallel.hpp"
#include "sumrange/errors.hpp"
#include "sumrange/family.hpp"
#include "sumrange/family_verify.hpp"
#include "sumrange/lemmas.hpp"
#include "sumrange/schedule.hpp"
#include "sumrange/trace.hpp"

namespace sumrange {

namespace {

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void fail(const std::string& why)
    {
        if (passed) detail.str("");
        if (!passed) detail << "; ";
        passed = false;
        detail << why;
    }
    void note(const std::string& text)
    {
        if (!passed) return;
        if (detail.tellp() > 0) detail << ", ";
        detail << text;
    }
};

std::string first_failure(const AxiomReport& report)
{
    for (const AxiomCheck& c : report.checks) {
        if (!c.passed) return c.axiom + " on " + c.scope + " level " + std::to_string(c.level) + " at " + c.term;
    }
    return {};
}

void check_axioms(Outcome& out, const AxiomReport& report, const std::string& what)
{
    std::size_t checked = 0;
    for (const AxiomCheck& c : report.checks) checked += c.checked;
    if (report.passed()) {
        out.note(what + ": " + std::to_string(report.checks.size()) + " axiom groups, " + std::to_string(checked) +
                 " checks");
    } else {
        out.fail(what + ": " + std::to_string(report.failure_count()) + " failing groups, first " +
                 first_failure(report));
    }
}

SumRangePoint constant_point(std::size_t cubes, const Rational& v)
{
    SumRangePoint p;
    p.values.assign(cubes, v);
    return p;
}

// Convergent schedule whose settled markers are exactly on target and
// whose open blocks stay within 2/|M_n|.
void check_settles(Outcome& out, const Family& family, const Schedule& schedule, const SumRangePoint& target)
{
    TraceSummary summary(family, schedule);
    run_trace(family, schedule, target, 1, summary.sink());
    const std::string name = schedule.label;
    if (summary.settled_markers() == 0) {
        out.fail(name + ": no settled block markers");
        return;
    }
    if (!summary.max_settled_deviation().is_zero()) {
        out.fail(name + ": settled marker deviation " + summary.max_settled_deviation().str());
        return;
    }
    if (!summary.open_block_bound_holds()) {
        out.fail(name + ": open block " + summary.open_block_violation());
        return;
    }
    out.note(name + " -> " + target.str() + ": " + std::to_string(summary.settled_markers()) +
             " markers at 0, open blocks within 2/|M_n|");
}

void criterion_1(Outcome& out, const BatteryOptions& opt, double& seconds)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Family kadets = build_kadets(8);
    check_axioms(out, verify_kadets(kadets, opt.jobs), "kadets L=8, " + std::to_string(kadets.size()) + " terms");
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (seconds >= 30) out.fail("runtime " + std::to_string(seconds) + " s exceeds 30 s");
}

void criterion_2(Outcome& out, const BatteryOptions& opt, double& seconds)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Family three = build_three_kadets(6);
    check_axioms(out, verify_three_kadets(three, opt.jobs),
                 "three-kadets L=6, " + std::to_string(three.size()) + " terms");
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (seconds >= 60) out.fail("runtime " + std::to_string(seconds) + " s exceeds 60 s");
}

void criterion_3(Outcome& out, const BatteryOptions&)
{
    const Family kadets = build_kadets(8);
    const Schedule sigma = schedule_sigma(kadets);
    TraceSummary s(kadets, sigma);
    run_trace(kadets, sigma, constant_point(1, Rational(0)), 1, s.sink());
    if (!s.max_marker_deviation().is_zero()) out.fail("sigma marker deviation " + s.max_marker_deviation().str());
    if (!s.open_block_bound_holds()) out.fail("sigma open block " + s.open_block_violation());
    if (out.passed) out.note("sigma: " + std::to_string(s.checkpoints().size()) + " markers at 0");
    check_settles(out, kadets, schedule_tau(kadets), constant_point(1, Rational(1)));
}

void criterion_4(Outcome& out, const BatteryOptions&)
{
    const Family three = build_three_kadets(6);
    for (ThreePoint p : {ThreePoint::P00, ThreePoint::P10, ThreePoint::P11}) {
        const Schedule sch = schedule_three_point(three, p);
        check_settles(out, three, sch, *sch.target);
    }
}

void criterion_5(Outcome& out, const BatteryOptions&)
{
    const Family three = build_three_kadets(8);
    const Schedule sch = schedule_divergent(three);
    SumRangePoint target;
    target.values = {Rational(0), Rational(1), Rational(1)};
    const MarkerEvaluation ev = evaluate_markers(three, sch, target);
    std::size_t compared = 0;
    std::set<int> halves;
    for (const Checkpoint& cp : ev.checkpoints) {
        const Rational theta(static_cast<std::int64_t>(cp.index_in_level), static_cast<std::int64_t>(cp.blocks_in_level));
        const Rational expected = Rational(2) * theta * (Rational(1) - theta);
        const Rational& q2 = cp.deviation[1];
        ++compared;
        if (q2 != expected) {
            out.fail("level " + std::to_string(cp.level) + " theta " + theta.str() + ": Q2 deviation " + q2.str() +
                     ", expected " + expected.str());
            return;
        }
        if (theta == Rational(1, 2)) {
            if (q2 != Rational(1, 2)) out.fail("half-level deviation " + q2.str());
            halves.insert(cp.level);
        }
    }
    for (int n : {2, 4, 6, 8}) {
        if (!halves.count(n)) out.fail("no half-level checkpoint at level " + std::to_string(n));
    }
    out.note(std::to_string(compared) + " checkpoints equal 2 theta (1 - theta) on Q2, 1/2 at theta = 1/2 for n = 2, 4, 6, 8");
}

void compare_moments(Outcome& out, const Family& family, const Schedule& schedule)
{
    const SumRangePoint target = *schedule.target;
    std::vector<std::vector<Rational>> by_p[3];
    for (unsigned p = 1; p <= 3; ++p) {
        run_trace(family, schedule, target, p,
                  [&](const TraceRow& row) { by_p[p - 1].push_back(row.cube_deviation); });
    }
    std::size_t compared = 0;
    for (std::size_t k = 0; k < by_p[0].size(); ++k) {
        for (std::size_t c = 0; c < by_p[0][k].size(); ++c) {
            ++compared;
            for (unsigned p : {2u, 3u}) {
                if (by_p[p - 1][k][c] > by_p[0][k][c]) {
                    out.fail(schedule.label + " step " + std::to_string(k + 1) + " Q" + std::to_string(c + 1) +
                             ": moment " + std::to_string(p) + " " + by_p[p - 1][k][c].str() + " > moment 1 " +
                             by_p[0][k][c].str());
                    return;
                }
            }
        }
    }
    out.note(schedule.label + ": " + std::to_string(compared) + " step/cube pairs");
}

void criterion_6(Outcome& out, const BatteryOptions&)
{
    const Family kadets = build_kadets(8);
    compare_moments(out, kadets, schedule_sigma(kadets));
    const Family three = build_three_kadets(6);
    compare_moments(out, three, schedule_three_point(three, ThreePoint::P00));
}

void criterion_7(Outcome& out, const BatteryOptions& opt, double& seconds)
{
    const auto t0 = std::chrono::steady_clock::now();
    for (const char* name : {"l0", "l1", "l2", "drift"}) {
        const SuiteReport r = run_suite(name, opt.cases, opt.seed, opt.jobs);
        if (!r.passed()) {
            out.fail(std::string(name) + ": " + std::to_string(r.failures()) + " failures");
            continue;
        }
        std::string text = std::string(name) + " " + std::to_string(r.count(LemmaStatus::Pass)) + " pass";
        if (std::string(name) == "l2") {
            std::size_t battery_ok = 0;
            for (std::size_t i = 0; i < l2_battery_size(); ++i) {
                if (r.rows[i].hypothesis && r.rows[i].conclusion == LemmaStatus::Pass) ++battery_ok;
            }
            if (battery_ok < 20) out.fail("l2 battery has only " + std::to_string(battery_ok) + " certified instances");
            text += " (battery " + std::to_string(battery_ok) + ", " + std::to_string(r.count(LemmaStatus::Vacuous)) +
                    " vacuous)";
        }
        if (std::string(name) == "l0" || std::string(name) == "l1") {
            if (r.count(LemmaStatus::Pass) < opt.cases) out.fail(std::string(name) + " has vacuous instances");
        }
        out.note(text);
    }
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (seconds >= 120) out.fail("runtime " + std::to_string(seconds) + " s exceeds 120 s");
}

void criterion_8(Outcome& out, const BatteryOptions& opt)
{
    const Family multi = build_multipoint(4, 4);
    check_axioms(out, verify_three_kadets(multi, opt.jobs), "r=4 L=4, " + std::to_string(multi.size()) + " terms");
    const std::vector<Schedule> schedules = convergent_schedules(multi);
    std::vector<MarkerEvaluation> evals(schedules.size());
    detail::parallel_for(schedules.size(), opt.jobs, [&](std::size_t i) {
        evals[i] = evaluate_markers(multi, schedules[i], *schedules[i].target);
    });
    std::vector<SumRangePoint> limits;
    for (std::size_t i = 0; i < schedules.size(); ++i) {
        const Schedule& sch = schedules[i];
        const MarkerEvaluation& ev = evals[i];
        if (ev.settled_markers == 0 || !ev.max_settled_deviation.is_zero()) {
            out.fail(sch.label + ": settled deviation " + ev.max_settled_deviation.str());
            continue;
        }
        if (!ev.limit || *ev.limit != *sch.target) {
            out.fail(sch.label + ": limit " + (ev.limit ? ev.limit->str() : std::string("not cube-wise constant")));
            continue;
        }
        if (!ev.limit->is_integral()) out.fail(sch.label + ": limit " + ev.limit->str() + " is not integral");
        limits.push_back(*ev.limit);
    }
    std::set<std::string> distinct;
    std::size_t ones_on_last = 0;
    for (const auto& p : limits) {
        distinct.insert(p.str());
        if (p.values.back() == Rational(1)) ++ones_on_last;
    }
    if (limits.size() != 4 || distinct.size() != 4) {
        out.fail(std::to_string(distinct.size()) + " distinct limits");
    }
    if (ones_on_last != 1) out.fail(std::to_string(ones_on_last) + " limits are 1 on the last cube");
    std::string pts;
    for (const auto& p : limits) pts += (pts.empty() ? "" : " ") + p.str();
    out.note("limits " + pts);
}

void criterion_9(Outcome& out, const BatteryOptions&)
{
    const Family three = build_three_kadets(6);
    const std::vector<SumRangePoint> base = expected_sum_range(three);
    const std::size_t dim = paired_dimension(three.domain().size());
    TransformSpec collapse = TransformSpec::zero(dim);
    collapse.matrix[dim - 1][dim - 1] = Rational(-1);
    const std::pair<const char*, TransformSpec> matrices[] = {
        {"T=0", TransformSpec::zero(dim)}, {"T=I", TransformSpec::identity(dim)}, {"T=rank-deficient", collapse}};
    for (const auto& [name, t] : matrices) {
        const Family transformed = apply_transform(three, t);
        const std::vector<Schedule> schedules = convergent_schedules(transformed);
        std::set<std::string> distinct;
        bool ok = true;
        for (std::size_t i = 0; i < schedules.size(); ++i) {
            const SumRangePoint expected = transform_point(base[i], t);
            const MarkerEvaluation ev = evaluate_markers(transformed, schedules[i], expected);
            if (!ev.limit || *ev.limit != expected) {
                out.fail(std::string(name) + " " + schedules[i].label + ": limit " +
                         (ev.limit ? ev.limit->str() : std::string("not cube-wise constant")) + ", expected " +
                         expected.str());
                ok = false;
                continue;
            }
            distinct.insert(ev.limit->str());
        }
        if (ok) out.note(std::string(name) + " " + std::to_string(distinct.size()) + " distinct limits");
    }
}

void criterion_10(Outcome& out, const BatteryOptions&)
{
    const Family kadets = build_kadets(8);
    const Schedule sigma = schedule_sigma(kadets);
    TraceSummary s(kadets, sigma);
    run_trace(kadets, sigma, constant_point(1, Rational(0)), 1, s.sink());
    const IndexSets& sizes = kadets.sizes();
    for (const auto& [level, peak] : s.profile().per_level_max) {
        if (level < 1) continue;
        const auto bound = static_cast<std::size_t>(sizes.size(level) * (sizes.size(level + 1) + 1));
        if (peak > bound) {
            out.fail("level " + std::to_string(level) + " box count " + std::to_string(peak) + " > " +
                     std::to_string(bound));
        }
    }
    if (s.profile().final_count != 0) out.fail("final box count " + std::to_string(s.profile().final_count));
    out.note("peak " + std::to_string(s.profile().max) + ", final " + std::to_string(s.profile().final_count));
}

const char* kTitles[kCriterionCount] = {
    "Kadets axioms, L=8",
    "three-Kadets axioms, L=6",
    "sigma/tau convergence, L=8",
    "three-point convergence, L=6",
    "divergence witness, L=8",
    "Lp moments bounded by the first moment",
    "lemma suites",
    "multipoint r=4, L=4",
    "affine transforms",
    "sigma box-count telescoping, L=8",
};

} // namespace

CriterionResult run_criterion(int number, const BatteryOptions& options)
{
    if (number < 1 || number > kCriterionCount) throw ConfigError("no criterion " + std::to_string(number));
    CriterionResult result;
    result.number = number;
    result.title = kTitles[number - 1];
    Outcome out;
    double timed = -1;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        switch (number) {
        case 1: criterion_1(out, options, timed); break;
        case 2: criterion_2(out, options, timed); break;
        case 3: criterion_3(out, options); break;
        case 4: criterion_4(out, options); break;
        case 5: criterion_5(out, options); break;
        case 6: criterion_6(out, options); break;
        case 7: criterion_7(out, options, timed); break;
        case 8: criterion_8(out, options); break;
        case 9: criterion_9(out, options); break;
        case 10: criterion_10(out, options); break;
        }
    } catch (const std::exception& e) {
        out.fail(std::string("exception: ") + e.what());
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.passed = out.passed;
    result.detail = out.detail.str();
    return result;
}

std::vector<CriterionResult> run_battery(const BatteryOptions& options,
                                         const std::function<void(const CriterionResult&)>& progress)
{
    std::vector<CriterionResult> out;
    for (int n = 1; n <= kCriterionCount; ++n) {
        out.push_back(run_criterion(n, options));
        if (progress) progress(out.back());
    }
    return out;
}

void write_criterion_line(std::ostream& os, const CriterionResult& r)
{
    std::ostringstream secs;
    secs << std::fixed << std::setprecision(2) << r.seconds;
    os << "criterion " << r.number << ": " << (r.passed ? "PASS" : "FAIL") << ' ' << r.title << " (" << r.detail
       << ") [" << secs.str() << " s]\n";
}

} // namespace sumrange
