#include "sumrange/trace.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "sumrange/errors.hpp"

namespace sumrange {

namespace {

void require_target(const Family& family, const SumRangePoint& target)
{
    if (target.values.size() != family.domain().size()) {
        throw ConfigError("target has " + std::to_string(target.values.size()) + " values, the family has " +
                          std::to_string(family.domain().size()) + " cubes");
    }
}

std::string float_text(const Rational& r)
{
    std::ostringstream os;
    os << std::setprecision(17) << r.to_double();
    return os.str();
}

// Adds functions pairwise using a binary-counter stack of partial sums.
class PairwiseSum {
public:
    explicit PairwiseSum(Domain domain) : domain_(std::move(domain)) {}

    void add(StepFunction f)
    {
        std::size_t weight = 1;
        while (!stack_.empty() && stack_.back().first == weight) {
            f = stack_.back().second + f;
            stack_.pop_back();
            weight *= 2;
        }
        stack_.emplace_back(weight, std::move(f));
    }

    StepFunction result() const
    {
        StepFunction total = StepFunction::zero(domain_);
        for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) total = it->second + total;
        return total;
    }

private:
    Domain domain_;
    std::vector<std::pair<std::size_t, StepFunction>> stack_;
};

Rational max_of(const std::vector<Rational>& values)
{
    Rational best;
    for (const auto& v : values) best = std::max(best, v);
    return best;
}

} // namespace

void run_trace(const Family& family, const Schedule& schedule, const SumRangePoint& target, unsigned p,
               const TraceSink& sink)
{
    if (p < 1) throw ConfigError("moment order p must be at least 1");
    require_target(family, target);
    const Domain& dom = family.domain();
    StepFunction running = StepFunction::zero(dom);
    std::vector<Rational> dev;
    for (const Rational& c : target.values) dev.push_back(c.abs().pow(p));

    std::size_t block = 0;
    TraceRow row;
    row.cube_box_count.assign(dom.size(), 0);
    for (std::size_t i = 0; i < schedule.order.size(); ++i) {
        const TermId& id = schedule.order[i];
        const StepFunction t = family.term(id);
        for (std::size_t c = 0; c < dom.size(); ++c) {
            if (t.is_zero_on(dom[c])) continue;
            dev[c] += deviation_change(running, t, dom[c], target.values[c], p);
        }
        running = running + t;

        row.k = i + 1;
        row.term = id;
        row.cube_deviation = dev;
        row.total = Rational(0);
        for (const auto& d : dev) row.total += d;
        row.box_count = 0;
        for (std::size_t c = 0; c < dom.size(); ++c) {
            row.cube_box_count[c] = running.box_count(dom[c]);
            row.box_count += row.cube_box_count[c];
        }
        row.in_tail = i >= schedule.tail_start;
        row.block_level = 0;
        row.block_marker = false;
        if (!row.in_tail && block < schedule.blocks.size()) {
            row.block_level = schedule.blocks[block].level;
            if (row.k == schedule.blocks[block].end) {
                row.block_marker = true;
                ++block;
            }
        }
        row.partial_sum = &running;
        sink(row);
    }
}

Trace run_trace(const Family& family, const Schedule& schedule, const SumRangePoint& target, unsigned p)
{
    Trace trace;
    trace.label = schedule.label;
    trace.target = target;
    trace.p = p;
    trace.domain = family.domain();
    trace.rows.reserve(schedule.order.size());
    run_trace(family, schedule, target, p, [&](const TraceRow& row) {
        trace.rows.push_back(row);
        trace.rows.back().partial_sum = nullptr;
    });
    return trace;
}

// ---------------------------------------------------------------- CSV

TraceCsvWriter::TraceCsvWriter(std::ostream& os) : os_(os)
{
    os_ << "# deviation_num/deviation_den is exact; deviation_float is an advisory round-to-nearest rendering\n";
    os_ << "k,term_id,cube,deviation_num,deviation_den,deviation_float,box_count,is_block_marker\n";
}

void TraceCsvWriter::operator()(const TraceRow& row)
{
    const std::string id = row.term.str();
    const char* marker = row.block_marker ? "1" : "0";
    for (std::size_t c = 0; c < row.cube_deviation.size(); ++c) {
        const Rational& d = row.cube_deviation[c];
        os_ << row.k << ',' << id << ",Q" << (c + 1) << ',' << d.numerator_str() << ',' << d.denominator_str() << ','
            << float_text(d) << ',' << row.cube_box_count[c] << ',' << marker << '\n';
    }
    os_ << row.k << ',' << id << ",all," << row.total.numerator_str() << ',' << row.total.denominator_str() << ','
        << float_text(row.total) << ',' << row.box_count << ',' << marker << '\n';
}

TraceSink TraceCsvWriter::sink()
{
    return [this](const TraceRow& row) { (*this)(row); };
}

void write_trace_csv(std::ostream& os, const Trace& trace)
{
    TraceCsvWriter writer(os);
    for (const auto& row : trace.rows) writer(row);
}

BoxCountProfile box_count_profile(const Trace& trace)
{
    BoxCountProfile profile;
    for (const auto& row : trace.rows) {
        profile.max = std::max(profile.max, row.box_count);
        auto& level_max = profile.per_level_max[row.block_level];
        level_max = std::max(level_max, row.box_count);
    }
    if (!trace.rows.empty()) profile.final_count = trace.rows.back().box_count;
    return profile;
}

// ---------------------------------------------------------------- summary

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Convergent: return "convergent";
    case Verdict::Divergent: return "divergent";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::optional<SumRangePoint> cube_constant_values(const StepFunction& f)
{
    SumRangePoint p;
    for (CubeId c : f.domain()) {
        if (!footprint(f, c).empty()) return std::nullopt;
        p.values.push_back(integral(f, c));
    }
    return p;
}

TraceSummary::TraceSummary(const Family& family, const Schedule& schedule) : family_(family), schedule_(schedule)
{
    for (const Block& b : schedule.blocks) ++blocks_per_level_[b.level];
}

TraceSink TraceSummary::sink()
{
    return [this](const TraceRow& row) { (*this)(row); };
}

void TraceSummary::operator()(const TraceRow& row)
{
    ++steps_;
    profile_.max = std::max(profile_.max, row.box_count);
    auto& level_max = profile_.per_level_max[row.block_level];
    level_max = std::max(level_max, row.box_count);
    profile_.final_count = row.box_count;

    const bool settled = schedule_.convergent && row.k >= schedule_.settle_end;
    if (settled && !row.in_tail && !row.block_marker && row.k > schedule_.settle_end && open_violation_.empty()) {
        const Rational bound = Rational(2) / Rational(family_.sizes().size(row.block_level));
        for (std::size_t c = 0; c < row.cube_deviation.size(); ++c) {
            if (row.cube_deviation[c] > bound) {
                open_violation_ = "step " + std::to_string(row.k) + " (" + row.term.str() + ") Q" +
                                  std::to_string(c + 1) + " deviation " + row.cube_deviation[c].str() + " > " +
                                  bound.str();
                break;
            }
        }
    }
    if (!row.block_marker) return;

    Checkpoint cp;
    cp.k = row.k;
    cp.level = row.block_level;
    cp.index_in_level = ++seen_per_level_[row.block_level];
    cp.blocks_in_level = blocks_per_level_[row.block_level];
    cp.deviation = row.cube_deviation;
    cp.total = row.total;
    const Rational worst = max_of(cp.deviation);
    max_marker_ = std::max(max_marker_, worst);
    if (settled) {
        ++settled_markers_;
        max_settled_ = std::max(max_settled_, worst);
    }
    checkpoints_.push_back(std::move(cp));
    if (row.k == schedule_.tail_start && row.partial_sum) limit_ = cube_constant_values(*row.partial_sum);
}

Rational TraceSummary::limsup_estimate() const
{
    if (checkpoints_.empty()) return Rational(0);
    const int last = checkpoints_.back().level;
    Rational best;
    for (const auto& cp : checkpoints_) {
        if (cp.level == last) best = std::max(best, cp.total);
    }
    return best;
}

Rational TraceSummary::liminf_estimate() const
{
    if (checkpoints_.empty()) return Rational(0);
    const int last = checkpoints_.back().level;
    std::optional<Rational> best;
    for (const auto& cp : checkpoints_) {
        if (cp.level == last && (!best || cp.total < *best)) best = cp.total;
    }
    return *best;
}

Verdict TraceSummary::verdict() const
{
    if (schedule_.convergent && settled_markers_ > 0 && max_settled_.is_zero()) return Verdict::Convergent;
    if (limsup_estimate() >= Rational(1, 2)) return Verdict::Divergent;
    return Verdict::Inconclusive;
}

void TraceSummary::write_text(std::ostream& os) const
{
    os << "schedule " << schedule_.label << ", " << steps_ << " steps, " << checkpoints_.size() << " block markers\n";
    if (schedule_.target) os << "target " << schedule_.target->str() << "\n";
    os << "max block deviation " << max_marker_.str() << "\n";
    if (schedule_.convergent) {
        os << "max settled block deviation " << max_settled_.str() << " over " << settled_markers_ << " markers\n";
        os << "open-block bound 2/|M_n| " << (open_block_bound_holds() ? "holds" : "fails: " + open_violation_)
           << "\n";
    }
    os << "checkpoint liminf " << liminf_estimate().str() << ", limsup " << limsup_estimate().str() << "\n";
    os << "box-count peak " << profile_.max << ", final " << profile_.final_count << "\n";
    if (limit_) os << "partial sum at last block marker " << limit_->str() << "\n";
    os << "verdict " << to_string(verdict()) << "\n";
}

// ---------------------------------------------------------------- markers only

StepFunction partial_sum(const Family& family, const std::vector<TermId>& order, std::size_t begin, std::size_t end)
{
    if (begin > end || end > order.size()) throw ConfigError("partial-sum range out of bounds");
    PairwiseSum acc(family.domain());
    for (std::size_t i = begin; i < end; ++i) acc.add(family.term(order[i]));
    return acc.result();
}

MarkerEvaluation evaluate_markers(const Family& family, const Schedule& schedule, const SumRangePoint& target,
                                  unsigned p)
{
    if (p < 1) throw ConfigError("moment order p must be at least 1");
    require_target(family, target);
    const Domain& dom = family.domain();
    MarkerEvaluation out;
    StepFunction running = StepFunction::zero(dom);
    std::map<int, std::size_t> per_level;
    for (const Block& b : schedule.blocks) ++per_level[b.level];
    std::map<int, std::size_t> seen;
    std::size_t pos = 0;
    for (const Block& b : schedule.blocks) {
        running = running + partial_sum(family, schedule.order, pos, b.end);
        pos = b.end;
        Checkpoint cp;
        cp.k = b.end;
        cp.level = b.level;
        cp.index_in_level = ++seen[b.level];
        cp.blocks_in_level = per_level[b.level];
        for (std::size_t c = 0; c < dom.size(); ++c) {
            cp.deviation.push_back(deviation_moment(running, dom[c], target.values[c], p));
            cp.total += cp.deviation.back();
        }
        if (schedule.convergent && b.end >= schedule.settle_end) {
            ++out.settled_markers;
            out.max_settled_deviation = std::max(out.max_settled_deviation, max_of(cp.deviation));
        }
        out.checkpoints.push_back(std::move(cp));
    }
    out.limit = cube_constant_values(running);
    out.final_sum = running + partial_sum(family, schedule.order, pos, schedule.order.size());
    return out;
}

} // namespace sumrange
