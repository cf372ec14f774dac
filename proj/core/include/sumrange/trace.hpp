#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sumrange/family.hpp"
#include "sumrange/schedule.hpp"

namespace sumrange {

/// One step of a partial-sum trace.
struct TraceRow {
    /// 1-based step number: the partial sum covers order[0, k).
    std::size_t k = 0;
    TermId term;
    /// Integral of |S_k - target|^p per cube, in domain order.
    std::vector<Rational> cube_deviation;
    Rational total;
    std::vector<std::size_t> cube_box_count;
    std::size_t box_count = 0;
    bool block_marker = false;
    /// Level of the block the step belongs to; 0 for tail steps.
    int block_level = 0;
    bool in_tail = false;
    /// The running sum S_k; only valid inside a sink callback.
    const StepFunction* partial_sum = nullptr;
};

using TraceSink = std::function<void(const TraceRow&)>;

/// Accumulates the schedule's partial sums in canonical form and reports
/// the exact deviation from target after every step. Only the cubes the
/// current term touches are re-measured, and only over its support.
void run_trace(const Family& family, const Schedule& schedule, const SumRangePoint& target, unsigned p,
               const TraceSink& sink);

struct Trace {
    std::string label;
    SumRangePoint target;
    unsigned p = 1;
    Domain domain;
    std::vector<TraceRow> rows;
};

/// Collects every row (partial_sum left null).
Trace run_trace(const Family& family, const Schedule& schedule, const SumRangePoint& target, unsigned p);

/// CSV with a '#' advisory comment, then
/// k,term_id,cube,deviation_num,deviation_den,deviation_float,box_count,is_block_marker
/// with one row per cube and an "all" row per step.
class TraceCsvWriter {
public:
    explicit TraceCsvWriter(std::ostream& os);
    void operator()(const TraceRow& row);
    TraceSink sink();

private:
    std::ostream& os_;
};

void write_trace_csv(std::ostream& os, const Trace& trace);

struct BoxCountProfile {
    std::size_t max = 0;
    std::map<int, std::size_t> per_level_max;
    std::size_t final_count = 0;
};

BoxCountProfile box_count_profile(const Trace& trace);

/// A block marker of a trace.
struct Checkpoint {
    std::size_t k = 0;
    int level = 0;
    /// 1-based index of the block within its level (m0 for the level's
    /// theta = m0 / blocks_in_level).
    std::size_t index_in_level = 0;
    std::size_t blocks_in_level = 0;
    std::vector<Rational> deviation;
    Rational total;
};

enum class Verdict { Convergent, Divergent, Inconclusive };
std::string to_string(Verdict v);

/// Streaming summary of a trace: checkpoints, settled-marker deviations,
/// the open-block bound 2/|M_n|, the box-count profile, and the limit at
/// the last block marker.
class TraceSummary {
public:
    TraceSummary(const Family& family, const Schedule& schedule);

    void operator()(const TraceRow& row);
    TraceSink sink();

    std::size_t steps() const noexcept { return steps_; }
    const std::vector<Checkpoint>& checkpoints() const noexcept { return checkpoints_; }
    /// Number of markers at or after the schedule's settle position.
    std::size_t settled_markers() const noexcept { return settled_markers_; }
    /// Largest per-cube deviation over settled markers.
    const Rational& max_settled_deviation() const noexcept { return max_settled_; }
    /// Largest per-cube deviation over all markers.
    const Rational& max_marker_deviation() const noexcept { return max_marker_; }
    /// Every step strictly inside a settled block has deviation <= 2/|M_n| on every cube.
    bool open_block_bound_holds() const noexcept { return open_violation_.empty(); }
    const std::string& open_block_violation() const noexcept { return open_violation_; }
    const BoxCountProfile& profile() const noexcept { return profile_; }
    /// Per-cube constants of the partial sum at the last block marker, when it is cube-wise constant.
    const std::optional<SumRangePoint>& limit() const noexcept { return limit_; }
    /// Largest total deviation over the checkpoints of the deepest level.
    Rational limsup_estimate() const;
    Rational liminf_estimate() const;
    Verdict verdict() const;

    void write_text(std::ostream& os) const;

private:
    const Family& family_;
    const Schedule& schedule_;
    std::map<int, std::size_t> blocks_per_level_;
    std::map<int, std::size_t> seen_per_level_;
    std::size_t steps_ = 0;
    std::size_t settled_markers_ = 0;
    std::vector<Checkpoint> checkpoints_;
    Rational max_settled_;
    Rational max_marker_;
    std::string open_violation_;
    BoxCountProfile profile_;
    std::optional<SumRangePoint> limit_;
};

/// Per-cube constants of f, or nothing when f is not constant on some cube.
std::optional<SumRangePoint> cube_constant_values(const StepFunction& f);

/// Sum of order[begin, end) of a schedule, added pairwise.
StepFunction partial_sum(const Family& family, const std::vector<TermId>& order, std::size_t begin, std::size_t end);

/// Partial sums at block markers only, each block added pairwise; much
/// cheaper than a full trace for large families.
struct MarkerEvaluation {
    std::vector<Checkpoint> checkpoints;
    std::size_t settled_markers = 0;
    Rational max_settled_deviation;
    std::optional<SumRangePoint> limit;
    StepFunction final_sum;
};

MarkerEvaluation evaluate_markers(const Family& family, const Schedule& schedule, const SumRangePoint& target,
                                  unsigned p = 1);

} // namespace sumrange
