#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sumrange/family.hpp"

namespace sumrange {

/// How the terms of one Kadets pair (P_s, Q_s) follow each P-term:
/// Sigma puts the row {Q_s(n; m, j) : j} right after P_s(n; m), Tau the
/// column {Q_s(n-1; l, m) : l}.
enum class ChainChoice { Sigma, Tau };

struct Block {
    /// Position one past the block's last term (the block marker).
    std::size_t end = 0;
    /// Level of the P_0 term(s) opening the block.
    int level = 0;
};

/// An enumeration order of a truncated family.
///
/// Blocks partition order[0, tail_start); every term after tail_start is a
/// truncation remainder whose owner lies beyond the depth, kept in family
/// order so the schedule stays a permutation.
struct Schedule {
    std::string label;
    std::vector<TermId> order;
    std::vector<Block> blocks;
    std::size_t tail_start = 0;
    /// Chain choices the order was generated from (empty for custom orders).
    std::vector<ChainChoice> choices;
    /// Whether the construction makes the block-marker partial sums converge.
    bool convergent = false;
    /// Point the partial sums are compared against (convergent: the limit).
    std::optional<SumRangePoint> target;
    /// From this position on, every block marker sits exactly on target;
    /// size() + 1 when no marker of the truncation settles.
    std::size_t settle_end = 0;

    std::size_t size() const noexcept { return order.size(); }
};

/// Builds the order from per-stage choices; choices.size() must equal the
/// number of stages of the family's chain.
Schedule schedule_chain(const Family& family, std::span<const ChainChoice> choices, std::string label);

Schedule schedule_sigma(const Family& family);
Schedule schedule_tau(const Family& family);

enum class ThreePoint { P00, P10, P11 };
Schedule schedule_three_point(const Family& family, ThreePoint point);

/// Rows of G after each f, each g followed by its column of H one level down.
Schedule schedule_divergent(const Family& family);

/// tau on the first k stages, sigma on the rest; limit is 1 on the cubes of
/// the first k pairs and 0 elsewhere.
Schedule schedule_multipoint(const Family& family, int k);

/// Any permutation of the family's terms; throws ValidationError otherwise.
Schedule schedule_custom(const Family& family, std::vector<TermId> order, std::string label = "custom");

/// Seeded uniform shuffle of the family order.
Schedule schedule_shuffled(const Family& family, std::uint64_t seed);

/// Resolves sigma, tau, p00, p10, p11, divergent, point:K, shuffle, identity.
Schedule schedule_by_label(const Family& family, const std::string& label, std::uint64_t seed = 0);

/// One schedule per advertised sum-range point, in expected_sum_range order.
std::vector<Schedule> convergent_schedules(const Family& family);

/// Labels accepted by schedule_by_label for the family.
std::vector<std::string> schedule_labels(const Family& family);

} // namespace sumrange
