#include "sumrange/schedule.hpp"

#include <algorithm>
#include <functional>

#include "sumrange/errors.hpp"
#include "sumrange/random.hpp"

namespace sumrange {

namespace {

Flavor base_of(const Family& family)
{
    return family.flavor() == Flavor::Transformed ? family.base_flavor() : family.flavor();
}

SumRangePoint chain_target(const Family& family, std::span<const ChainChoice> choices)
{
    const ChainLayout& layout = family.layout();
    SumRangePoint p;
    p.values.assign(static_cast<std::size_t>(layout.cube_count()), Rational(0));
    for (int s = 0; s < layout.stages(); ++s) {
        if (choices[static_cast<std::size_t>(s)] != ChainChoice::Tau) continue;
        p.values[static_cast<std::size_t>(layout.pair_cube(s).index - 1)] = Rational(1);
        if (s >= 1) p.values[static_cast<std::size_t>(layout.middle_cube(s).index - 1)] = Rational(1);
    }
    if (family.flavor() == Flavor::Transformed) p = transform_point(p, *family.manifest().transform);
    return p;
}

std::string choices_text(std::span<const ChainChoice> choices)
{
    std::string out;
    for (ChainChoice c : choices) out += c == ChainChoice::Sigma ? 's' : 't';
    return out;
}

void require_stages(const Family& family, int stages, const std::string& what)
{
    if (family.layout().stages() != stages) {
        throw StructuralError(what + " does not apply to a " + to_string(family.flavor()) + " family with " +
                              std::to_string(family.points()) + " points");
    }
}

} // namespace

Schedule schedule_chain(const Family& family, std::span<const ChainChoice> choices, std::string label)
{
    const ChainLayout& layout = family.layout();
    const int stages = layout.stages();
    if (static_cast<int>(choices.size()) != stages) {
        throw StructuralError("schedule needs " + std::to_string(stages) + " chain choices, got " +
                              std::to_string(choices.size()) + " (" + choices_text(choices) + ")");
    }
    Schedule sch;
    sch.label = std::move(label);
    sch.choices.assign(choices.begin(), choices.end());
    sch.order.reserve(family.size());

    auto emit = [&](TermId id) {
        if (!family.contains(id)) throw StructuralError("schedule term " + id.str() + " is not in the family");
        sch.order.push_back(std::move(id));
    };
    std::function<void(int, int, std::int64_t)> follow = [&](int s, int n, std::int64_t m) {
        if (s == stages) return;
        if (choices[static_cast<std::size_t>(s)] == ChainChoice::Sigma) {
            const std::int64_t cols = layout.alpha(s, n + 1);
            for (std::int64_t col = 1; col <= cols; ++col) {
                emit(layout.q_term(s, n, m, col));
                follow(s + 1, n, layout.flatten(s, n, m, col));
            }
        } else if (n >= 2) {
            const std::int64_t rows = layout.alpha(s, n - 1);
            for (std::int64_t row = 1; row <= rows; ++row) {
                emit(layout.q_term(s, n - 1, row, m));
                follow(s + 1, n - 1, layout.flatten(s, n - 1, row, m));
            }
        }
    };

    for (int n = 1; n <= family.depth(); ++n) {
        const std::int64_t count = layout.alpha(0, n);
        for (std::int64_t m = 1; m <= count; ++m) {
            emit(layout.p_term(0, n, m));
            follow(0, n, m);
            sch.blocks.push_back(Block{sch.order.size(), n});
        }
    }
    if (choices[0] == ChainChoice::Tau) {
        // Level-1 P-terms have nothing to follow them; they form one block.
        auto first_level2 = std::find_if(sch.blocks.begin(), sch.blocks.end(), [](const Block& b) { return b.level > 1; });
        if (first_level2 != sch.blocks.begin()) sch.blocks.erase(sch.blocks.begin(), first_level2 - 1);
    }
    sch.tail_start = sch.order.size();

    std::vector<TermId> emitted = sch.order;
    std::sort(emitted.begin(), emitted.end());
    std::vector<TermId> tail;
    std::set_difference(family.ids().begin(), family.ids().end(), emitted.begin(), emitted.end(),
                        std::back_inserter(tail));
    emitted.clear();
    emitted.shrink_to_fit();
    for (auto& id : tail) sch.order.push_back(std::move(id));

    int leading_tau = 0;
    while (leading_tau < stages && choices[static_cast<std::size_t>(leading_tau)] == ChainChoice::Tau) ++leading_tau;
    bool rest_sigma = std::all_of(choices.begin() + leading_tau, choices.end(),
                                  [](ChainChoice c) { return c == ChainChoice::Sigma; });
    sch.convergent = rest_sigma;
    sch.target = chain_target(family, choices);
    if (leading_tau == 0) {
        sch.settle_end = 0;
    } else {
        sch.settle_end = sch.order.size() + 1;
        for (const Block& b : sch.blocks) {
            if (b.level == leading_tau) sch.settle_end = b.end;
        }
    }
    return sch;
}

Schedule schedule_sigma(const Family& family)
{
    if (base_of(family) != Flavor::Kadets) throw StructuralError("sigma orders a Kadets family");
    const ChainChoice c[] = {ChainChoice::Sigma};
    return schedule_chain(family, c, "sigma");
}

Schedule schedule_tau(const Family& family)
{
    if (base_of(family) != Flavor::Kadets) throw StructuralError("tau orders a Kadets family");
    const ChainChoice c[] = {ChainChoice::Tau};
    return schedule_chain(family, c, "tau");
}

Schedule schedule_three_point(const Family& family, ThreePoint point)
{
    require_stages(family, 2, "a three-point schedule");
    switch (point) {
    case ThreePoint::P00: {
        const ChainChoice c[] = {ChainChoice::Sigma, ChainChoice::Sigma};
        return schedule_chain(family, c, "p00");
    }
    case ThreePoint::P10: {
        const ChainChoice c[] = {ChainChoice::Tau, ChainChoice::Sigma};
        return schedule_chain(family, c, "p10");
    }
    case ThreePoint::P11: {
        const ChainChoice c[] = {ChainChoice::Tau, ChainChoice::Tau};
        return schedule_chain(family, c, "p11");
    }
    }
    throw StructuralError("unknown three-point schedule");
}

Schedule schedule_divergent(const Family& family)
{
    require_stages(family, 2, "the divergent schedule");
    const ChainChoice c[] = {ChainChoice::Sigma, ChainChoice::Tau};
    return schedule_chain(family, c, "divergent");
}

Schedule schedule_multipoint(const Family& family, int k)
{
    const int stages = family.layout().stages();
    if (k < 0 || k > stages) {
        throw ConfigError("point index " + std::to_string(k) + " out of range 0.." + std::to_string(stages));
    }
    std::vector<ChainChoice> c(static_cast<std::size_t>(stages), ChainChoice::Sigma);
    for (int s = 0; s < k; ++s) c[static_cast<std::size_t>(s)] = ChainChoice::Tau;
    return schedule_chain(family, c, "point:" + std::to_string(k));
}

Schedule schedule_custom(const Family& family, std::vector<TermId> order, std::string label)
{
    if (order.size() != family.size()) {
        throw ValidationError("order has " + std::to_string(order.size()) + " terms, the family has " +
                              std::to_string(family.size()));
    }
    std::vector<TermId> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end()) {
        throw ValidationError("term " + dup->str() + " appears more than once");
    }
    if (sorted != family.ids()) {
        for (const TermId& id : sorted) {
            if (!family.contains(id)) throw ValidationError("term " + id.str() + " is not in the family");
        }
        throw ValidationError("order is not a permutation of the family");
    }
    Schedule sch;
    sch.label = std::move(label);
    sch.order = std::move(order);
    sch.tail_start = sch.order.size();
    sch.settle_end = sch.order.size() + 1;
    return sch;
}

Schedule schedule_shuffled(const Family& family, std::uint64_t seed)
{
    std::vector<TermId> order = family.ids();
    Rng rng(seed);
    rng.shuffle(order);
    return schedule_custom(family, std::move(order), "shuffle");
}

Schedule schedule_by_label(const Family& family, const std::string& label, std::uint64_t seed)
{
    if (label == "sigma") return schedule_sigma(family);
    if (label == "tau") return schedule_tau(family);
    if (label == "p00") return schedule_three_point(family, ThreePoint::P00);
    if (label == "p10") return schedule_three_point(family, ThreePoint::P10);
    if (label == "p11") return schedule_three_point(family, ThreePoint::P11);
    if (label == "divergent") return schedule_divergent(family);
    if (label == "shuffle") return schedule_shuffled(family, seed);
    if (label == "identity") return schedule_custom(family, family.ids(), "identity");
    if (label.rfind("point:", 0) == 0) {
        const std::string k = label.substr(6);
        if (k.empty() || k.find_first_not_of("0123456789") != std::string::npos || k.size() > 6) {
            throw ConfigError("bad point index in '" + label + "'");
        }
        return schedule_multipoint(family, std::stoi(k));
    }
    throw ConfigError("unknown schedule '" + label + "'");
}

std::vector<Schedule> convergent_schedules(const Family& family)
{
    std::vector<Schedule> out;
    const int stages = family.layout().stages();
    for (int k = 0; k <= stages; ++k) out.push_back(schedule_multipoint(family, k));
    return out;
}

std::vector<std::string> schedule_labels(const Family& family)
{
    std::vector<std::string> out;
    const int stages = family.layout().stages();
    if (stages == 1) out = {"sigma", "tau"};
    if (stages == 2) out = {"p00", "p10", "p11", "divergent"};
    for (int k = 0; k <= stages; ++k) out.push_back("point:" + std::to_string(k));
    out.push_back("shuffle");
    out.push_back("identity");
    return out;
}

} // namespace sumrange
