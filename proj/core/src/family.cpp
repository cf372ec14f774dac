#include "sumrange/family.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "sumrange/errors.hpp"

namespace sumrange {

namespace {

char kind_letter(TermKind kind)
{
    switch (kind) {
    case TermKind::A: return 'a';
    case TermKind::B: return 'b';
    case TermKind::F: return 'f';
    case TermKind::G: return 'g';
    case TermKind::H: return 'h';
    }
    return '?';
}

std::int64_t parse_int(std::string_view text, std::string_view what)
{
    std::int64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last) {
        throw ParseError("bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

std::string point_value(const Rational& r)
{
    if (r.is_integer()) return r.numerator_str();
    return r.str();
}

} // namespace

// ---------------------------------------------------------------- TermId

std::string TermId::str() const
{
    std::string out(1, kind_letter(kind));
    if (tier > 0) out += std::to_string(tier);
    out += '.';
    out += std::to_string(level);
    for (std::int64_t i : indices) {
        out += '.';
        out += std::to_string(i);
    }
    return out;
}

TermId TermId::parse(std::string_view text)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t dot = text.find('.', start);
        parts.push_back(text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    if (parts.size() < 3 || parts[0].empty()) throw ParseError("bad term id '" + std::string(text) + "'");

    TermId id;
    switch (parts[0][0]) {
    case 'a': id.kind = TermKind::A; break;
    case 'b': id.kind = TermKind::B; break;
    case 'f': id.kind = TermKind::F; break;
    case 'g': id.kind = TermKind::G; break;
    case 'h': id.kind = TermKind::H; break;
    default: throw ParseError("bad term kind in '" + std::string(text) + "'");
    }
    if (parts[0].size() > 1) {
        if (id.kind != TermKind::H) throw ParseError("only h terms carry a tier: '" + std::string(text) + "'");
        id.tier = static_cast<int>(parse_int(parts[0].substr(1), "tier"));
        if (id.tier < 1) throw ParseError("bad tier in '" + std::string(text) + "'");
    }
    id.level = static_cast<int>(parse_int(parts[1], "level"));
    if (id.level < 1) throw ParseError("bad level in '" + std::string(text) + "'");
    for (std::size_t i = 2; i < parts.size(); ++i) {
        std::int64_t v = parse_int(parts[i], "index");
        if (v < 1) throw ParseError("indices are 1-based in '" + std::string(text) + "'");
        id.indices.push_back(v);
    }
    return id;
}

std::strong_ordering operator<=>(const TermId& a, const TermId& b)
{
    if (auto c = a.level <=> b.level; c != 0) return c;
    if (auto c = static_cast<int>(a.kind) <=> static_cast<int>(b.kind); c != 0) return c;
    if (auto c = a.tier <=> b.tier; c != 0) return c;
    return std::lexicographical_compare_three_way(a.indices.begin(), a.indices.end(), b.indices.begin(),
                                                  b.indices.end());
}

// ---------------------------------------------------------------- IndexSets

IndexSets IndexSets::linear(int max_level)
{
    if (max_level < 1) throw ConfigError("index sets need at least one level");
    std::vector<std::int64_t> sizes;
    for (int n = 1; n <= max_level; ++n) sizes.push_back(n);
    return IndexSets(std::move(sizes));
}

IndexSets::IndexSets(std::vector<std::int64_t> sizes) : sizes_(std::move(sizes))
{
    if (sizes_.empty()) throw ConfigError("index sets need at least one level");
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
        if (sizes_[i] < 1) throw ConfigError("|M_" + std::to_string(i + 1) + "| must be positive");
        if (i > 0 && sizes_[i] < sizes_[i - 1]) {
            throw ConfigError("index-set sizes must be non-decreasing (|M_" + std::to_string(i + 1) + "| < |M_" +
                              std::to_string(i) + "|)");
        }
    }
    if (sizes_.size() > 1 && sizes_.back() == sizes_.front()) {
        throw ConfigError("index-set sizes must grow over the configured range");
    }
}

std::int64_t IndexSets::size(int level) const
{
    if (level < 1 || level > max_level()) {
        throw ConfigError("index-set size for level " + std::to_string(level) + " is not configured (have 1.." +
                          std::to_string(max_level()) + ")");
    }
    return sizes_[static_cast<std::size_t>(level - 1)];
}

// ---------------------------------------------------------------- flavors, points

std::string to_string(Flavor flavor)
{
    switch (flavor) {
    case Flavor::Kadets: return "kadets";
    case Flavor::ThreeKadets: return "three-kadets";
    case Flavor::MultiPoint: return "multi";
    case Flavor::Transformed: return "transformed";
    }
    return "?";
}

Flavor flavor_from_string(std::string_view text)
{
    if (text == "kadets") return Flavor::Kadets;
    if (text == "three-kadets" || text == "3kadets" || text == "three") return Flavor::ThreeKadets;
    if (text == "multi" || text == "multipoint") return Flavor::MultiPoint;
    if (text == "transformed") return Flavor::Transformed;
    throw ConfigError("unknown flavor '" + std::string(text) + "'");
}

bool SumRangePoint::is_integral() const
{
    return std::all_of(values.begin(), values.end(), [](const Rational& r) { return r.is_integer(); });
}

std::string SumRangePoint::str() const
{
    std::string out = "(";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += point_value(values[i]);
    }
    return out + ")";
}

TransformSpec TransformSpec::zero(std::size_t dim)
{
    return TransformSpec{std::vector<std::vector<Rational>>(dim, std::vector<Rational>(dim))};
}

TransformSpec TransformSpec::identity(std::size_t dim)
{
    TransformSpec t = zero(dim);
    for (std::size_t i = 0; i < dim; ++i) t.matrix[i][i] = Rational(1);
    return t;
}

int stage_count(Flavor base_flavor, int points)
{
    switch (base_flavor) {
    case Flavor::Kadets: return 1;
    case Flavor::ThreeKadets: return 2;
    case Flavor::MultiPoint:
        if (points < 2) throw ConfigError("a multi-point family needs at least 2 points");
        return points - 1;
    case Flavor::Transformed: break;
    }
    throw StructuralError("a transformed family has no base chain of its own");
}

// ---------------------------------------------------------------- ChainLayout

ChainLayout::ChainLayout(Flavor base_flavor, int stages, IndexSets sizes)
    : flavor_(base_flavor), stages_(stages), sizes_(std::move(sizes))
{
    if (flavor_ == Flavor::Transformed) throw StructuralError("chain layouts describe untransformed families");
    if (stages_ < 1) throw ConfigError("a chain needs at least one stage");
    if (flavor_ == Flavor::Kadets && stages_ != 1) throw ConfigError("a Kadets family has exactly one stage");
    if (flavor_ == Flavor::ThreeKadets && stages_ != 2) throw ConfigError("a three-point family has two stages");
}

std::int64_t ChainLayout::alpha(int stage, int level) const
{
    if (stage < 0 || stage >= stages_ + 1) throw ConfigError("stage out of range");
    if (stage == 0) return sizes_.size(level);
    const __int128 v = static_cast<__int128>(alpha(stage - 1, level)) * alpha(stage - 1, level + 1);
    if (v > static_cast<__int128>(INT64_MAX / 4)) throw ConfigError("index sets too large");
    return static_cast<std::int64_t>(v);
}

TermKind ChainLayout::p0_kind() const { return flavor_ == Flavor::ThreeKadets ? TermKind::F : TermKind::A; }

TermKind ChainLayout::q_kind(int stage) const
{
    if (stage > 0) return TermKind::H;
    return flavor_ == Flavor::ThreeKadets ? TermKind::G : TermKind::B;
}

int ChainLayout::q_tier(int stage) const
{
    if (stage == 0 || flavor_ == Flavor::ThreeKadets) return 0;
    return stage;
}

std::int64_t ChainLayout::flatten(int stage, int level, std::int64_t row, std::int64_t col) const
{
    return (row - 1) * alpha(stage, level + 1) + col;
}

std::pair<std::int64_t, std::int64_t> ChainLayout::unflatten(int stage, int level, std::int64_t m) const
{
    const std::int64_t width = alpha(stage, level + 1);
    return {(m - 1) / width + 1, (m - 1) % width + 1};
}

TermId ChainLayout::p_term(int stage, int level, std::int64_t m) const
{
    if (stage == 0) return TermId{p0_kind(), 0, level, {m}};
    auto [row, col] = unflatten(stage - 1, level, m);
    return q_term(stage - 1, level, row, col);
}

TermId ChainLayout::q_term(int stage, int level, std::int64_t row, std::int64_t col) const
{
    if (stage == 0) return TermId{q_kind(0), 0, level, {row, col}};
    TermId id = p_term(stage, level, row);
    id.kind = q_kind(stage);
    id.tier = q_tier(stage);
    id.indices.push_back(col);
    return id;
}

int ChainLayout::q_stage(const TermId& id) const
{
    switch (id.kind) {
    case TermKind::A:
    case TermKind::F: return -1;
    case TermKind::B:
    case TermKind::G: return 0;
    case TermKind::H: return id.tier == 0 ? 1 : id.tier;
    }
    return -1;
}

std::pair<std::int64_t, std::int64_t> ChainLayout::q_position(const TermId& id) const
{
    const int s = q_stage(id);
    if (s < 0) throw StructuralError(id.str() + " is not a paired term");
    if (id.indices.size() != static_cast<std::size_t>(s) + 2) {
        throw StructuralError("term " + id.str() + " has the wrong number of indices");
    }
    if (s == 0) return {id.indices[0], id.indices[1]};
    TermId parent = id;
    parent.indices.pop_back();
    parent.kind = q_kind(s - 1);
    parent.tier = q_tier(s - 1);
    auto [r, c] = q_position(parent);
    return {flatten(s - 1, id.level, r, c), id.indices.back()};
}

std::vector<TermId> ChainLayout::enumerate(int depth) const
{
    std::vector<TermId> out;
    out.reserve(static_cast<std::size_t>(term_count(depth)));
    for (int n = 1; n <= depth; ++n) {
        const std::int64_t a0 = alpha(0, n);
        for (std::int64_t m = 1; m <= a0; ++m) out.push_back(TermId{p0_kind(), 0, n, {m}});
        std::size_t parents_begin = out.size();
        const std::int64_t a1 = alpha(0, n + 1);
        for (std::int64_t m = 1; m <= a0; ++m) {
            for (std::int64_t j = 1; j <= a1; ++j) out.push_back(TermId{q_kind(0), 0, n, {m, j}});
        }
        for (int s = 1; s < stages_; ++s) {
            const std::size_t parents_end = out.size();
            const std::int64_t width = alpha(s, n + 1);
            for (std::size_t p = parents_begin; p < parents_end; ++p) {
                for (std::int64_t k = 1; k <= width; ++k) {
                    TermId id = out[p];
                    id.kind = q_kind(s);
                    id.tier = q_tier(s);
                    id.indices.push_back(k);
                    out.push_back(std::move(id));
                }
            }
            parents_begin = parents_end;
        }
    }
    return out;
}

std::int64_t ChainLayout::term_count(int depth) const
{
    __int128 total = 0;
    for (int n = 1; n <= depth; ++n) {
        total += alpha(0, n);
        for (int s = 0; s < stages_; ++s) total += static_cast<__int128>(alpha(s, n)) * alpha(s, n + 1);
    }
    if (total > static_cast<__int128>(INT64_MAX / 4)) throw ConfigError("family too large");
    return static_cast<std::int64_t>(total);
}

// ---------------------------------------------------------------- Family

Family::Family(FamilyManifest manifest, std::vector<TermId> ids, std::shared_ptr<const TermSource> source)
    : manifest_(std::move(manifest)), ids_(std::move(ids)), source_(std::move(source))
{
    if (!source_) throw StructuralError("a family needs a term source");
    if (!std::is_sorted(ids_.begin(), ids_.end())) throw StructuralError("family term ids must be in canonical order");
    if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
        throw StructuralError("family term ids must be distinct");
    }
    const Flavor base = manifest_.flavor == Flavor::Transformed ? manifest_.base_flavor : manifest_.flavor;
    layout_ = std::make_shared<const ChainLayout>(base, stage_count(base, manifest_.points), manifest_.sizes);
}

bool Family::contains(const TermId& id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

StepFunction Family::term(const TermId& id) const
{
    if (overrides_) {
        auto it = overrides_->find(id);
        if (it != overrides_->end()) return it->second;
    }
    if (!contains(id)) throw StructuralError("term " + id.str() + " is not part of the family");
    return source_->make(id);
}

Family Family::with_term(const TermId& id, StepFunction f) const
{
    if (!contains(id)) throw StructuralError("term " + id.str() + " is not part of the family");
    if (f.domain() != domain()) throw DomainError("replacement term lives on a different domain");
    auto next = overrides_ ? std::make_shared<std::map<TermId, StepFunction>>(*overrides_)
                           : std::make_shared<std::map<TermId, StepFunction>>();
    (*next)[id] = std::move(f);
    Family copy = *this;
    copy.overrides_ = std::move(next);
    return copy;
}

const ChainLayout& Family::layout() const { return *layout_; }

} // namespace sumrange
