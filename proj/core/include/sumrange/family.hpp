#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sumrange/rational.hpp"
#include "sumrange/step_function.hpp"

namespace sumrange {

enum class TermKind { A, B, F, G, H };

/// Identifies one function of a family: a_m^n, b_{m,j}^n, f_m^n, g_{m,j}^n,
/// h_{m,j,k}^n. Multi-point families stack further h generations; their
/// tier says which extension produced them (tier 0 for the plain h family).
///
/// Text form is "<kind><tier?>.<level>.<i1>.<i2>...", e.g. "b.1.1.2" or
/// "h2.1.1.2.3.5". Ordering is by level, then kind (A<B<F<G<H), then tier,
/// then indices lexicographically.
struct TermId {
    TermKind kind = TermKind::A;
    int tier = 0;
    int level = 1;
    std::vector<std::int64_t> indices;

    std::string str() const;
    static TermId parse(std::string_view text);

    friend bool operator==(const TermId&, const TermId&) = default;
    friend std::strong_ordering operator<=>(const TermId& a, const TermId& b);
};

/// Level-indexed sizes |M_1|, |M_2|, ... with J_n = M_{n+1} and K_n = M_{n+1} x J_{n+1}.
class IndexSets {
public:
    /// |M_n| = n for n = 1..max_level.
    static IndexSets linear(int max_level);

    /// sizes[0] is |M_1|. Sizes must be positive and non-decreasing, and
    /// strictly grow across the range when more than one level is given.
    explicit IndexSets(std::vector<std::int64_t> sizes);

    std::int64_t size(int level) const;
    int max_level() const noexcept { return static_cast<int>(sizes_.size()); }
    const std::vector<std::int64_t>& sizes() const noexcept { return sizes_; }

    friend bool operator==(const IndexSets&, const IndexSets&) = default;

private:
    std::vector<std::int64_t> sizes_;
};

enum class Flavor { Kadets, ThreeKadets, MultiPoint, Transformed };

std::string to_string(Flavor flavor);
Flavor flavor_from_string(std::string_view text);

/// Per-cube constants describing one point of a sum range.
struct SumRangePoint {
    std::vector<Rational> values;

    bool is_integral() const;
    std::string str() const;
    friend bool operator==(const SumRangePoint&, const SumRangePoint&) = default;
};

/// Square rational matrix acting on the cube-wise constants with paired
/// cubes identified: coordinate 0 is Q1, coordinate i >= 1 is the common
/// value on Q_{2i} and Q_{2i+1}.
struct TransformSpec {
    std::vector<std::vector<Rational>> matrix;

    std::size_t dimension() const { return matrix.size(); }
    static TransformSpec zero(std::size_t dim);
    static TransformSpec identity(std::size_t dim);
    friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

/// Describes the chain of Kadets pairs (P_s, Q_s), s = 0..stages-1, that
/// every generated family is made of.
///
/// P_0 is the a- (or f-) family. Q_0 is the b- (or g-) family. For s >= 1,
/// P_s = Q_{s-1} and Q_s is the s-th generation of h-terms. Each pair is a
/// Kadets family on its own cube: Q1 for s = 0, Q_{2s+1} otherwise, with
/// Q_{2s} the averaging cube of extension s. The index set of P_s at level
/// n has alpha(s, n) elements, alpha(0, n) = |M_n| and
/// alpha(s, n) = alpha(s-1, n) * alpha(s-1, n+1), pairs flattened
/// lexicographically as (row, col) -> (row - 1) * alpha(s-1, n+1) + col.
class ChainLayout {
public:
    ChainLayout(Flavor base_flavor, int stages, IndexSets sizes);

    Flavor base_flavor() const noexcept { return flavor_; }
    int stages() const noexcept { return stages_; }
    int cube_count() const noexcept { return 2 * stages_ - 1; }
    const IndexSets& sizes() const noexcept { return sizes_; }

    std::int64_t alpha(int stage, int level) const;
    /// Highest level whose |M_n| the layout needs for terms up to depth.
    int required_level(int depth) const { return depth + stages_; }

    CubeId pair_cube(int stage) const { return CubeId{stage == 0 ? 1 : 2 * stage + 1}; }
    /// Cube on which extension `stage` (>= 1) averages the pair below it.
    CubeId middle_cube(int stage) const { return CubeId{2 * stage}; }

    TermId p_term(int stage, int level, std::int64_t m) const;
    TermId q_term(int stage, int level, std::int64_t row, std::int64_t col) const;

    /// Stage whose Q-set contains the id, or -1 for P_0 terms.
    int q_stage(const TermId& id) const;
    /// (row, col) of a Q-term within its pair.
    std::pair<std::int64_t, std::int64_t> q_position(const TermId& id) const;

    std::int64_t flatten(int stage, int level, std::int64_t row, std::int64_t col) const;
    std::pair<std::int64_t, std::int64_t> unflatten(int stage, int level, std::int64_t m) const;

    /// All term ids of levels 1..depth in canonical order.
    std::vector<TermId> enumerate(int depth) const;
    std::int64_t term_count(int depth) const;

    friend bool operator==(const ChainLayout&, const ChainLayout&) = default;

private:
    TermKind p0_kind() const;
    TermKind q_kind(int stage) const;
    int q_tier(int stage) const;

    Flavor flavor_;
    int stages_;
    IndexSets sizes_;
};

/// Produces the function of a term on demand.
class TermSource {
public:
    virtual ~TermSource() = default;
    virtual StepFunction make(const TermId& id) const = 0;
};

struct FamilyManifest {
    Flavor flavor = Flavor::Kadets;
    int depth = 1;
    IndexSets sizes = IndexSets::linear(2);
    Domain domain;
    /// Number of sum-range points the construction advertises (2 for Kadets,
    /// 3 for the three-point family, r for multi-point families).
    int points = 2;
    /// Underlying flavor for transformed families; equals flavor otherwise.
    Flavor base_flavor = Flavor::Kadets;
    std::optional<TransformSpec> transform;
};

/// A truncated family: every term of levels 1..depth.
///
/// Terms are produced lazily by a TermSource, so large truncations cost
/// memory only for the id table. Values are immutable; with_term returns a
/// modified copy and leaves the original untouched.
class Family {
public:
    Family(FamilyManifest manifest, std::vector<TermId> ids, std::shared_ptr<const TermSource> source);

    const FamilyManifest& manifest() const noexcept { return manifest_; }
    Flavor flavor() const noexcept { return manifest_.flavor; }
    Flavor base_flavor() const noexcept { return manifest_.base_flavor; }
    int depth() const noexcept { return manifest_.depth; }
    const Domain& domain() const noexcept { return manifest_.domain; }
    const IndexSets& sizes() const noexcept { return manifest_.sizes; }
    int points() const noexcept { return manifest_.points; }

    const std::vector<TermId>& ids() const noexcept { return ids_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool contains(const TermId& id) const;

    /// Throws StructuralError for ids outside the truncation.
    StepFunction term(const TermId& id) const;

    Family with_term(const TermId& id, StepFunction f) const;
    bool has_overrides() const noexcept { return overrides_ && !overrides_->empty(); }

    /// Layout implied by the manifest (flavor, points, sizes).
    const ChainLayout& layout() const;

    const std::shared_ptr<const TermSource>& source() const noexcept { return source_; }

private:
    FamilyManifest manifest_;
    std::vector<TermId> ids_;
    std::shared_ptr<const TermSource> source_;
    std::shared_ptr<const std::map<TermId, StepFunction>> overrides_;
    std::shared_ptr<const ChainLayout> layout_;
};

/// Number of Kadets pairs in the chain of a (base) flavor with `points` points.
int stage_count(Flavor base_flavor, int points);

/// Formula source for an untransformed manifest. It also produces terms
/// beyond the truncation depth as long as the index sets cover them.
std::shared_ptr<const TermSource> generated_source(const FamilyManifest& manifest);

// ---------------------------------------------------------------- builders

/// a_m^n = indicator of x_n in [(m-1)/|M_n|, m/|M_n|), b_{m,j}^n = -a_m^n a_j^{n+1}.
/// sizes must cover levels 1..depth+1.
Family build_kadets(int depth, const IndexSets& sizes);
Family build_kadets(int depth);

/// The explicit three-cube f/g/h family with |M_n| = n.
Family build_three_kadets(int depth);

/// Adds two cubes and a new generation of h-terms to a Kadets or
/// multi-point family; the result has one more sum-range point.
Family extend_multipoint(const Family& family, int depth);

/// Kadets family extended points - 2 times; 2 * points - 3 cubes.
Family build_multipoint(int points, int depth, const IndexSets& sizes);
Family build_multipoint(int points, int depth);

/// Sum range the construction advertises, in schedule order.
std::vector<SumRangePoint> expected_sum_range(const Family& family);

/// Per-cube integrals (the projection onto cube-wise constants).
std::vector<Rational> project_P(const StepFunction& f);

/// d -> d + T P(d) for every term. Throws StructuralError when some term
/// has different integrals on paired cubes, ConfigError on dimension mismatch.
Family apply_transform(const Family& family, const TransformSpec& transform);

/// Dimension of the paired cube-constant space for a domain of n cubes.
std::size_t paired_dimension(std::size_t cube_count);

/// Applies I + T to a per-cube point in paired coordinates.
SumRangePoint transform_point(const SumRangePoint& point, const TransformSpec& transform);

/// Cube-wise constant function with the given per-cube values.
StepFunction cube_constants(const Domain& domain, const std::vector<Rational>& values);

} // namespace sumrange
