#include "sumrange/family_verify.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <tuple>

#include "parallel.hpp"
#include "sumrange/errors.hpp"
#include "sumrange/step_function_io.hpp"

namespace sumrange {

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string values_text(const std::set<Rational>& values)
{
    std::string out = "{";
    bool first = true;
    for (const Rational& v : values) {
        if (!first) out += ',';
        first = false;
        out += v.str();
    }
    return out + "}";
}

std::string coords_text(const std::set<int>& coords)
{
    std::string out = "{";
    bool first = true;
    for (int c : coords) {
        if (!first) out += ',';
        first = false;
        out += "x" + std::to_string(c);
    }
    return out + "}";
}

// Collects per (axiom, scope, level) results, keeping the first failure.
class Recorder {
public:
    template <typename WitnessFn>
    void record(const std::string& axiom, CubeId cube, int level, bool ok, const std::string& term,
                const WitnessFn& witness)
    {
        AxiomCheck& c = slot(axiom, cube.name(), level);
        ++c.checked;
        if (!ok && c.passed) {
            c.passed = false;
            c.term = term;
            c.witness = witness();
        }
    }

    void equal(const std::string& axiom, CubeId cube, int level, const StepFunction& lhs, const StepFunction& rhs,
               const std::string& term)
    {
        const StepFunction l = lhs.restricted_to(cube);
        const StepFunction r = rhs.restricted_to(cube);
        record(axiom, cube, level, l == r, term, [&] { return to_text(l - r); });
    }

    void values_within(const std::string& axiom, CubeId cube, int level, const StepFunction& f,
                       const std::set<Rational>& allowed, const std::string& term)
    {
        std::set<Rational> values = f.value_set(cube);
        bool ok = std::includes(allowed.begin(), allowed.end(), values.begin(), values.end());
        record(axiom, cube, level, ok, term, [&] { return "values " + values_text(values); });
    }

    void footprint_within(const std::string& axiom, CubeId cube, int level, const StepFunction& f,
                          const std::set<int>& allowed, const std::string& term)
    {
        std::set<int> coords = footprint(f, cube);
        bool ok = std::includes(allowed.begin(), allowed.end(), coords.begin(), coords.end());
        record(axiom, cube, level, ok, term, [&] { return "depends on " + coords_text(coords); });
    }

    void norm_is(const std::string& axiom, CubeId cube, int level, const StepFunction& f, const Rational& expected,
                 const std::string& term)
    {
        Rational got = moment(f, cube, 1);
        record(axiom, cube, level, got == expected, term,
               [&] { return "norm " + got.str() + " expected " + expected.str(); });
    }

    void integrals_match(const std::string& axiom, CubeId a, CubeId b, int level, const StepFunction& f,
                         const std::string& term)
    {
        Rational ia = integral(f, a);
        Rational ib = integral(f, b);
        record(axiom, a, level, ia == ib, term,
               [&] { return a.name() + " " + ia.str() + " vs " + b.name() + " " + ib.str(); });
    }

    AxiomReport report() const
    {
        AxiomReport r;
        for (const auto& [key, check] : checks_) r.checks.push_back(check);
        return r;
    }

    void merge(const Recorder& other)
    {
        for (const auto& [key, check] : other.checks_) {
            auto [it, inserted] = checks_.emplace(key, check);
            if (inserted) continue;
            AxiomCheck& c = it->second;
            c.checked += check.checked;
            if (c.passed && !check.passed) {
                c.passed = false;
                c.term = check.term;
                c.witness = check.witness;
            }
        }
    }

private:
    AxiomCheck& slot(const std::string& axiom, const std::string& scope, int level)
    {
        auto key = std::make_tuple(level, scope, axiom);
        auto it = checks_.find(key);
        if (it == checks_.end()) {
            AxiomCheck c;
            c.axiom = axiom;
            c.scope = scope;
            c.level = level;
            it = checks_.emplace(key, std::move(c)).first;
        }
        return it->second;
    }

    std::map<std::tuple<int, std::string, std::string>, AxiomCheck> checks_;
};

struct Plan {
    std::vector<bool> pair;      // Kadets checks of pair s
    std::vector<bool> extension; // three-cube checks of extension s (index 0 unused)
    bool placement = false;
};

class Verifier {
public:
    Verifier(const Family& family, Plan plan)
        : family_(family), layout_(family.layout()), plan_(std::move(plan)),
          reference_(generated_source(family.manifest()))
    {
    }

    AxiomReport run(unsigned jobs)
    {
        struct Task {
            int stage;
            int level;
        };
        std::vector<Task> tasks;
        for (int n = 1; n <= family_.depth(); ++n) {
            for (int s = 0; s < layout_.stages(); ++s) {
                if (wants_stage(s)) tasks.push_back({s, n});
            }
        }
        Recorder total;
        std::mutex mutex;
        detail::parallel_for(tasks.size(), jobs, [&](std::size_t i) {
            Recorder local;
            scan(local, tasks[i].stage, tasks[i].level);
            std::lock_guard lock(mutex);
            total.merge(local);
        });
        if (plan_.placement) placement(total);
        return total.report();
    }

private:
    bool wants_stage(int s) const
    {
        const bool ext_here = s >= 1 && plan_.extension[static_cast<std::size_t>(s)];
        const bool ext_next = s + 1 < layout_.stages() && plan_.extension[static_cast<std::size_t>(s + 1)];
        return plan_.pair[static_cast<std::size_t>(s)] || ext_here || ext_next;
    }

    StepFunction term_or_reference(const TermId& id) const
    {
        if (id.level <= family_.depth()) return family_.term(id);
        return reference_->make(id);
    }

    std::vector<StepFunction> p_terms(int s, int n) const
    {
        std::vector<StepFunction> out;
        const std::int64_t count = layout_.alpha(s, n);
        out.reserve(static_cast<std::size_t>(count));
        for (std::int64_t m = 1; m <= count; ++m) out.push_back(term_or_reference(layout_.p_term(s, n, m)));
        return out;
    }

    // All checks involving Q_s terms at level n.
    void scan(Recorder& rec, int s, int n) const
    {
        const bool pair = plan_.pair[static_cast<std::size_t>(s)];
        const bool ext_h = s >= 1 && plan_.extension[static_cast<std::size_t>(s)];
        const bool ext_g = s + 1 < layout_.stages() && plan_.extension[static_cast<std::size_t>(s + 1)];
        const Domain& dom = family_.domain();
        const CubeId pc = layout_.pair_cube(s);
        const CubeId mid_h = ext_h ? layout_.middle_cube(s) : CubeId{};
        const CubeId mid_g = ext_g ? layout_.middle_cube(s + 1) : CubeId{};
        const CubeId right_g = ext_g ? layout_.pair_cube(s + 1) : CubeId{};
        const std::int64_t rows = layout_.alpha(s, n);
        const std::int64_t cols = layout_.alpha(s, n + 1);
        const Rational q_norm = Rational(1) / (Rational(rows) * Rational(cols));
        const std::set<int> p_coords{n};
        const std::set<int> q_coords{n, n + 1};

        const std::vector<StepFunction> pn = p_terms(s, n);
        const std::vector<StepFunction> pn1 = p_terms(s, n + 1);
        const StepFunction one_pc = StepFunction::constant(dom, pc, Rational(1));

        if (pair) {
            StepFunction psum = sum(dom, pn);
            rec.equal("p-partition-of-unity", pc, n, psum, one_pc, "level " + std::to_string(n));
            Rational supports;
            for (std::int64_t m = 1; m <= rows; ++m) {
                const StepFunction& p = pn[static_cast<std::size_t>(m - 1)];
                const std::string name = layout_.p_term(s, n, m).str();
                rec.norm_is("p-norm", pc, n, p, Rational(1) / Rational(rows), name);
                rec.footprint_within("p-footprint", pc, n, p, p_coords, name);
                rec.values_within("p-values", pc, n, p, {Rational(0), Rational(1)}, name);
                supports += support_measure(p, pc);
            }
            Rational union_support = support_measure(psum, pc);
            rec.record("p-disjoint", pc, n, supports == union_support, "level " + std::to_string(n),
                       [&] { return "supports add to " + supports.str() + ", union " + union_support.str(); });
        }

        std::vector<StepFunction> colsum(static_cast<std::size_t>(cols), StepFunction::zero(dom));
        StepFunction total = StepFunction::zero(dom);
        for (std::int64_t r = 1; r <= rows; ++r) {
            std::vector<StepFunction> row;
            row.reserve(static_cast<std::size_t>(cols));
            for (std::int64_t c = 1; c <= cols; ++c) {
                const TermId id = layout_.q_term(s, n, r, c);
                const std::string name = id.str();
                StepFunction q = family_.term(id);
                if (pair) {
                    rec.equal("q-product", pc, n, q,
                              -(pn[static_cast<std::size_t>(r - 1)].restricted_to(pc) *
                                pn1[static_cast<std::size_t>(c - 1)].restricted_to(pc)),
                              name);
                    rec.norm_is("q-norm", pc, n, q, q_norm, name);
                    rec.footprint_within("q-footprint", pc, n, q, q_coords, name);
                    rec.values_within("q-values", pc, n, q, {Rational(-1), Rational(0)}, name);
                }
                if (ext_h) {
                    rec.norm_is("h-norm", mid_h, n, q, q_norm, name);
                    rec.integrals_match("h-integrals", mid_h, pc, n, q, name);
                    rec.footprint_within("mid-footprint", mid_h, n, q, p_coords, name);
                }
                if (ext_g) {
                    rec.norm_is("g-norm", mid_g, n, q, q_norm, name);
                    rec.norm_is("g-norm", right_g, n, q, q_norm, name);
                    rec.integrals_match("g-integrals", mid_g, right_g, n, q, name);
                    rec.footprint_within("mid-footprint", mid_g, n, q, p_coords, name);
                }
                auto& cs = colsum[static_cast<std::size_t>(c - 1)];
                cs = cs + q;
                row.push_back(std::move(q));
            }
            const StepFunction rowsum = sum(dom, row);
            const StepFunction& p = pn[static_cast<std::size_t>(r - 1)];
            const std::string row_name = layout_.p_term(s, n, r).str();
            if (pair) rec.equal("p-row-sum", pc, n, p, -rowsum, row_name);
            if (ext_h) rec.equal("g-h-row", mid_h, n, p, -rowsum, row_name);
            if (ext_g) rec.values_within("g-row-values", mid_g, n, rowsum, {Rational(0), Rational(1)}, row_name);
            total = total + rowsum;
        }

        if (pair) {
            for (std::int64_t c = 1; c <= cols; ++c) {
                rec.equal("p-column-sum", pc, n, pn1[static_cast<std::size_t>(c - 1)],
                          -colsum[static_cast<std::size_t>(c - 1)], layout_.p_term(s, n + 1, c).str());
            }
            rec.equal("q-sum", pc, n, total, -one_pc, "level " + std::to_string(n));
        }
        if (ext_h) {
            rec.equal("h-total", mid_h, n, total, -StepFunction::constant(dom, mid_h, Rational(1)),
                      "level " + std::to_string(n));
            // Group the next level's G-terms and the H-columns by their second index j'.
            const std::int64_t groups = layout_.alpha(s - 1, n + 2);
            std::vector<StepFunction> lhs(static_cast<std::size_t>(groups), StepFunction::zero(dom));
            std::vector<StepFunction> rhs(static_cast<std::size_t>(groups), StepFunction::zero(dom));
            for (std::int64_t c = 1; c <= cols; ++c) {
                const std::size_t j = static_cast<std::size_t>(layout_.unflatten(s - 1, n + 1, c).second - 1);
                lhs[j] = lhs[j] + pn1[static_cast<std::size_t>(c - 1)].restricted_to(mid_h);
                rhs[j] = rhs[j] - colsum[static_cast<std::size_t>(c - 1)].restricted_to(mid_h);
            }
            for (std::int64_t j = 1; j <= groups; ++j) {
                rec.equal("level-coupling", mid_h, n, lhs[static_cast<std::size_t>(j - 1)],
                          rhs[static_cast<std::size_t>(j - 1)], "column " + std::to_string(j));
            }
        }
        if (ext_g) {
            rec.equal("g-total", mid_g, n, total, StepFunction::constant(dom, mid_g, Rational(1)),
                      "level " + std::to_string(n));
        }
    }

    std::set<int> expected_cubes(const TermId& id) const
    {
        const int s = layout_.q_stage(id);
        if (s < 0) return {1};
        std::set<int> cubes{layout_.pair_cube(s).index};
        if (s >= 1) cubes.insert(layout_.middle_cube(s).index);
        if (s + 1 < layout_.stages()) {
            cubes.insert(layout_.middle_cube(s + 1).index);
            cubes.insert(layout_.pair_cube(s + 1).index);
        }
        return cubes;
    }

    void placement(Recorder& rec) const
    {
        for (const TermId& id : family_.ids()) {
            const StepFunction f = family_.term(id);
            const std::set<int> allowed = expected_cubes(id);
            for (CubeId c : family_.domain()) {
                if (allowed.count(c.index)) continue;
                rec.record("cube-placement", c, id.level, f.is_zero_on(c), id.str(),
                           [&] { return to_text(f.restricted_to(c)); });
            }
        }
    }

    const Family& family_;
    const ChainLayout& layout_;
    Plan plan_;
    std::shared_ptr<const TermSource> reference_;
};

void require_verifiable(const Family& family)
{
    if (family.flavor() == Flavor::Transformed) {
        throw ConfigError("transformed families have no axiom set to verify; verify the base family");
    }
}

} // namespace

bool AxiomReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; });
}

std::size_t AxiomReport::failure_count() const
{
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const AxiomCheck& c) { return !c.passed; }));
}

std::vector<AxiomCheck> AxiomReport::failures() const
{
    std::vector<AxiomCheck> out;
    for (const auto& c : checks) {
        if (!c.passed) out.push_back(c);
    }
    return out;
}

bool AxiomReport::has(const std::string& axiom) const
{
    return std::any_of(checks.begin(), checks.end(), [&](const AxiomCheck& c) { return c.axiom == axiom; });
}

bool AxiomReport::failed(const std::string& axiom) const
{
    return std::any_of(checks.begin(), checks.end(),
                       [&](const AxiomCheck& c) { return c.axiom == axiom && !c.passed; });
}

void AxiomReport::append(const AxiomReport& other)
{
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

void AxiomReport::write_text(std::ostream& os) const
{
    std::size_t total = 0;
    for (const auto& c : checks) total += c.checked;
    for (const auto& c : checks) {
        if (c.passed) continue;
        os << "FAIL " << c.axiom << " " << c.scope << " level " << c.level << " at " << c.term << ": " << c.witness
           << "\n";
    }
    os << (passed() ? "all axioms hold" : "axiom failures: " + std::to_string(failure_count())) << " ("
       << checks.size() << " axiom/level groups, " << total << " checks)\n";
}

void AxiomReport::write_csv(std::ostream& os) const
{
    os << "axiom,scope,level,checked,status,term,witness\n";
    for (const auto& c : checks) {
        os << c.axiom << ',' << c.scope << ',' << c.level << ',' << c.checked << ',' << (c.passed ? "pass" : "fail")
           << ',' << csv_field(c.term) << ',' << csv_field(c.witness) << '\n';
    }
}

AxiomReport verify_kadets(const Family& family, unsigned jobs)
{
    if (family.flavor() != Flavor::Kadets) throw StructuralError("verify_kadets needs a Kadets family");
    Plan plan{{true}, {false}, true};
    return Verifier(family, plan).run(jobs);
}

AxiomReport verify_three_kadets(const Family& family, unsigned jobs)
{
    require_verifiable(family);
    const int stages = family.layout().stages();
    if (stages < 2) throw StructuralError("a three-cube structure needs a three-point or multi-point family");
    Plan plan;
    plan.pair.assign(static_cast<std::size_t>(stages), false);
    plan.extension.assign(static_cast<std::size_t>(stages), false);
    plan.pair[static_cast<std::size_t>(stages - 2)] = true;
    plan.pair[static_cast<std::size_t>(stages - 1)] = true;
    plan.extension[static_cast<std::size_t>(stages - 1)] = true;
    plan.placement = true;
    return Verifier(family, plan).run(jobs);
}

AxiomReport verify_family(const Family& family, unsigned jobs)
{
    require_verifiable(family);
    const int stages = family.layout().stages();
    Plan plan;
    plan.pair.assign(static_cast<std::size_t>(stages), true);
    plan.extension.assign(static_cast<std::size_t>(stages), true);
    plan.extension[0] = false;
    plan.placement = true;
    return Verifier(family, plan).run(jobs);
}

} // namespace sumrange
