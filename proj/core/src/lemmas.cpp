#include "sumrange/lemmas.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include "parallel.hpp"
#include "sumrange/errors.hpp"
#include "sumrange/family.hpp"
#include "sumrange/random.hpp"
#include "sumrange/schedule.hpp"

namespace sumrange {

namespace {

const CubeId kCube{1};

std::string factor_name(int coord)
{
    switch (coord) {
    case kFactorA: return "A";
    case kFactorB: return "B";
    case kFactorC: return "C";
    }
    return "x" + std::to_string(coord);
}

void require_single_cube(const StepFunction& f, const std::string& what)
{
    if (f.domain().size() != 1) throw ValidationError(what + " must live on a single cube");
}

void require_footprint(const StepFunction& f, const std::set<int>& allowed, const std::string& what)
{
    require_single_cube(f, what);
    for (int coord : footprint(f, f.domain()[0])) {
        if (!allowed.count(coord)) {
            throw ValidationError(what + " depends on " + factor_name(coord) + ", outside its declared factors");
        }
    }
}

bool footprint_within(const StepFunction& f, const std::set<int>& allowed)
{
    if (f.domain().size() != 1) return false;
    for (int coord : footprint(f, f.domain()[0])) {
        if (!allowed.count(coord)) return false;
    }
    return true;
}

bool integer_valued(const StepFunction& f)
{
    for (CubeId c : f.domain()) {
        for (const Rational& v : f.value_set(c)) {
            if (!v.is_integer()) return false;
        }
    }
    return true;
}

std::set<Rational> breakpoints(const StepFunction& f, int coord)
{
    std::set<Rational> cuts{Rational(0), Rational(1)};
    for (const Term& t : f.terms()) {
        auto it = t.box.constraints.find(coord);
        if (it == t.box.constraints.end()) continue;
        cuts.insert(it->second.lo);
        cuts.insert(it->second.hi);
    }
    return cuts;
}

void require_cuts(const std::vector<Rational>& cuts, std::size_t cells)
{
    if (cuts.size() != cells + 1) throw ValidationError("cut list does not match the value count");
    if (cuts.front() != Rational(0) || cuts.back() != Rational(1)) throw ValidationError("cuts must run from 0 to 1");
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        if (!(cuts[i - 1] < cuts[i])) throw ValidationError("cuts must increase");
    }
}

Rational one_norm_with_constant(const StepFunction& f, const Rational& c)
{
    Rational total;
    for (CubeId cube : f.domain()) total += deviation_moment(f, cube, -c, 1);
    return total;
}

} // namespace

Domain product_domain() { return make_domain(1); }

StepFunction factor_function(int coord, const std::vector<Rational>& cuts, const std::vector<Rational>& values)
{
    require_cuts(cuts, values.size());
    std::vector<Term> terms;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].is_zero()) continue;
        Box box{kCube, {}};
        box.constraints.emplace(coord, Interval(cuts[i], cuts[i + 1]));
        terms.push_back(Term{std::move(box), values[i]});
    }
    return StepFunction::from_terms(product_domain(), terms);
}

StepFunction grid_function(int x, const std::vector<Rational>& x_cuts, int y, const std::vector<Rational>& y_cuts,
                           const std::vector<std::vector<Rational>>& values)
{
    if (x == y) throw ValidationError("grid factors must differ");
    require_cuts(x_cuts, values.size());
    std::vector<Term> terms;
    for (std::size_t i = 0; i < values.size(); ++i) {
        require_cuts(y_cuts, values[i].size());
        for (std::size_t j = 0; j < values[i].size(); ++j) {
            if (values[i][j].is_zero()) continue;
            Box box{kCube, {}};
            box.constraints.emplace(x, Interval(x_cuts[i], x_cuts[i + 1]));
            box.constraints.emplace(y, Interval(y_cuts[j], y_cuts[j + 1]));
            terms.push_back(Term{std::move(box), values[i][j]});
        }
    }
    return StepFunction::from_terms(product_domain(), terms);
}

StepFunction factor_indicator(int coord, const Rational& lo, const Rational& hi)
{
    Box box{kCube, {}};
    box.constraints.emplace(coord, Interval(lo, hi));
    return StepFunction::box(product_domain(), box, Rational(1));
}

// ---------------------------------------------------------------- l0

L0Result check_l0(const StepFunction& f, const StepFunction& g)
{
    require_footprint(f, {kFactorA}, "f");
    require_footprint(g, {kFactorB}, "g");
    L0Result r;
    r.norm_f = moment(f, 1);
    r.norm_g = moment(g, 1);
    r.support_f = support_measure(f, f.domain()[0]);
    r.lhs = moment(f + g, 1);
    r.rhs = r.norm_f + r.norm_g * (Rational(1) - Rational(2) * r.support_f);
    r.holds = r.lhs >= r.rhs;
    return r;
}

// ---------------------------------------------------------------- fibers

std::vector<Fiber> fibers(const StepFunction& f)
{
    require_footprint(f, {kFactorA, kFactorB}, "f");
    const std::vector<Term> terms = f.terms();
    const std::set<Rational> cut_set = breakpoints(f, kFactorB);
    const std::vector<Rational> cuts(cut_set.begin(), cut_set.end());
    std::vector<Fiber> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        std::map<Rational, Rational> weight;
        Rational covered;
        for (const Term& t : terms) {
            auto b = t.box.constraints.find(kFactorB);
            if (b != t.box.constraints.end() && !(b->second.lo <= cuts[i] && cuts[i + 1] <= b->second.hi)) continue;
            auto a = t.box.constraints.find(kFactorA);
            const Rational len = a == t.box.constraints.end() ? Rational(1) : a->second.length();
            weight[t.value] += len;
            covered += len;
        }
        if (covered < Rational(1)) weight[Rational(0)] += Rational(1) - covered;
        Fiber fiber;
        fiber.cell = Interval(cuts[i], cuts[i + 1]);
        fiber.weights.assign(weight.begin(), weight.end());
        out.push_back(std::move(fiber));
    }
    return out;
}

Rational fiber_cost(const Fiber& fiber, const Rational& x)
{
    Rational cost;
    for (const auto& [v, w] : fiber.weights) cost += w * (v - x).abs();
    return cost;
}

Rational fiber_minimizer(const Fiber& fiber, bool integer_only)
{
    if (fiber.weights.empty()) return Rational(0);
    Rational total;
    for (const auto& [v, w] : fiber.weights) total += w;
    Rational cumulative;
    Rational lo = fiber.weights.back().first;
    for (const auto& [v, w] : fiber.weights) {
        cumulative += w;
        if (Rational(2) * cumulative >= total) {
            lo = v;
            break;
        }
    }
    if (!integer_only || lo.is_integer()) return lo;
    const Rational down = lo.floor();
    const Rational up = lo.ceil();
    return fiber_cost(fiber, up) < fiber_cost(fiber, down) ? up : down;
}

StepFunction fiber_best_approx(const StepFunction& f, bool integer_only)
{
    std::vector<Term> terms;
    for (const Fiber& fiber : fibers(f)) {
        const Rational x = fiber_minimizer(fiber, integer_only);
        if (x.is_zero()) continue;
        Box box{f.domain()[0], {}};
        box.constraints.emplace(kFactorB, fiber.cell);
        terms.push_back(Term{std::move(box), x});
    }
    return StepFunction::from_terms(f.domain(), terms);
}

// ---------------------------------------------------------------- l1

L1Report check_l1(const StepFunction& f, const StepFunction& g, const Rational& eps)
{
    require_footprint(f, {kFactorA, kFactorB}, "f");
    require_footprint(g, {kFactorB, kFactorC}, "g");
    L1Report r;
    r.eps = eps;
    r.dist_fg = moment(f - g, 1);
    r.precondition = r.dist_fg <= eps;
    if (!r.precondition) return r;
    r.integer_only = integer_valued(f) && integer_valued(g);
    r.h = fiber_best_approx(f, r.integer_only);
    r.dist_hf = moment(r.h - f, 1);
    r.dist_hg = moment(r.h - g, 1);
    r.strong = r.dist_hf <= eps;
    r.hf_within_2eps = r.dist_hf <= Rational(2) * eps;
    r.hg_within_2eps = r.dist_hg <= Rational(2) * eps;
    r.integral_ok = !r.integer_only || integer_valued(r.h);
    const std::set<Rational> f_cuts = breakpoints(f, kFactorB);
    const std::set<Rational> h_cuts = breakpoints(r.h, kFactorB);
    r.cells_ok = std::includes(f_cuts.begin(), f_cuts.end(), h_cuts.begin(), h_cuts.end());
    return r;
}

// ---------------------------------------------------------------- constancy

ConstancyCertificate constancy_certificate(const StepFunction& f, std::int64_t c)
{
    require_single_cube(f, "f");
    if (!integer_valued(f)) throw ValidationError("constancy certificate needs an integer-valued function");
    const CubeId cube = f.domain()[0];
    ConstancyCertificate cert;
    cert.c = c;
    const StepFunction shifted = f - StepFunction::constant(f.domain(), cube, Rational(c));
    cert.measure = Rational(1) - support_measure(shifted, cube);
    cert.deviation = deviation_moment(f, cube, Rational(c), 1);
    return cert;
}

// ---------------------------------------------------------------- l2

namespace {

std::string l2_hypothesis_failure(const StepFunction& f, const StepFunction& g, const StepFunction& h,
                                  const Rational& delta)
{
    if (!footprint_within(f, {kFactorA})) return "f is not a function of A";
    if (!footprint_within(h, {kFactorB})) return "h is not a function of B";
    if (!footprint_within(g, {kFactorA, kFactorB})) return "g is not a function of A and B";
    if (!integer_valued(f) || !integer_valued(g) || !integer_valued(h)) return "not integer-valued";
    const std::set<Rational> gv = g.value_set(g.domain()[0]);
    if (gv.size() > 2 || (gv.size() == 2 && *gv.rbegin() - *gv.begin() != Rational(1))) {
        return "g takes values other than two adjacent integers";
    }
    if (!(delta > Rational(0)) || !(delta < Rational(1, 9))) return "delta outside (0, 1/9)";
    return {};
}

std::optional<ConstancyCertificate> l2_certificate(const StepFunction& f, const Rational& delta)
{
    for (const Rational& v : f.value_set(f.domain()[0])) {
        const auto c = static_cast<std::int64_t>(v.to_double());
        ConstancyCertificate cert = constancy_certificate(f, c);
        const Rational gap = (Rational(1) - cert.measure) / Rational(2);
        if (gap * gap <= delta && cert.deviation * cert.deviation <= Rational(9) * delta) return cert;
    }
    return std::nullopt;
}

} // namespace

L2Report check_l2(const StepFunction& f, const StepFunction& g, const StepFunction& h, const Rational& delta)
{
    L2Report r;
    r.delta = delta;
    r.hypothesis_failure = l2_hypothesis_failure(f, g, h, delta);
    if (r.hypothesis_failure.empty()) {
        r.norm = moment(f + g + h, 1);
        if (!(r.norm < delta)) r.hypothesis_failure = "||f+g+h|| = " + r.norm.str() + " is not below delta";
    }
    r.hypothesis = r.hypothesis_failure.empty();
    if (!r.hypothesis) return r;
    if (auto cert = l2_certificate(h, delta)) {
        r.which = "h";
        r.certificate = cert;
    } else if (auto cert_f = l2_certificate(f, delta)) {
        r.which = "f";
        r.certificate = cert_f;
    }
    r.conclusion = r.certificate.has_value();
    return r;
}

// ---------------------------------------------------------------- drift

DriftReport check_drift_lemma(const std::vector<StepFunction>& values, const std::vector<Rational>& drifts,
                              const Rational& eps, std::size_t tail_start)
{
    if (values.size() != drifts.size()) throw ValidationError("values and drifts differ in length");
    if (values.empty()) throw ValidationError("empty sequence");
    if (!(eps > Rational(0)) || !(eps < Rational(1, 2))) throw ValidationError("eps must lie in (0, 1/2)");
    const Domain& dom = values.front().domain();
    for (std::size_t n = 0; n < values.size(); ++n) {
        if (values[n].domain() != dom) throw ValidationError("values live on different domains");
        if (!integer_valued(values[n])) {
            throw ValidationError("value " + std::to_string(n + 1) + " is not integer-valued");
        }
    }
    const std::size_t K = values.size();
    DriftReport r;
    r.horizon = K;
    r.eps = eps;
    r.tail_start = tail_start == 0 ? std::max<std::size_t>(1, K / 2) : tail_start;

    std::set<std::size_t> starts{std::max<std::size_t>(1, K / 8), std::max<std::size_t>(1, K / 4), r.tail_start};
    for (std::size_t s : starts) {
        if (s <= K) r.moduli.push_back(DriftModulus{s, {}, {}, {}});
    }
    const Rational half(1, 2);
    std::optional<DriftWindow> largest;
    for (std::size_t k = 1; k <= K; ++k) {
        StepFunction F = StepFunction::zero(dom);
        Rational C;
        bool witnessed = false;
        for (std::size_t l = k; l <= K; ++l) {
            F = F + values[l - 1];
            C += drifts[l - 1];
            DriftWindow w{k, l, C, one_norm_with_constant(F, C)};
            const Rational size = C.abs();
            const Rational f_norm = moment(F, 1);
            for (auto& m : r.moduli) {
                if (k < m.start) continue;
                m.drift = std::max(m.drift, size);
                m.values = std::max(m.values, f_norm);
                m.combined = std::max(m.combined, w.combined);
            }
            if (size > eps && size < half) {
                ++r.windows_checked;
                if (w.combined < eps) r.violations.push_back(w);
                if (k >= r.tail_start && !witnessed && !r.witness) r.witness = w;
                witnessed = true;
            }
            if (k >= r.tail_start && (!largest || size > largest->drift_sum.abs())) largest = w;
        }
    }
    if (r.witness) {
        r.verdict = "divergent";
    } else {
        r.verdict = "convergent";
        r.witness = largest;
    }
    return r;
}

// ---------------------------------------------------------------- suites

std::string to_string(LemmaStatus s)
{
    switch (s) {
    case LemmaStatus::Pass: return "pass";
    case LemmaStatus::Fail: return "fail";
    case LemmaStatus::Vacuous: return "vacuous";
    }
    return "?";
}

std::size_t SuiteReport::count(LemmaStatus s) const
{
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [s](const SuiteRow& r) { return r.conclusion == s; }));
}

void SuiteReport::append(const SuiteReport& other)
{
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

void SuiteReport::write_text(std::ostream& os) const
{
    os << "suite " << suite << " seed " << seed << ": " << rows.size() << " instances, " << count(LemmaStatus::Pass)
       << " pass, " << count(LemmaStatus::Vacuous) << " vacuous, " << failures() << " fail\n";
    for (const SuiteRow& row : rows) {
        if (row.conclusion != LemmaStatus::Fail) continue;
        os << "  FAIL " << row.instance << " seed " << row.seed;
        for (const auto& [name, value] : row.witnesses) os << ' ' << name << '=' << value.str();
        if (!row.note.empty()) os << " (" << row.note << ')';
        os << '\n';
    }
}

void SuiteReport::write_csv(std::ostream& os) const
{
    os << "suite,instance,seed,hypothesis,conclusion,witnesses,note\n";
    for (const SuiteRow& row : rows) {
        os << suite << ',' << row.instance << ',' << row.seed << ',' << (row.hypothesis ? "holds" : "violated") << ','
           << to_string(row.conclusion) << ',';
        for (std::size_t i = 0; i < row.witnesses.size(); ++i) {
            if (i) os << ';';
            const Rational& v = row.witnesses[i].second;
            os << row.witnesses[i].first << '=' << v.numerator_str() << '/' << v.denominator_str();
        }
        std::string note = row.note;
        std::replace(note.begin(), note.end(), ',', ';');
        os << ',' << note << '\n';
    }
}

namespace {

std::vector<Rational> random_cuts(Rng& rng)
{
    const std::int64_t d = rng.uniform(1, 8);
    std::vector<Rational> cuts{Rational(0)};
    for (std::int64_t j = 1; j < d; ++j) {
        if (rng.coin()) cuts.push_back(Rational(j, d));
    }
    cuts.push_back(Rational(1));
    return cuts;
}

std::vector<Rational> random_values(Rng& rng, std::size_t n)
{
    std::vector<Rational> out;
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(rng.uniform(-3, 3));
    return out;
}

std::vector<std::vector<Rational>> random_grid(Rng& rng, std::size_t rows, std::size_t cols)
{
    std::vector<std::vector<Rational>> out;
    for (std::size_t i = 0; i < rows; ++i) out.push_back(random_values(rng, cols));
    return out;
}

std::vector<Rational> eighths()
{
    std::vector<Rational> cuts;
    for (int j = 0; j <= 8; ++j) cuts.emplace_back(j, 8);
    return cuts;
}

SuiteRow l2_row(std::string instance, std::uint64_t seed, const StepFunction& f, const StepFunction& g,
                const StepFunction& h, const Rational& delta)
{
    SuiteRow row;
    row.instance = std::move(instance);
    row.seed = seed;
    const L2Report r = check_l2(f, g, h, delta);
    row.hypothesis = r.hypothesis;
    row.witnesses.emplace_back("delta", delta);
    if (!r.hypothesis) {
        row.conclusion = LemmaStatus::Vacuous;
        row.note = r.hypothesis_failure;
        return row;
    }
    row.witnesses.emplace_back("norm", r.norm);
    if (r.certificate) {
        row.witnesses.emplace_back("c", Rational(r.certificate->c));
        row.witnesses.emplace_back("measure", r.certificate->measure);
        row.witnesses.emplace_back("deviation", r.certificate->deviation);
        row.note = r.which + " near-constant";
    }
    row.conclusion = r.conclusion ? LemmaStatus::Pass : LemmaStatus::Fail;
    return row;
}

Rational delta_above(const Rational& norm, std::int64_t share)
{
    const Rational ninth(1, 9);
    if (!(norm < ninth)) return ninth - Rational(1, 100);
    return norm + (ninth - norm) * Rational(share, 8);
}

SuiteRow l2_battery_instance(std::size_t i)
{
    const auto ii = static_cast<std::int64_t>(i);
    const Rational k(ii % 5 - 2);
    const Rational c(ii % 3 - 1);
    const Domain dom = product_domain();
    const StepFunction one = StepFunction::constant(dom, kCube, Rational(1));
    StepFunction f = -(k + c) * one;
    StepFunction g = k * one;
    StepFunction h = c * one;
    switch (i % 4) {
    case 0:
        f = f + factor_indicator(kFactorA, Rational(0), Rational(1, 10 + ii));
        break;
    case 1: {
        const StepFunction half = factor_indicator(kFactorA, Rational(0), Rational(1, 2));
        f = f + half;
        g = g - half;
        h = h + factor_indicator(kFactorB, Rational(0), Rational(1, 10 + ii));
        break;
    }
    case 2: {
        const StepFunction split = factor_indicator(kFactorB, Rational(0), Rational(ii % 7 + 1, 8));
        h = h + split;
        g = g - split;
        f = f + factor_indicator(kFactorA, Rational(0), Rational(1, 12 + ii));
        break;
    }
    default:
        g = g + factor_indicator(kFactorA, Rational(0), Rational(1, 4)) *
                    factor_indicator(kFactorB, Rational(0), Rational(1, 3 + ii % 5));
        break;
    }
    const Rational norm = moment(f + g + h, 1);
    return l2_row("battery-" + std::to_string(i), i, f, g, h, delta_above(norm, 4));
}

template <typename Fn>
SuiteReport run_seeded(const std::string& name, std::size_t cases, std::uint64_t seed, unsigned jobs, const Fn& make)
{
    SuiteReport report;
    report.suite = name;
    report.seed = seed;
    report.rows.resize(cases);
    detail::parallel_for(cases, jobs, [&](std::size_t i) {
        report.rows[i] = make(derive_seed(seed, i));
        report.rows[i].instance = name + "-" + std::to_string(i);
    });
    return report;
}

SuiteRow drift_row(const std::string& instance, const std::vector<StepFunction>& values,
                   const std::vector<Rational>& drifts, const std::string& expected)
{
    SuiteRow row;
    row.instance = instance;
    const DriftReport r = check_drift_lemma(values, drifts);
    if (r.witness) {
        row.witnesses.emplace_back("k", Rational(static_cast<std::int64_t>(r.witness->k)));
        row.witnesses.emplace_back("l", Rational(static_cast<std::int64_t>(r.witness->l)));
        row.witnesses.emplace_back("drift_sum", r.witness->drift_sum);
        row.witnesses.emplace_back("combined", r.witness->combined);
    }
    for (const DriftModulus& m : r.moduli) {
        row.witnesses.emplace_back("drift_modulus_" + std::to_string(m.start), m.drift);
        row.witnesses.emplace_back("combined_modulus_" + std::to_string(m.start), m.combined);
    }
    row.note = "verdict " + r.verdict + ", expected " + expected + ", " + std::to_string(r.windows_checked) +
               " windows checked";
    if (!r.violations.empty()) {
        const DriftWindow& v = r.violations.front();
        row.note += ", window [" + std::to_string(v.k) + "," + std::to_string(v.l) + "] has combined moment " +
                    v.combined.str();
    }
    row.conclusion = r.holds() && r.verdict == expected ? LemmaStatus::Pass : LemmaStatus::Fail;
    return row;
}

std::vector<Rational> harmonic(std::size_t K)
{
    std::vector<Rational> out;
    for (std::size_t n = 1; n <= K; ++n) out.emplace_back(1, static_cast<std::int64_t>(n));
    return out;
}

std::vector<Rational> alternating(std::size_t K)
{
    std::vector<Rational> out;
    for (std::size_t n = 1; n <= K; ++n) out.emplace_back(n % 2 ? -1 : 1, static_cast<std::int64_t>(n));
    return out;
}

} // namespace

SuiteRow l0_instance(std::uint64_t instance_seed)
{
    Rng rng(instance_seed);
    const auto a_cuts = random_cuts(rng);
    const StepFunction f = factor_function(kFactorA, a_cuts, random_values(rng, a_cuts.size() - 1));
    const auto b_cuts = random_cuts(rng);
    const StepFunction g = factor_function(kFactorB, b_cuts, random_values(rng, b_cuts.size() - 1));
    const L0Result r = check_l0(f, g);
    SuiteRow row;
    row.seed = instance_seed;
    row.witnesses = {{"lhs", r.lhs}, {"rhs", r.rhs}, {"support_f", r.support_f}};
    row.conclusion = r.holds ? LemmaStatus::Pass : LemmaStatus::Fail;
    return row;
}

SuiteRow l1_instance(std::uint64_t instance_seed)
{
    Rng rng(instance_seed);
    const auto a_cuts = random_cuts(rng);
    const auto b_cuts = random_cuts(rng);
    auto f_values = random_grid(rng, a_cuts.size() - 1, b_cuts.size() - 1);
    const auto c_cuts = random_cuts(rng);
    const std::size_t cs = c_cuts.size() - 1;
    std::vector<std::vector<Rational>> g_values;
    const std::int64_t mode = rng.uniform(0, 2);
    if (mode == 0) {
        g_values = random_grid(rng, b_cuts.size() - 1, cs);
    } else {
        // g copies one A-row of f, perturbed on some C-cells in mode 1.
        const auto row = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(f_values.size()) - 1));
        for (std::size_t j = 0; j + 1 < b_cuts.size(); ++j) {
            std::vector<Rational> line;
            for (std::size_t c = 0; c < cs; ++c) {
                Rational v = f_values[row][j];
                if (mode == 1 && rng.uniform(0, 3) == 0) v += Rational(rng.coin() ? 1 : -1);
                line.push_back(v);
            }
            g_values.push_back(std::move(line));
        }
    }
    if (rng.uniform(0, 3) == 0) {
        for (auto& line : f_values) {
            for (auto& v : line) v /= Rational(2);
        }
        for (auto& line : g_values) {
            for (auto& v : line) v /= Rational(2);
        }
    }
    const StepFunction f = grid_function(kFactorA, a_cuts, kFactorB, b_cuts, f_values);
    const StepFunction g = grid_function(kFactorB, b_cuts, kFactorC, c_cuts, g_values);
    const Rational eps = moment(f - g, 1) + Rational(rng.uniform(0, 4), 8);
    const L1Report r = check_l1(f, g, eps);
    SuiteRow row;
    row.seed = instance_seed;
    row.hypothesis = r.precondition;
    row.witnesses = {{"eps", r.eps}, {"dist_fg", r.dist_fg}};
    if (!r.precondition) {
        row.conclusion = LemmaStatus::Vacuous;
        return row;
    }
    row.witnesses.emplace_back("dist_hf", r.dist_hf);
    row.witnesses.emplace_back("dist_hg", r.dist_hg);
    row.note = r.integer_only ? "integer" : "rational";
    row.conclusion = r.holds() ? LemmaStatus::Pass : LemmaStatus::Fail;
    return row;
}

SuiteRow l2_instance(std::uint64_t instance_seed)
{
    Rng rng(instance_seed);
    const std::vector<Rational> cuts = eighths();
    const std::int64_t cf = rng.uniform(-2, 2);
    const std::int64_t ch = rng.uniform(-2, 2);
    const std::int64_t base = -cf - ch;
    const bool f_varies = rng.coin();
    std::vector<std::int64_t> bump(8);
    for (auto& e : bump) e = rng.coin() ? 1 : 0;

    std::vector<Rational> f_values(8, Rational(cf));
    std::vector<Rational> h_values(8, Rational(ch));
    std::vector<std::vector<std::int64_t>> G(8, std::vector<std::int64_t>(8));
    for (std::size_t i = 0; i < 8; ++i) {
        if (f_varies) f_values[i] += Rational(bump[i]);
        else h_values[i] += Rational(bump[i]);
        for (std::size_t j = 0; j < 8; ++j) G[i][j] = base - (f_varies ? bump[i] : bump[j]);
    }
    const std::int64_t defects = rng.uniform(0, 7);
    for (std::int64_t d = 0; d < defects; ++d) {
        auto& cell = G[static_cast<std::size_t>(rng.uniform(0, 7))][static_cast<std::size_t>(rng.uniform(0, 7))];
        cell = cell == base ? base - 1 : base;
    }
    if (rng.uniform(0, 4) == 0) {
        // Uncompensated bump on the constant side; the hypothesis then fails.
        auto& side = f_varies ? h_values : f_values;
        side[static_cast<std::size_t>(rng.uniform(0, 7))] += Rational(1);
    }
    std::vector<std::vector<Rational>> g_values(8);
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::int64_t v : G[i]) g_values[i].emplace_back(v);
    }
    const StepFunction f = factor_function(kFactorA, cuts, f_values);
    const StepFunction h = factor_function(kFactorB, cuts, h_values);
    const StepFunction g = grid_function(kFactorA, cuts, kFactorB, cuts, g_values);
    const Rational delta = delta_above(moment(f + g + h, 1), rng.uniform(1, 7));
    return l2_row({}, instance_seed, f, g, h, delta);
}

SuiteReport run_l0_suite(std::size_t cases, std::uint64_t seed, unsigned jobs)
{
    return run_seeded("l0", cases, seed, jobs, l0_instance);
}

SuiteReport run_l1_suite(std::size_t cases, std::uint64_t seed, unsigned jobs)
{
    return run_seeded("l1", cases, seed, jobs, l1_instance);
}

std::size_t l2_battery_size() { return 24; }

SuiteReport run_l2_suite(std::size_t cases, std::uint64_t seed, unsigned jobs)
{
    SuiteReport report;
    report.suite = "l2";
    report.seed = seed;
    for (std::size_t i = 0; i < l2_battery_size(); ++i) report.rows.push_back(l2_battery_instance(i));
    SuiteReport random = run_seeded("l2", cases, seed, jobs, l2_instance);
    report.append(random);
    return report;
}

SuiteReport run_drift_suite(unsigned jobs)
{
    struct Case {
        std::string name;
        std::vector<StepFunction> values;
        std::vector<Rational> drifts;
        std::string expected;
    };
    std::vector<Case> cases;
    for (std::size_t K : {32u, 64u, 128u}) {
        const std::vector<StepFunction> zeros(K, StepFunction::zero(product_domain()));
        cases.push_back({"harmonic-" + std::to_string(K), zeros, harmonic(K), "divergent"});
        cases.push_back({"alternating-" + std::to_string(K), zeros, alternating(K), "convergent"});
    }
    const Family kadets = build_kadets(4);
    const Schedule sigma = schedule_sigma(kadets);
    std::vector<StepFunction> terms;
    for (const TermId& id : sigma.order) terms.push_back(kadets.term(id));
    cases.push_back({"sigma-harmonic", terms, harmonic(terms.size()), "divergent"});
    cases.push_back({"sigma-alternating", terms, alternating(terms.size()), "convergent"});

    SuiteReport report;
    report.suite = "drift";
    report.rows.resize(cases.size());
    detail::parallel_for(cases.size(), jobs, [&](std::size_t i) {
        report.rows[i] = drift_row(cases[i].name, cases[i].values, cases[i].drifts, cases[i].expected);
        report.rows[i].seed = i;
    });
    return report;
}

std::vector<std::string> suite_names() { return {"l0", "l1", "l2", "drift", "all"}; }

SuiteReport run_suite(const std::string& name, std::size_t cases, std::uint64_t seed, unsigned jobs)
{
    if (name == "l0") return run_l0_suite(cases, seed, jobs);
    if (name == "l1") return run_l1_suite(cases, seed, jobs);
    if (name == "l2") return run_l2_suite(cases, seed, jobs);
    if (name == "drift") return run_drift_suite(jobs);
    if (name == "all") {
        SuiteReport all;
        all.suite = "all";
        all.seed = seed;
        for (const char* part : {"l0", "l1", "l2", "drift"}) {
            SuiteReport r = run_suite(part, cases, seed, jobs);
            for (auto& row : r.rows) row.instance = std::string(part) + ":" + row.instance;
            all.append(r);
        }
        return all;
    }
    throw ConfigError("unknown suite '" + name + "'");
}

} // namespace sumrange
