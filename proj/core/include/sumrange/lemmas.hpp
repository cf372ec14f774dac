#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sumrange/step_function.hpp"

namespace sumrange {

/// Product instances live on a single cube whose coordinates 1, 2, 3 are the
/// factor spaces A, B, C, each the unit interval with Lebesgue measure.
inline constexpr int kFactorA = 1;
inline constexpr int kFactorB = 2;
inline constexpr int kFactorC = 3;

Domain product_domain();

/// Function of one factor: values[i] on [cuts[i], cuts[i+1]); cuts run from 0 to 1.
StepFunction factor_function(int coord, const std::vector<Rational>& cuts, const std::vector<Rational>& values);

/// Function of two factors x < y: values[i][j] on cell i of x times cell j of y.
StepFunction grid_function(int x, const std::vector<Rational>& x_cuts, int y, const std::vector<Rational>& y_cuts,
                           const std::vector<std::vector<Rational>>& values);

/// Indicator of lo <= x_coord < hi on the product cube.
StepFunction factor_indicator(int coord, const Rational& lo, const Rational& hi);

// ---------------------------------------------------------------- l0

struct L0Result {
    Rational lhs;
    Rational rhs;
    Rational norm_f;
    Rational norm_g;
    Rational support_f;
    bool holds = false;
};

/// ||f+g|| against ||f|| + ||g|| (1 - 2 mu(supp f)) for f of A only and g of
/// B only. Other footprints are a ValidationError.
L0Result check_l0(const StepFunction& f, const StepFunction& g);

// ---------------------------------------------------------------- fiber approximation

/// Distribution of f(., b) over A for b in one B-cell.
struct Fiber {
    Interval cell{Rational(0), Rational(1)};
    /// Value -> A-measure, weights summing to 1.
    std::vector<std::pair<Rational, Rational>> weights;
};

/// f over A x B split into B-cells on which the A-fiber does not change.
std::vector<Fiber> fibers(const StepFunction& f);

/// Integral over A of |f(a, b) - x| for b in the fiber's cell.
Rational fiber_cost(const Fiber& fiber, const Rational& x);

/// Smallest minimizer of fiber_cost, over integers when integer_only.
Rational fiber_minimizer(const Fiber& fiber, bool integer_only);

/// h(b) = fiber_minimizer of f's fiber at b. f must depend on A and B only.
StepFunction fiber_best_approx(const StepFunction& f, bool integer_only);

// ---------------------------------------------------------------- l1

struct L1Report {
    Rational eps;
    Rational dist_fg;
    bool precondition = false;
    bool integer_only = false;
    StepFunction h;
    Rational dist_hf;
    Rational dist_hg;
    bool strong = false;
    bool hf_within_2eps = false;
    bool hg_within_2eps = false;
    bool integral_ok = false;
    /// Every B-breakpoint of h is a B-breakpoint of f.
    bool cells_ok = false;

    bool holds() const { return strong && hf_within_2eps && hg_within_2eps && integral_ok && cells_ok; }
};

/// f of A and B, g of B and C. When ||f - g|| > eps the report carries
/// precondition = false and nothing else is asserted.
L1Report check_l1(const StepFunction& f, const StepFunction& g, const Rational& eps);

// ---------------------------------------------------------------- constancy

struct ConstancyCertificate {
    std::int64_t c = 0;
    /// Measure of {f = c}.
    Rational measure;
    /// ||f - c||_1.
    Rational deviation;
};

/// f on a single cube, integer-valued (ValidationError otherwise).
ConstancyCertificate constancy_certificate(const StepFunction& f, std::int64_t c);

// ---------------------------------------------------------------- l2

struct L2Report {
    Rational delta;
    Rational norm;
    bool hypothesis = false;
    std::string hypothesis_failure;
    bool conclusion = false;
    /// "f" or "h": the function certified near-constant.
    std::string which;
    std::optional<ConstancyCertificate> certificate;
};

/// Hypotheses: f of A, h of B, g of A and B with values in {k, k+1}, all
/// integer-valued, 0 < delta < 1/9 and ||f+g+h|| < delta. Conclusion, in
/// squared form: f or h equals an integer c on a set of measure m with
/// ((1-m)/2)^2 <= delta and ||. - c||^2 <= 9 delta.
L2Report check_l2(const StepFunction& f, const StepFunction& g, const StepFunction& h, const Rational& delta);

// ---------------------------------------------------------------- drift

struct DriftWindow {
    std::size_t k = 0;
    std::size_t l = 0;
    Rational drift_sum;
    /// ||sum_{n=k}^{l} (f_n + c_n)||.
    Rational combined;
};

struct DriftModulus {
    std::size_t start = 0;
    /// Largest |sum c_n|, ||sum f_n||, ||sum (f_n + c_n)|| over windows at or after start.
    Rational drift;
    Rational values;
    Rational combined;
};

struct DriftReport {
    std::size_t horizon = 0;
    Rational eps;
    std::size_t tail_start = 0;
    /// "divergent" or "convergent".
    std::string verdict;
    /// Divergent: first window at or after tail_start with |sum c| in (eps, 1/2).
    /// Convergent: the window at or after tail_start with the largest |sum c|.
    std::optional<DriftWindow> witness;
    std::vector<DriftModulus> moduli;
    std::size_t windows_checked = 0;
    /// Windows with |sum c| in (eps, 1/2) whose combined moment is below eps.
    std::vector<DriftWindow> violations;

    bool holds() const { return violations.empty(); }
};

/// values[n-1], drifts[n-1] for n = 1..K. Values must be integer-valued on
/// a common domain (ValidationError otherwise). tail_start 0 means K/2.
DriftReport check_drift_lemma(const std::vector<StepFunction>& values, const std::vector<Rational>& drifts,
                              const Rational& eps = Rational(1, 4), std::size_t tail_start = 0);

// ---------------------------------------------------------------- suites

enum class LemmaStatus { Pass, Fail, Vacuous };
std::string to_string(LemmaStatus s);

struct SuiteRow {
    std::string instance;
    std::uint64_t seed = 0;
    bool hypothesis = true;
    LemmaStatus conclusion = LemmaStatus::Pass;
    std::vector<std::pair<std::string, Rational>> witnesses;
    std::string note;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<SuiteRow> rows;

    std::size_t count(LemmaStatus s) const;
    std::size_t failures() const { return count(LemmaStatus::Fail); }
    bool passed() const { return failures() == 0; }
    void append(const SuiteReport& other);
    void write_text(std::ostream& os) const;
    /// suite,instance,seed,hypothesis,conclusion,witnesses,note
    void write_csv(std::ostream& os) const;
};

/// Seeded random instances: grids with breakpoints of denominator <= 8 and
/// integer values in [-3, 3]. Instance i uses derive_seed(seed, i).
SuiteRow l0_instance(std::uint64_t instance_seed);
SuiteRow l1_instance(std::uint64_t instance_seed);
SuiteRow l2_instance(std::uint64_t instance_seed);

SuiteReport run_l0_suite(std::size_t cases, std::uint64_t seed, unsigned jobs = 1);
SuiteReport run_l1_suite(std::size_t cases, std::uint64_t seed, unsigned jobs = 1);
/// Fixed battery of hypothesis-satisfying instances followed by `cases` random ones.
SuiteReport run_l2_suite(std::size_t cases, std::uint64_t seed, unsigned jobs = 1);
std::size_t l2_battery_size();
/// Harmonic, alternating and sigma-schedule drift instances.
SuiteReport run_drift_suite(unsigned jobs = 1);

/// l0, l1, l2, drift, or all; ConfigError otherwise.
SuiteReport run_suite(const std::string& name, std::size_t cases, std::uint64_t seed, unsigned jobs = 1);
std::vector<std::string> suite_names();

} // namespace sumrange
