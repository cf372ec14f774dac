#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sumrange/family.hpp"

namespace sumrange {

/// Outcome of one axiom at one level on one cube.
struct AxiomCheck {
    std::string axiom;
    std::string scope;
    int level = 0;
    bool passed = true;
    std::size_t checked = 0;
    /// First failing term (or term group) and an exact witness, e.g. the
    /// serialized non-zero difference of the two sides.
    std::string term;
    std::string witness;
};

struct AxiomReport {
    std::vector<AxiomCheck> checks;

    bool passed() const;
    std::size_t failure_count() const;
    std::vector<AxiomCheck> failures() const;
    bool has(const std::string& axiom) const;
    /// True when the named axiom was checked and failed somewhere.
    bool failed(const std::string& axiom) const;

    void append(const AxiomReport& other);
    void write_text(std::ostream& os) const;
    void write_csv(std::ostream& os) const;
};

/// Kadets properties of the a/b pair on Q1: partition of unity, norms,
/// footprints, values, the product rule, row/column sums, total, disjoint
/// supports. Requires the Kadets flavor.
AxiomReport verify_kadets(const Family& family, unsigned jobs = 1);

/// Three-cube properties of the last extension of a three-point or
/// multi-point family, together with the Kadets checks of the two pairs it
/// joins.
AxiomReport verify_three_kadets(const Family& family, unsigned jobs = 1);

/// Every pair and every extension of the chain, plus term placement.
/// Transformed families are not verifiable (ConfigError).
AxiomReport verify_family(const Family& family, unsigned jobs = 1);

} // namespace sumrange
