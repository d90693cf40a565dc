#pragma once

#include "dseries/catalog.hpp"
#include "dseries/counting.hpp"

#include <optional>

namespace dseries {

// Counting table for a catalog entry, cross-checked row by row against the
// closed-form zero/pole generators: counts must match exactly, integrated
// counts to a boundary-perturbation allowance. Throws convergence_error on
// disagreement unless a mismatch sink is supplied.
CountingTable entry_counting_table(const CatalogEntry& entry, const std::vector<double>& grid,
                                   int threads = 1, std::string* mismatch = nullptr);

// Behavior of (n(r,0) + n(r,inf)) / r along the grid. Branches:
//   "linear-lower-bound"      ratio bounded below by theta on the upper half
//   "divergent-tail-suggestive" last/first ratio grew by >= 3x
//   "degenerate"              ratio falls below theta
struct DichotomyReport {
    CountingTable table;
    double A_lower = 0;              // min ratio over the upper half of the grid
    double tail_integral_partial = 0; // int n(t)/t^3 dt over [grid.front, grid.back]
    std::string branch;
    bool hypothesis_violating = false; // entry fails a structural flag
};

// Requires >= 8 radii spanning at least a decade.
DichotomyReport dichotomy_check(const CatalogEntry& entry, const std::vector<double>& grid,
                                int threads = 1, double theta = 0.05);
// Same classification from a table already built on an ascending grid.
DichotomyReport dichotomy_from_table(const CatalogEntry& entry, CountingTable table,
                                     double theta = 0.05);

// Multiplying by e^{lambda_1 s} normalizes the leading exponent to zero and
// must leave every counting column unchanged.
struct ScalingCheckReport {
    CountingTable base;
    CountingTable scaled;
    bool counts_equal = false;
    double max_integrated_diff = 0;
    bool passed = false;
};

ScalingCheckReport scaling_invariance_check(const CatalogEntry& entry,
                                            const std::vector<double>& grid, int threads = 1);

struct SuiteCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SuiteEntryReport {
    std::string name;
    bool skipped = false;
    std::string note;
    CountingTable table;
    std::optional<DichotomyReport> dichotomy;
    std::vector<SuiteCheck> checks;
    bool passed = true;
};

struct SuiteReport {
    std::vector<SuiteEntryReport> entries;
    bool all_passed = true;
};

// Full catalog sweep: closed-form agreement, column monotonicity, the
// count-vs-integral chain, integrated-count discrepancy, dichotomy branch
// expectations, tail-integral decade convergence, Jensen and Poisson-Jensen
// residuals, and a synthetic leading-exponent reduction.
SuiteReport run_suite(const std::vector<double>& grid, int threads = 1);

} // namespace dseries
