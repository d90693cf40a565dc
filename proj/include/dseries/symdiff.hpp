#pragma once

#include "dseries/counting.hpp"

namespace dseries {

struct MatchedPair {
    Complex position; // the first list's position
    int mult_F = 0, mult_G = 0;
};

struct SymDiffReport {
    std::vector<double> T_grid;
    std::vector<long> D_values; // sum |m_F - m_G| over pairs + unmatched mults
    std::vector<MatchedPair> matched_pairs;
    std::vector<ZeroRecord> unmatched_F, unmatched_G;
    double slope_estimate = 0; // least-squares slope of D against T
    double slope_stderr = 0;
    double match_tol = 0;
};

// Greedy nearest-pair matching under match_tol; any record with two or more
// candidates within the tolerance aborts with an ambiguity error.
SymDiffReport symmetric_difference(const std::vector<ZeroRecord>& zeros_F,
                                   const std::vector<ZeroRecord>& zeros_G,
                                   const std::vector<double>& T_grid, double match_tol = 1e-6);

struct GrowthVerdict {
    bool linear = false;
    double A_estimate = 0; // min of D(T)/T over the upper half of the grid
    double theta = 0;
};

GrowthVerdict linear_growth_verdict(const SymDiffReport& report, double theta = 0.05);

// "distinct" when the zero difference or the quotient's zero+pole count grows
// linearly; "identical (numerically)" when both stay at zero and the two
// functions agree on a deterministic sample; "inconclusive" otherwise.
// Requires F/G -> 1 towards +infinity, checked by evaluation.
std::string uniqueness_check(const MeromorphicOracle& F, const MeromorphicOracle& G,
                             double T_max, int threads = 1);

struct ExceptionalSetEstimate {
    std::vector<double> T_grid;
    std::vector<long> n_E; // positions where the multisets disagree
    bool o_r_verdict = false;
    double slope = 0;
};

// Sublinearity heuristic for the unshared-zero set: least-squares slope below
// theta_prime and n_E(T)/T nonincreasing on the upper half of the grid.
ExceptionalSetEstimate enough_common_zeros(const std::vector<ZeroRecord>& zeros_F,
                                           const std::vector<ZeroRecord>& zeros_G,
                                           const std::vector<double>& T_grid,
                                           double match_tol = 1e-6,
                                           double theta_prime = 0.01);

} // namespace dseries
