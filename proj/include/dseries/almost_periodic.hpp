#pragma once

#include "dseries/exponential_sum.hpp"
#include "dseries/oracle.hpp"

#include <optional>

namespace dseries {

struct TranslationNumberSet {
    double epsilon = 0;
    double window = 0; // interval length every [x, x+window] must hit
    std::vector<double> found;
    bool relatively_dense = false;
    double max_gap = 0; // largest hole in [0, range], including the ends
    std::optional<std::pair<double, double>> failing_window;
};

// Certified translation bound sup_{Re s >= sigma0} |f(s+i omega) - f(s)| <=
// sum_n 2 |a_n| e^{-lambda_n sigma0} |sin(lambda_n omega / 2)|, exact for
// finite Dirichlet-form sums with nonnegative exponents.
double translation_bound(const ExponentialSum& f, double omega, double sigma0);

// Grid scan of [0, range]; omega is kept when its term bound is <= epsilon.
TranslationNumberSet translation_numbers(const ExponentialSum& f, double epsilon,
                                         double window, double scan_step,
                                         double sigma0 = 0.0, double range = 5000.0);

struct RoucheCertification {
    DiskRegion seed;
    double mu = 0;           // certified lower bound of |f - a| on the seed circle
    double sigma_circle = 0; // abscissa where the translation bounds are taken
    std::vector<double> certified;          // omegas whose bound beats mu
    std::vector<double> disjoint_certified; // greedy subset with disjoint disks
    std::vector<std::pair<double, long>> count_lower_bound; // (r, zeros with |s| <= r)
    double slope = 0; // min of count/r over the upper half of the radii
};

// For each certified omega the translated seed disk contains a solution of
// f = a; disjoint translates give a piecewise lower bound for the counting
// function. The translation bound is re-evaluated at the leftmost abscissa of
// the seed circle, not at the scan half-plane.
RoucheCertification rouche_recurrence(const ExponentialSum& f, Complex a, DiskRegion seed,
                                      const std::vector<double>& omegas);

} // namespace dseries
