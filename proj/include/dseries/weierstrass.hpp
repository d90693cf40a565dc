#pragma once

#include "dseries/oracle.hpp"

namespace dseries {

// Entire genus-1 product Pi (1 - s/w_n) e^{s/w_n} over a finite list of
// nonzero w_n. Repeated entries raise the multiplicity. Small lists multiply
// factors directly; longer ones accumulate log-magnitude and phase separately
// so the value survives underflow of individual factors.
MeromorphicOracle weierstrass_oracle(const std::vector<Complex>& zeros);

struct GrowthBound {
    double lhs;        // log|product(s)|
    double rhs;        // 4(2+log 2) { |s| int_0^{|s|} n/t^2 + |s|^2 int_{|s|}^inf n/t^3 }
    bool at_zero;      // s hit a listed zero, lhs = -inf
};

// Both sides of the product growth estimate; the integrals of the zero
// counting step function are evaluated in closed form.
GrowthBound growth_bound_check(const std::vector<Complex>& zeros, Complex s);

} // namespace dseries
