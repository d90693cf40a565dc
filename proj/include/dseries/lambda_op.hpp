#pragma once

#include "dseries/oracle.hpp"

namespace dseries {

// Difference-quotient operator L f(s) = f(s + tau) / f(s). Each application
// shrinks the validity radius by tau; iterates reduce e^{Q} with deg Q = d to
// a constant after d applications.
MeromorphicOracle lambda_apply(const MeromorphicOracle& f, double tau);
MeromorphicOracle lambda_iterate(const MeromorphicOracle& f, double tau, int d);

} // namespace dseries
