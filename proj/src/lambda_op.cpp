#include "dseries/lambda_op.hpp"

namespace dseries {

MeromorphicOracle lambda_apply(const MeromorphicOracle& f, double tau) {
    if (!(tau > 0)) throw precondition_error("lambda_apply: tau must be positive");
    return quotient_oracle(shift_oracle(f, Complex{tau, 0}), f);
}

MeromorphicOracle lambda_iterate(const MeromorphicOracle& f, double tau, int d) {
    if (d < 0) throw precondition_error("lambda_iterate: iteration count must be >= 0");
    MeromorphicOracle g = f;
    for (int k = 0; k < d; ++k) g = lambda_apply(g, tau);
    return g;
}

} // namespace dseries
