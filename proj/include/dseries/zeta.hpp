#pragma once

#include "dseries/oracle.hpp"

namespace dseries {

// Riemann zeta by Euler-Maclaurin continuation,
//   zeta(s) = sum_{n<N} n^{-s} + N^{1-s}/(s-1) + N^{-s}/2
//           + sum_{k<=K} B_{2k}/(2k)! N^{1-s-2k} prod_{j=0}^{2k-2}(s+j),
// with the remainder bounded by |(s+2K+1)/(sigma+2K+1)| |T_{K+1}|.
// For sigma >= 1/2 the partial sum has no cancellation and runs in binary64;
// below that it cancels like N^{|sigma|}, so the same formula runs on MPFR
// with precision adaptive in |Re s|. Declared simple pole at s=1. Default
// validity |s| <= 35 (configurable; the remainder bound needs
// sigma > -(2K+1)).
MeromorphicOracle zeta_oracle(double validity = 35.0);

// Plain evaluation entry points (used by the oracle; exposed for tests).
EvalResult zeta_eval(Complex s);
EvalResult zeta_deriv(Complex s);

// Always-MPFR evaluation, kept to cross-check the binary64 branch.
EvalResult zeta_eval_reference(Complex s);
EvalResult zeta_deriv_reference(Complex s);

} // namespace dseries
