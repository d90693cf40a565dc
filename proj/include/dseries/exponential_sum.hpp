#pragma once

#include "dseries/types.hpp"

namespace dseries {

// f(s) = sum a_n e^{-lambda_n s}   (dirichlet convention)
// f(s) = sum a_n e^{+lambda_n s}   (exponent convention)
// lambda strictly increasing. Finite at desk scale; an infinite series is
// represented by its truncation plus a declared tail bound
//   |tail(s)| <= C e^{-lambda_floor Re(s)}   valid for Re(s) >= sigma_min.
enum class SumConvention { dirichlet, exponent };

struct Term {
    double lambda;
    Complex a;
};

struct TailBound {
    double C;
    double lambda_floor;
    double sigma_min;
};

class ExponentialSum {
public:
    std::vector<Term> terms;
    SumConvention convention = SumConvention::dirichlet;
    std::optional<TailBound> tail;

    // normalization metadata: first term with nonzero coefficient
    double lambda1 = 0.0;
    Complex a1{0.0, 0.0};
    bool trivial = false; // fewer than two nonzero terms

    std::size_t nonzero_terms() const;
};

ExponentialSum make_sum(std::vector<Term> terms, SumConvention conv,
                        std::optional<TailBound> tail = std::nullopt);

// Value with rounding-accumulation error bound; tail-bounded sums add the
// declared tail envelope and require Re(s) >= sigma_min.
EvalResult evaluate(const ExponentialSum& f, Complex s, double tol = 1e-12);
EvalResult derivative(const ExponentialSum& f, Complex s, double tol = 1e-12);

// k-th derivative at a point, termwise (exact analytic form).
EvalResult derivative_k(const ExponentialSum& f, Complex s, int k);

// (1 - e^{-s})^2 style products stay inside the model: multiply term lists.
ExponentialSum multiply_sums(const ExponentialSum& f, const ExponentialSum& g);

} // namespace dseries
