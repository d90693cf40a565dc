#include "dseries/exponential_sum.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dseries {

namespace {
constexpr double kUlp = 2.220446049250313e-16;

double term_sign(SumConvention c) {
    return c == SumConvention::dirichlet ? -1.0 : 1.0;
}
} // namespace

std::size_t ExponentialSum::nonzero_terms() const {
    std::size_t n = 0;
    for (const auto& t : terms)
        if (t.a != Complex(0.0, 0.0)) ++n;
    return n;
}

ExponentialSum make_sum(std::vector<Term> terms, SumConvention conv,
                        std::optional<TailBound> tail) {
    if (terms.empty()) throw precondition_error("make_sum: empty term list");
    for (std::size_t i = 1; i < terms.size(); ++i) {
        if (!(terms[i - 1].lambda < terms[i].lambda))
            throw precondition_error(
                "make_sum: lambda values must be strictly increasing (violated at index " +
                std::to_string(i) + ")");
    }
    ExponentialSum f;
    f.terms = std::move(terms);
    f.convention = conv;
    f.tail = tail;
    bool found = false;
    for (const auto& t : f.terms) {
        if (t.a != Complex(0.0, 0.0)) {
            f.lambda1 = t.lambda;
            f.a1 = t.a;
            found = true;
            break;
        }
    }
    if (!found && !tail)
        throw precondition_error("make_sum: all coefficients are zero");
    f.trivial = f.nonzero_terms() < 2;
    return f;
}

EvalResult evaluate(const ExponentialSum& f, Complex s, double tol) {
    const double sg = term_sign(f.convention);
    if (f.tail && s.real() < f.tail->sigma_min)
        throw domain_error("evaluate: tail-bounded sum requires Re(s) >= " +
                           fmt_sig(f.tail->sigma_min));
    Complex acc{0.0, 0.0};
    double mag = 0.0;
    for (const auto& t : f.terms) {
        Complex v = t.a * std::exp(sg * t.lambda * s);
        acc += v;
        mag += std::abs(v);
    }
    // rounding envelope: n additions of magnitude <= accumulated magnitude
    double err = mag * kUlp * (2.0 + static_cast<double>(f.terms.size()));
    if (f.tail) {
        err += f.tail->C * std::exp(-f.tail->lambda_floor * s.real());
        if (err > tol)
            throw convergence_error("evaluate: requested tol " + fmt_sig(tol) +
                                    " unattainable; achievable bound " + fmt_sig(err));
    }
    return {acc, err};
}

EvalResult derivative(const ExponentialSum& f, Complex s, double tol) {
    (void)tol;
    return derivative_k(f, s, 1);
}

EvalResult derivative_k(const ExponentialSum& f, Complex s, int k) {
    const double sg = term_sign(f.convention);
    if (f.tail && s.real() < f.tail->sigma_min)
        throw domain_error("derivative: tail-bounded sum requires Re(s) >= " +
                           fmt_sig(f.tail->sigma_min));
    Complex acc{0.0, 0.0};
    double mag = 0.0;
    for (const auto& t : f.terms) {
        double lk = 1.0;
        for (int j = 0; j < k; ++j) lk *= sg * t.lambda;
        Complex v = t.a * lk * std::exp(sg * t.lambda * s);
        acc += v;
        mag += std::abs(v);
    }
    double err = mag * kUlp * (2.0 + static_cast<double>(f.terms.size()));
    if (f.tail) {
        // |sum_tail a_n lambda^k e^{-lambda s}| <= C' e^{-floor sigma}, with
        // C' absorbing lambda^k growth only when the declarer covered it; be
        // conservative and refuse differentiation of tails.
        throw domain_error("derivative: not defined for tail-bounded sums");
    }
    return {acc, err};
}

ExponentialSum multiply_sums(const ExponentialSum& f, const ExponentialSum& g) {
    if (f.convention != g.convention)
        throw precondition_error("multiply_sums: mixed sign conventions");
    if (f.tail || g.tail)
        throw precondition_error("multiply_sums: tail-bounded operand");
    std::map<double, Complex> acc;
    for (const auto& tf : f.terms)
        for (const auto& tg : g.terms) acc[tf.lambda + tg.lambda] += tf.a * tg.a;
    std::vector<Term> terms;
    terms.reserve(acc.size());
    for (const auto& [l, a] : acc) terms.push_back({l, a});
    return make_sum(std::move(terms), f.convention);
}

} // namespace dseries
