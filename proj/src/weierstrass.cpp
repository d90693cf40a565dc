#include "dseries/weierstrass.hpp"

#include <algorithm>
#include <cmath>

namespace dseries {
namespace {

constexpr double kUlp = 2.220446049250313e-16;

struct LogForm {
    double log_mag;
    double phase;
    bool exact_zero;
};

LogForm log_product(const std::vector<Complex>& zeros, Complex s) {
    double lm = 0, ph = 0;
    for (Complex w : zeros) {
        Complex q = s / w;
        Complex factor = 1.0 - q;
        if (factor == Complex{0, 0}) return {-std::numeric_limits<double>::infinity(), 0, true};
        lm += std::log(std::abs(factor)) + q.real();
        ph += std::arg(factor) + q.imag();
    }
    return {lm, ph, false};
}

} // namespace

MeromorphicOracle weierstrass_oracle(const std::vector<Complex>& zeros) {
    for (Complex w : zeros)
        if (w == Complex{0, 0})
            throw precondition_error("weierstrass_oracle: zero at the origin; factor out s^m first");
    auto impl = std::make_shared<detail::OracleImpl>();
    auto zs = std::make_shared<std::vector<Complex>>(zeros);
    bool direct = zeros.size() <= 64;

    impl->eval = [zs, direct](Complex s) -> EvalResult {
        if (direct) {
            Complex acc = 1.0;
            for (Complex w : *zs) acc *= (1.0 - s / w) * std::exp(s / w);
            return {acc, std::abs(acc) * kUlp * (4.0 * zs->size() + 2.0)};
        }
        LogForm lf = log_product(*zs, s);
        if (lf.exact_zero) return {{0, 0}, 0};
        Complex v = std::polar(std::exp(lf.log_mag), lf.phase);
        return {v, std::abs(v) * kUlp * (6.0 * zs->size() + 2.0)};
    };
    auto eval = impl->eval;
    impl->deriv = [zs, eval](Complex s) -> EvalResult {
        // f'/f = sum 1/(s-w) + 1/w; at a listed zero the product collapses to
        // the derivative of its own factor times the rest
        for (std::size_t j = 0; j < zs->size(); ++j) {
            if (std::abs(s - (*zs)[j]) < 1e-300) {
                Complex w = (*zs)[j];
                Complex acc = -std::exp(s / w) / w;
                for (std::size_t i = 0; i < zs->size(); ++i)
                    if (i != j) acc *= (1.0 - s / (*zs)[i]) * std::exp(s / (*zs)[i]);
                return {acc, std::abs(acc) * kUlp * (6.0 * zs->size() + 4.0)};
            }
        }
        Complex logd = 0;
        for (Complex w : *zs) logd += 1.0 / (s - w) + 1.0 / w;
        EvalResult ev = eval(s);
        Complex v = ev.value * logd;
        return {v, std::abs(v) * kUlp * (8.0 * zs->size() + 4.0) + ev.err * std::abs(logd)};
    };
    impl->origin_order = 0;
    impl->validity = std::numeric_limits<double>::infinity();
    impl->label = "product[" + std::to_string(zeros.size()) + "]";
    return MeromorphicOracle(impl);
}

GrowthBound growth_bound_check(const std::vector<Complex>& zeros, Complex s) {
    double as = std::abs(s);
    if (!(as > 0)) throw precondition_error("growth_bound_check: |s| must be positive");
    LogForm lf = log_product(zeros, s);

    // int_0^{|s|} n(t)/t^2 dt = sum_{|w|<=|s|} (1/|w| - 1/|s|)
    // int_{|s|}^inf n(t)/t^3 dt = sum_w 1/(2 max(|w|,|s|)^2)
    double inner = 0, outer = 0;
    for (Complex w : zeros) {
        double aw = std::abs(w);
        if (aw <= as) inner += 1.0 / aw - 1.0 / as;
        double m = std::max(aw, as);
        outer += 1.0 / (2.0 * m * m);
    }
    double rhs = 4.0 * (2.0 + std::log(2.0)) * (as * inner + as * as * outer);
    return {lf.log_mag, rhs, lf.exact_zero};
}

} // namespace dseries
