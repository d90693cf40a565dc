#pragma once

#include <functional>
#include <limits>
#include <memory>

#include "dseries/exponential_sum.hpp"
#include "dseries/types.hpp"

namespace dseries {

namespace detail {

struct OracleImpl {
    std::function<EvalResult(Complex)> eval;
    std::function<EvalResult(Complex)> deriv;
    std::vector<PolePoint> declared_poles; // within validity radius
    // oracles whose zeros are poles of this one (resolved lazily by counting)
    std::vector<std::shared_ptr<const OracleImpl>> pole_sources;
    int origin_order = 0; // m > 0 zero of order m at 0, m < 0 pole, 0 otherwise
    std::optional<Complex> limit_plus_inf;
    double validity = std::numeric_limits<double>::infinity();
    std::string label;
};

} // namespace detail

// Uniform interface over series, closed forms, quotients, shifts, products.
// Evaluation and derivative come with absolute error bounds; both are pure.
// Poles are either declared outright or reachable through pole_sources
// (common zeros of a quotient's numerator and denominator are not cancelled).
class MeromorphicOracle {
public:
    MeromorphicOracle() = default;
    explicit MeromorphicOracle(std::shared_ptr<const detail::OracleImpl> impl)
        : impl_(std::move(impl)) {}

    EvalResult eval(Complex s) const {
        check_domain(s);
        return impl_->eval(s);
    }
    EvalResult deriv(Complex s) const {
        check_domain(s);
        return impl_->deriv(s);
    }

    const std::vector<PolePoint>& declared_poles() const { return impl_->declared_poles; }
    std::vector<MeromorphicOracle> pole_sources() const {
        std::vector<MeromorphicOracle> out;
        out.reserve(impl_->pole_sources.size());
        for (const auto& p : impl_->pole_sources) out.emplace_back(p);
        return out;
    }
    int origin_order() const { return impl_->origin_order; }
    std::optional<Complex> limit_at_plus_infinity() const { return impl_->limit_plus_inf; }
    double validity_radius() const { return impl_->validity; }
    const std::string& label() const { return impl_->label; }
    const void* key() const { return impl_.get(); }
    bool valid() const { return impl_ != nullptr; }
    std::shared_ptr<const detail::OracleImpl> impl() const { return impl_; }

private:
    void check_domain(Complex s) const {
        if (!impl_) throw precondition_error("oracle: empty");
        if (std::abs(s) > impl_->validity)
            throw domain_error("oracle '" + impl_->label + "': |s|=" + fmt_sig(std::abs(s)) +
                               " outside validity radius " + fmt_sig(impl_->validity));
    }
    std::shared_ptr<const detail::OracleImpl> impl_;
};

MeromorphicOracle as_oracle(const ExponentialSum& f);
MeromorphicOracle constant_oracle(Complex c);
MeromorphicOracle geometric_oracle(double validity = 256.0); // 1/(1-e^{-s})
// e^{Q(s)}, Q polynomial with coeffs[j] the coefficient of s^j
MeromorphicOracle exp_polynomial_oracle(std::vector<Complex> coeffs);

MeromorphicOracle shift_oracle(const MeromorphicOracle& f, Complex s0);
MeromorphicOracle quotient_oracle(const MeromorphicOracle& numer,
                                  const MeromorphicOracle& denom);
MeromorphicOracle product_oracle(const MeromorphicOracle& f,
                                 const MeromorphicOracle& g);
// e^{lambda s} f(s): zero/pole sets unchanged
MeromorphicOracle scale_by_exponential(const MeromorphicOracle& f, double lambda);

} // namespace dseries
