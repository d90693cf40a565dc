#include "dseries/oracle.hpp"

#include <cmath>

namespace dseries {

using detail::OracleImpl;

namespace {

constexpr double kUlp = 2.220446049250313e-16;
constexpr double kOriginTol = 1e-9; // origin_order detection threshold
constexpr int kMaxOriginOrder = 8;

} // namespace

MeromorphicOracle as_oracle(const ExponentialSum& f) {
    auto im = std::make_shared<OracleImpl>();
    ExponentialSum copy = f;
    im->eval = [copy](Complex s) { return evaluate(copy, s); };
    im->deriv = [copy](Complex s) { return derivative(copy, s); };

    // origin order: first k with |f^(k)(0)| above threshold, termwise-exact
    int m = -1;
    for (int k = 0; k <= kMaxOriginOrder; ++k) {
        EvalResult d = derivative_k(f, Complex(0, 0), k);
        if (std::abs(d.value) > kOriginTol) {
            m = k;
            break;
        }
    }
    if (m < 0)
        throw precondition_error(
            "as_oracle: origin order exceeds detection cap " + std::to_string(kMaxOriginOrder));
    im->origin_order = m;

    // limit as Re(s) -> +inf: the dominant exponent decides
    const double lo = f.terms.front().lambda, hi = f.terms.back().lambda;
    auto coeff_at = [&](double l) -> Complex {
        for (const auto& t : f.terms)
            if (t.lambda == l) return t.a;
        return {0, 0};
    };
    if (f.convention == SumConvention::dirichlet) {
        double lead = lo;
        for (const auto& t : f.terms)
            if (t.a != Complex(0, 0)) {
                lead = t.lambda;
                break;
            }
        if (lead < 0)
            im->limit_plus_inf = std::nullopt;
        else if (lead == 0)
            im->limit_plus_inf = coeff_at(0.0);
        else
            im->limit_plus_inf = Complex(0, 0);
    } else {
        double lead = hi;
        for (auto it = f.terms.rbegin(); it != f.terms.rend(); ++it)
            if (it->a != Complex(0, 0)) {
                lead = it->lambda;
                break;
            }
        if (lead > 0)
            im->limit_plus_inf = std::nullopt;
        else if (lead == 0)
            im->limit_plus_inf = coeff_at(0.0);
        else
            im->limit_plus_inf = Complex(0, 0);
    }
    im->label = "exp_sum[" + std::to_string(f.terms.size()) + "]";
    return MeromorphicOracle(im);
}

MeromorphicOracle constant_oracle(Complex c) {
    auto im = std::make_shared<OracleImpl>();
    im->eval = [c](Complex) { return EvalResult{c, std::abs(c) * kUlp}; };
    im->deriv = [](Complex) { return EvalResult{{0, 0}, 0.0}; };
    im->origin_order = (c == Complex(0, 0)) ? kMaxOriginOrder + 1 : 0;
    im->limit_plus_inf = c;
    im->label = "const";
    if (c == Complex(0, 0))
        throw precondition_error("constant_oracle: identically zero");
    return MeromorphicOracle(im);
}

MeromorphicOracle geometric_oracle(double validity) {
    auto im = std::make_shared<OracleImpl>();
    im->eval = [](Complex s) -> EvalResult {
        Complex den = 1.0 - std::exp(-s);
        double ad = std::abs(den);
        if (ad == 0.0)
            return {Complex(std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity()),
                    std::numeric_limits<double>::infinity()};
        double ed = (1.0 + std::abs(std::exp(-s))) * 4.0 * kUlp;
        Complex v = 1.0 / den;
        return {v, ed / (ad * ad) + std::abs(v) * kUlp};
    };
    im->deriv = [](Complex s) -> EvalResult {
        Complex e = std::exp(-s);
        Complex den = 1.0 - e;
        double ad = std::abs(den);
        if (ad == 0.0)
            return {Complex(std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity()),
                    std::numeric_limits<double>::infinity()};
        Complex v = -e / (den * den);
        return {v, std::abs(v) * 16.0 * kUlp * (1.0 + std::abs(e) / ad)};
    };
    const double two_pi = 2.0 * M_PI;
    for (long k = static_cast<long>(-std::floor(validity / two_pi));
         k <= static_cast<long>(std::floor(validity / two_pi)); ++k)
        im->declared_poles.push_back({Complex(0.0, two_pi * k), 1});
    im->origin_order = -1;
    im->limit_plus_inf = Complex(1, 0);
    im->validity = validity;
    im->label = "1/(1-e^-s)";
    return MeromorphicOracle(im);
}

MeromorphicOracle exp_polynomial_oracle(std::vector<Complex> coeffs) {
    if (coeffs.empty()) coeffs.push_back({0, 0});
    auto horner = [coeffs](Complex s) {
        Complex q{0, 0};
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) q = q * s + *it;
        return q;
    };
    auto horner_d = [coeffs](Complex s) {
        Complex q{0, 0};
        for (std::size_t j = coeffs.size(); j-- > 1;)
            q = q * s + coeffs[j] * static_cast<double>(j);
        return q;
    };
    auto im = std::make_shared<OracleImpl>();
    std::size_t deg = coeffs.size() - 1;
    im->eval = [horner, deg](Complex s) -> EvalResult {
        Complex v = std::exp(horner(s));
        double magq = 0.0;
        (void)magq;
        return {v, std::abs(v) * kUlp * 8.0 * static_cast<double>(deg + 2)};
    };
    im->deriv = [horner, horner_d, deg](Complex s) -> EvalResult {
        Complex v = horner_d(s) * std::exp(horner(s));
        return {v, std::abs(v) * kUlp * 16.0 * static_cast<double>(deg + 2)};
    };
    im->origin_order = 0;
    bool constant = true;
    for (std::size_t j = 1; j < coeffs.size(); ++j)
        if (coeffs[j] != Complex(0, 0)) constant = false;
    if (constant) im->limit_plus_inf = std::exp(coeffs[0]);
    im->label = "exp_poly[deg " + std::to_string(deg) + "]";
    return MeromorphicOracle(im);
}

namespace {

// Origin order of a composed oracle: declared pole at 0 wins, otherwise
// numeric detection through f(0), f'(0) (desk cases are m in {-1,0,1}).
int detect_origin_order(const std::vector<PolePoint>& poles,
                        const std::function<EvalResult(Complex)>& ev,
                        const std::function<EvalResult(Complex)>& dv,
                        const std::string& who) {
    for (const auto& p : poles)
        if (std::abs(p.position) < 1e-12) return -p.multiplicity;
    EvalResult v = ev(Complex(0, 0));
    if (!std::isfinite(std::abs(v.value))) return -1;
    if (std::abs(v.value) > kOriginTol) return 0;
    EvalResult d = dv(Complex(0, 0));
    if (std::abs(d.value) > kOriginTol) return 1;
    throw precondition_error(who + ": origin order beyond the |m|<=1 detection of composed oracles");
}

} // namespace

MeromorphicOracle shift_oracle(const MeromorphicOracle& f, Complex s0) {
    double newv = f.validity_radius() - std::abs(s0);
    if (!(newv > 0))
        throw domain_error("shift_oracle: shift " + fmt_complex(s0) +
                           " exhausts validity radius " + fmt_sig(f.validity_radius()));
    auto im = std::make_shared<OracleImpl>();
    MeromorphicOracle base = f;
    im->eval = [base, s0](Complex s) { return base.eval(s + s0); };
    im->deriv = [base, s0](Complex s) { return base.deriv(s + s0); };
    for (const auto& p : f.declared_poles()) {
        Complex q = p.position - s0;
        if (std::abs(q) <= newv) im->declared_poles.push_back({q, p.multiplicity});
    }
    for (const auto& src : f.pole_sources())
        im->pole_sources.push_back(shift_oracle(src, s0).impl());
    im->validity = newv;
    im->limit_plus_inf = f.limit_at_plus_infinity();
    im->label = "shift(" + f.label() + ")";
    im->origin_order = detect_origin_order(im->declared_poles, im->eval, im->deriv, im->label);
    return MeromorphicOracle(im);
}

MeromorphicOracle quotient_oracle(const MeromorphicOracle& numer,
                                  const MeromorphicOracle& denom) {
    auto im = std::make_shared<OracleImpl>();
    MeromorphicOracle n = numer, d = denom;
    im->eval = [n, d](Complex s) -> EvalResult {
        EvalResult en = n.eval(s), ed = d.eval(s);
        double adm = std::abs(ed.value);
        if (adm == 0.0)
            return {Complex(std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity()),
                    std::numeric_limits<double>::infinity()};
        Complex v = en.value / ed.value;
        double denom_floor = std::max(adm - ed.err, adm * 0.5);
        return {v, (en.err + std::abs(v) * ed.err) / denom_floor + std::abs(v) * kUlp};
    };
    im->deriv = [n, d](Complex s) -> EvalResult {
        EvalResult en = n.eval(s), ed = d.eval(s);
        EvalResult dn = n.deriv(s), dd = d.deriv(s);
        double adm = std::abs(ed.value);
        if (adm == 0.0)
            return {Complex(std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity()),
                    std::numeric_limits<double>::infinity()};
        Complex v = (dn.value * ed.value - en.value * dd.value) / (ed.value * ed.value);
        double scale = (std::abs(dn.value) + std::abs(v) * std::abs(dd.value)) / adm;
        double err = (dn.err + scale * ed.err + std::abs(en.value / ed.value) * dd.err) / adm +
                     std::abs(v) * 8.0 * kUlp;
        return {v, err};
    };
    double newv = std::min(numer.validity_radius(), denom.validity_radius());
    for (const auto& p : numer.declared_poles())
        if (std::abs(p.position) <= newv) im->declared_poles.push_back(p);
    im->pole_sources.push_back(denom.impl());
    for (const auto& src : numer.pole_sources()) im->pole_sources.push_back(src.impl());
    im->validity = newv;
    im->origin_order = numer.origin_order() - denom.origin_order();
    auto ln = numer.limit_at_plus_infinity(), ld = denom.limit_at_plus_infinity();
    if (ln && ld && *ld != Complex(0, 0)) im->limit_plus_inf = *ln / *ld;
    im->label = "(" + numer.label() + ")/(" + denom.label() + ")";
    return MeromorphicOracle(im);
}

MeromorphicOracle product_oracle(const MeromorphicOracle& f,
                                 const MeromorphicOracle& g) {
    auto im = std::make_shared<OracleImpl>();
    MeromorphicOracle a = f, b = g;
    im->eval = [a, b](Complex s) -> EvalResult {
        EvalResult ea = a.eval(s), eb = b.eval(s);
        Complex v = ea.value * eb.value;
        return {v, std::abs(ea.value) * eb.err + std::abs(eb.value) * ea.err +
                       ea.err * eb.err + std::abs(v) * kUlp};
    };
    im->deriv = [a, b](Complex s) -> EvalResult {
        EvalResult ea = a.eval(s), eb = b.eval(s);
        EvalResult da = a.deriv(s), db = b.deriv(s);
        Complex v = da.value * eb.value + ea.value * db.value;
        double err = std::abs(da.value) * eb.err + std::abs(eb.value) * da.err +
                     std::abs(ea.value) * db.err + std::abs(db.value) * ea.err +
                     std::abs(v) * 4.0 * kUlp;
        return {v, err};
    };
    double newv = std::min(f.validity_radius(), g.validity_radius());
    for (const auto& p : f.declared_poles())
        if (std::abs(p.position) <= newv) im->declared_poles.push_back(p);
    for (const auto& p : g.declared_poles())
        if (std::abs(p.position) <= newv) im->declared_poles.push_back(p);
    for (const auto& src : f.pole_sources()) im->pole_sources.push_back(src.impl());
    for (const auto& src : g.pole_sources()) im->pole_sources.push_back(src.impl());
    im->validity = newv;
    im->origin_order = f.origin_order() + g.origin_order();
    auto lf = f.limit_at_plus_infinity(), lg = g.limit_at_plus_infinity();
    if (lf && lg) im->limit_plus_inf = *lf * *lg;
    im->label = "(" + f.label() + ")*(" + g.label() + ")";
    return MeromorphicOracle(im);
}

MeromorphicOracle scale_by_exponential(const MeromorphicOracle& f, double lambda) {
    auto im = std::make_shared<OracleImpl>();
    MeromorphicOracle base = f;
    im->eval = [base, lambda](Complex s) -> EvalResult {
        EvalResult e = base.eval(s);
        Complex w = std::exp(lambda * s);
        return {w * e.value, std::abs(w) * (e.err + std::abs(e.value) * 2.0 * kUlp)};
    };
    im->deriv = [base, lambda](Complex s) -> EvalResult {
        EvalResult e = base.eval(s);
        EvalResult d = base.deriv(s);
        Complex w = std::exp(lambda * s);
        Complex v = w * (lambda * e.value + d.value);
        return {v, std::abs(w) * (std::abs(lambda) * e.err + d.err) + std::abs(v) * 4.0 * kUlp};
    };
    im->declared_poles = f.declared_poles();
    im->validity = f.validity_radius();
    im->origin_order = f.origin_order();
    if (lambda == 0.0)
        im->limit_plus_inf = f.limit_at_plus_infinity();
    else if (lambda < 0.0 && f.limit_at_plus_infinity())
        im->limit_plus_inf = Complex(0, 0);
    im->label = "e^{" + fmt_sig(lambda, 6) + "s}*(" + f.label() + ")";
    return MeromorphicOracle(im);
}

} // namespace dseries
