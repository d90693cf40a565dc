#include "dseries/almost_periodic.hpp"
#include "dseries/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace dseries {
namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

void require_dirichlet_nonneg(const ExponentialSum& f, const char* who) {
    if (f.convention != SumConvention::dirichlet)
        throw precondition_error(std::string(who) + ": Dirichlet-form sum required");
    for (const auto& t : f.terms)
        if (t.lambda < 0)
            throw precondition_error(std::string(who) +
                                     ": negative exponent makes the half-plane bound unbounded");
}

} // namespace

double translation_bound(const ExponentialSum& f, double omega, double sigma0) {
    require_dirichlet_nonneg(f, "translation_bound");
    double b = 0;
    for (const auto& t : f.terms)
        b += 2.0 * std::abs(t.a) * std::exp(-t.lambda * sigma0) *
             std::abs(std::sin(t.lambda * omega / 2.0));
    return b;
}

TranslationNumberSet translation_numbers(const ExponentialSum& f, double epsilon,
                                         double window, double scan_step, double sigma0,
                                         double range) {
    require_dirichlet_nonneg(f, "translation_numbers");
    if (!(epsilon > 0)) throw precondition_error("translation_numbers: epsilon must be positive");
    if (!(window > 0) || !(scan_step > 0) || !(range > 0))
        throw precondition_error("translation_numbers: window, step and range must be positive");

    TranslationNumberSet out;
    out.epsilon = epsilon;
    out.window = window;
    long steps = static_cast<long>(std::floor(range / scan_step));
    for (long k = 0; k <= steps; ++k) {
        double omega = k * scan_step;
        if (translation_bound(f, omega, sigma0) <= epsilon) out.found.push_back(omega);
    }

    double prev = 0;
    double max_gap = out.found.empty() ? range : out.found.front();
    for (std::size_t i = 1; i < out.found.size(); ++i) {
        max_gap = std::max(max_gap, out.found[i] - out.found[i - 1]);
    }
    if (!out.found.empty()) {
        max_gap = std::max(max_gap, range - out.found.back());
        prev = 0;
        for (double w : out.found) {
            if (w - prev > window && !out.failing_window) out.failing_window = {prev, prev + window};
            prev = w;
        }
        if (range - out.found.back() > window && !out.failing_window)
            out.failing_window = {out.found.back(), out.found.back() + window};
    } else {
        out.failing_window = {0.0, window};
    }
    out.max_gap = max_gap;
    out.relatively_dense = max_gap <= window;
    return out;
}

RoucheCertification rouche_recurrence(const ExponentialSum& f, Complex a, DiskRegion seed,
                                      const std::vector<double>& omegas) {
    require_dirichlet_nonneg(f, "rouche_recurrence");
    if (!(seed.radius > 0)) throw precondition_error("rouche_recurrence: seed radius must be positive");
    MeromorphicOracle oracle = as_oracle(f);

    // certified minimum of |f - a| on the seed circle: dense samples minus a
    // first-derivative Lipschitz correction for the gaps between them
    const int M = 4096;
    double min_gap = std::numeric_limits<double>::infinity();
    double max_d = 0;
    for (int i = 0; i < M; ++i) {
        Complex s = seed.center + std::polar(seed.radius, kTwoPi * (i + 0.37) / M);
        min_gap = std::min(min_gap, std::abs(oracle.eval(s).value - a));
        max_d = std::max(max_d, std::abs(oracle.deriv(s).value));
    }
    double arc = kTwoPi * seed.radius / M;
    double mu = min_gap - 0.75 * max_d * arc;
    if (!(mu > 0))
        throw precondition_error("rouche_recurrence: seed circle gauge is not certifiably positive");

    WindingResult w = winding_circle(oracle, a, seed.center, seed.radius);
    if (!w.stabilized || std::lround(w.winding) != 1)
        throw precondition_error("rouche_recurrence: seed disk does not isolate exactly one solution");

    RoucheCertification out;
    out.seed = seed;
    out.mu = mu;
    out.sigma_circle = seed.center.real() - seed.radius;

    std::vector<double> sorted = omegas;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (double omega : sorted)
        if (translation_bound(f, omega, out.sigma_circle) < mu) out.certified.push_back(omega);

    // translate distance |omega - omega'| >= 2 rho keeps the disks disjoint
    bool seeded = false;
    double last = 0;
    std::vector<double> picked;
    for (double omega : out.certified) {
        if (!seeded || omega - last >= 2.0 * seed.radius) {
            picked.push_back(omega);
            last = omega;
            seeded = true;
        }
    }
    out.disjoint_certified = picked;

    std::vector<double> radii;
    radii.reserve(picked.size());
    for (double omega : picked)
        radii.push_back(std::abs(seed.center + Complex{0, omega}) + seed.radius);
    std::sort(radii.begin(), radii.end());
    long c = 0;
    for (double r : radii) out.count_lower_bound.push_back({r, ++c});

    if (!radii.empty()) {
        double slope = std::numeric_limits<double>::infinity();
        std::size_t half = radii.size() / 2;
        for (std::size_t i = half; i < out.count_lower_bound.size(); ++i)
            slope = std::min(slope, double(out.count_lower_bound[i].second) /
                                        out.count_lower_bound[i].first);
        out.slope = slope;
    }
    return out;
}

} // namespace dseries
