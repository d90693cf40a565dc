#include "dseries/symdiff.hpp"
#include "dseries/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <cmath>

namespace dseries {
namespace {

struct Matching {
    std::vector<MatchedPair> pairs;
    std::vector<ZeroRecord> only_F, only_G;
};

void check_self_separation(const std::vector<ZeroRecord>& zs, double match_tol,
                           const char* side) {
    for (std::size_t i = 0; i < zs.size(); ++i)
        for (std::size_t j = i + 1; j < zs.size(); ++j) {
            double d = std::abs(zs[i].position - zs[j].position);
            if (d < 2.0 * match_tol)
                throw precondition_error(std::string("symmetric_difference: ") + side +
                                         " zeros separated by " + fmt_sig(d) +
                                         " need match_tol below half that gap");
        }
}

Matching match_zeros(const std::vector<ZeroRecord>& zF, const std::vector<ZeroRecord>& zG,
                     double match_tol) {
    check_self_separation(zF, match_tol, "first-list");
    check_self_separation(zG, match_tol, "second-list");
    std::vector<int> partner_F(zF.size(), -1), partner_G(zG.size(), -1);
    for (std::size_t i = 0; i < zF.size(); ++i) {
        int hits = 0, last = -1;
        for (std::size_t j = 0; j < zG.size(); ++j) {
            if (std::abs(zF[i].position - zG[j].position) <= match_tol) {
                ++hits;
                last = static_cast<int>(j);
            }
        }
        if (hits > 1)
            throw precondition_error("symmetric_difference: ambiguous pairing at " +
                                     fmt_complex(zF[i].position) +
                                     "; shrink match_tol or refine the zeros");
        if (hits == 1) {
            if (partner_G[last] != -1)
                throw precondition_error("symmetric_difference: two zeros claim " +
                                         fmt_complex(zG[last].position) +
                                         "; shrink match_tol or refine the zeros");
            partner_F[i] = last;
            partner_G[last] = static_cast<int>(i);
        }
    }
    Matching m;
    for (std::size_t i = 0; i < zF.size(); ++i) {
        if (partner_F[i] >= 0)
            m.pairs.push_back({zF[i].position, zF[i].multiplicity,
                               zG[partner_F[i]].multiplicity});
        else
            m.only_F.push_back(zF[i]);
    }
    for (std::size_t j = 0; j < zG.size(); ++j)
        if (partner_G[j] < 0) m.only_G.push_back(zG[j]);
    return m;
}

void fit_line(const std::vector<double>& x, const std::vector<long>& y, double& slope,
              double& stderr_out) {
    std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += double(y[i]);
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (double(y[i]) - my);
    }
    if (sxx <= 0) {
        slope = 0;
        stderr_out = 0;
        return;
    }
    slope = sxy / sxx;
    double intercept = my - slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double res = double(y[i]) - (intercept + slope * x[i]);
        sse += res * res;
    }
    stderr_out = n > 2 ? std::sqrt(sse / double(n - 2) / sxx) : 0.0;
}

} // namespace

SymDiffReport symmetric_difference(const std::vector<ZeroRecord>& zeros_F,
                                   const std::vector<ZeroRecord>& zeros_G,
                                   const std::vector<double>& T_grid, double match_tol) {
    if (T_grid.empty()) throw precondition_error("symmetric_difference: empty T grid");
    if (!(match_tol > 0)) throw precondition_error("symmetric_difference: match_tol must be positive");
    Matching m = match_zeros(zeros_F, zeros_G, match_tol);

    SymDiffReport rep;
    rep.T_grid = T_grid;
    rep.match_tol = match_tol;
    rep.matched_pairs = m.pairs;
    rep.unmatched_F = m.only_F;
    rep.unmatched_G = m.only_G;
    for (double T : T_grid) {
        long d = 0;
        for (const auto& p : m.pairs)
            if (std::abs(p.position) <= T) d += std::labs(long(p.mult_F) - long(p.mult_G));
        for (const auto& rec : m.only_F)
            if (std::abs(rec.position) <= T) d += rec.multiplicity;
        for (const auto& rec : m.only_G)
            if (std::abs(rec.position) <= T) d += rec.multiplicity;
        rep.D_values.push_back(d);
    }
    if (T_grid.size() >= 2) fit_line(rep.T_grid, rep.D_values, rep.slope_estimate, rep.slope_stderr);
    return rep;
}

GrowthVerdict linear_growth_verdict(const SymDiffReport& report, double theta) {
    const auto& T = report.T_grid;
    if (T.size() < 8)
        throw precondition_error("linear_growth_verdict: at least 8 grid points required");
    double lo = *std::min_element(T.begin(), T.end());
    double hi = *std::max_element(T.begin(), T.end());
    if (!(hi >= 10.0 * lo * (1.0 - 1e-12)))
        throw precondition_error("linear_growth_verdict: grid must span at least one decade");
    GrowthVerdict v;
    v.theta = theta;
    double a = std::numeric_limits<double>::infinity();
    for (std::size_t i = T.size() / 2; i < T.size(); ++i)
        a = std::min(a, double(report.D_values[i]) / T[i]);
    v.A_estimate = std::isfinite(a) ? a : 0.0;
    v.linear = v.A_estimate > theta;
    return v;
}

std::string uniqueness_check(const MeromorphicOracle& F, const MeromorphicOracle& G,
                             double T_max, int threads) {
    if (!(T_max > 0)) throw precondition_error("uniqueness_check: T_max must be positive");
    MeromorphicOracle q = quotient_oracle(F, G);

    double sigma_far = std::min(40.0, 0.9 * std::min(F.validity_radius(), G.validity_radius()));
    Complex far = q.eval({sigma_far, 0}).value;
    if (!(std::abs(far - 1.0) <= 1e-6))
        throw precondition_error("uniqueness_check: F/G must tend to 1 towards +infinity; got " +
                                 fmt_complex(far) + " at sigma=" + fmt_sig(sigma_far));

    std::vector<double> grid;
    for (int i = 0; i < 8; ++i)
        grid.push_back(T_max / 10.0 * std::pow(10.0, double(i) / 7.0));
    grid.back() = T_max;

    CountOptions opt;
    opt.threads = std::max(1, threads);
    LocateResult zF = locate_values(F, T_max, Target::value({0, 0}), opt);
    LocateResult zG = locate_values(G, T_max, Target::value({0, 0}), opt);
    SymDiffReport rep = symmetric_difference(zF.records, zG.records, grid);
    GrowthVerdict vd = linear_growth_verdict(rep);

    std::vector<long> q_counts(grid.size(), 0);
    CountOptions one = opt;
    one.threads = 1;
    parallel_for(grid.size(), std::max(1, threads), [&](std::size_t i) {
        CountResult cz = count_in_disk(q, grid[i], Target::value({0, 0}), one);
        CountResult cp = count_in_disk(q, grid[i], Target::poles(), one);
        q_counts[i] = cz.count + cp.count;
    });
    double a_q = std::numeric_limits<double>::infinity();
    bool q_all_zero = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (q_counts[i] != 0) q_all_zero = false;
        if (i >= grid.size() / 2) a_q = std::min(a_q, double(q_counts[i]) / grid[i]);
    }

    if (vd.linear || (std::isfinite(a_q) && a_q > vd.theta)) return "distinct";

    bool d_all_zero = true;
    for (long d : rep.D_values)
        if (d != 0) d_all_zero = false;
    if (d_all_zero && q_all_zero) {
        // zero data alone cannot separate equality from agreement-on-zeros;
        // sample values on a deterministic spiral inside the shared domain
        double rad = std::min({10.0, T_max, 0.5 * F.validity_radius(), 0.5 * G.validity_radius()});
        bool same = true;
        for (int j = 0; j < 32 && same; ++j) {
            Complex s = std::polar(rad * (0.15 + 0.8 * j / 31.0), 6.283185307179586 * 0.618 * j);
            Complex vF = F.eval(s).value, vG = G.eval(s).value;
            if (!(std::abs(vF - vG) <= 1e-8 * (1.0 + std::abs(vF) + std::abs(vG)))) same = false;
        }
        if (same) return "identical (numerically)";
    }
    return "inconclusive";
}

ExceptionalSetEstimate enough_common_zeros(const std::vector<ZeroRecord>& zeros_F,
                                           const std::vector<ZeroRecord>& zeros_G,
                                           const std::vector<double>& T_grid, double match_tol,
                                           double theta_prime) {
    if (T_grid.empty()) throw precondition_error("enough_common_zeros: empty T grid");
    Matching m = match_zeros(zeros_F, zeros_G, match_tol);
    ExceptionalSetEstimate est;
    est.T_grid = T_grid;
    for (double T : T_grid) {
        long n = 0;
        for (const auto& p : m.pairs)
            if (std::abs(p.position) <= T && p.mult_F != p.mult_G) ++n;
        for (const auto& rec : m.only_F)
            if (std::abs(rec.position) <= T) ++n;
        for (const auto& rec : m.only_G)
            if (std::abs(rec.position) <= T) ++n;
        est.n_E.push_back(n);
    }
    double stderr_unused = 0;
    fit_line(est.T_grid, est.n_E, est.slope, stderr_unused);
    bool decreasing = true;
    for (std::size_t i = T_grid.size() / 2; i + 1 < T_grid.size(); ++i) {
        double r0 = double(est.n_E[i]) / T_grid[i];
        double r1 = double(est.n_E[i + 1]) / T_grid[i + 1];
        if (r1 > r0 + 1e-12) decreasing = false;
    }
    est.o_r_verdict = est.slope < theta_prime && decreasing;
    return est;
}

} // namespace dseries
