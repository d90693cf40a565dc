#include "dseries/catalog.hpp"
#include "dseries/zeta.hpp"

#include <algorithm>
#include <cmath>

namespace dseries {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

ExponentialSum sum_of(std::initializer_list<Term> ts) {
    return make_sum(std::vector<Term>(ts), SumConvention::dirichlet);
}

// zeros of 1 + c q^{-s} with c q^{1/2-sigma0...}: for 1+2^{-s} the lattice is
// s = -i pi (2k+1)/ln 2; for 1 + c q^{-s} with c>0 it is
// s = ln(c)/ln(q) - i pi (2k+1)/ln(q)
std::vector<PolePoint> odd_lattice(double sigma, double lnq, double r) {
    std::vector<PolePoint> out;
    for (long k = 0;; ++k) {
        double t = kPi * (2 * k + 1) / lnq;
        if (std::hypot(sigma, t) > r) break;
        out.push_back({{sigma, t}, 1});
        out.push_back({{sigma, -t}, 1});
    }
    return out;
}

std::vector<PolePoint> even_lattice_with_origin(double r) {
    std::vector<PolePoint> out;
    out.push_back({{0, 0}, 1});
    for (long k = 1; k * kTwoPi <= r; ++k) {
        out.push_back({{0, k * kTwoPi}, 1});
        out.push_back({{0, -k * kTwoPi}, 1});
    }
    return out;
}

void stream_odd(double sigma, double lnq, double max_r,
                const std::function<void(double, int)>& cb) {
    for (long k = 0;; ++k) {
        double m = std::hypot(sigma, kPi * (2 * k + 1) / lnq);
        if (m > max_r) break;
        cb(m, 2);
    }
}

void stream_even_origin(double max_r, const std::function<void(double, int)>& cb) {
    cb(0.0, 1);
    for (long k = 1; k * kTwoPi <= max_r; ++k) cb(k * kTwoPi, 2);
}

std::vector<CatalogEntry> build_catalog() {
    std::vector<CatalogEntry> cat;

    {
        CatalogEntry e;
        e.name = "1+2^-s";
        e.role = CatalogEntry::Role::positive;
        e.series = sum_of({{0.0, {1, 0}}, {std::log(2.0), {1, 0}}});
        auto s = *e.series;
        e.make = [s] { return as_oracle(s); };
        double ln2 = std::log(2.0);
        e.zeros_within = [ln2](double r) { return odd_lattice(0.0, ln2, r); };
        e.poles_within = [](double) { return std::vector<PolePoint>{}; };
        e.stream_moduli = [ln2](double m, const std::function<void(double, int)>& cb) {
            stream_odd(0.0, ln2, m, cb);
        };
        cat.push_back(std::move(e));
    }
    {
        CatalogEntry e;
        e.name = "e^-s";
        e.role = CatalogEntry::Role::negative_control;
        e.series = sum_of({{1.0, {1, 0}}});
        auto s = *e.series;
        e.make = [s] { return as_oracle(s); };
        e.zeros_within = [](double) { return std::vector<PolePoint>{}; };
        e.poles_within = [](double) { return std::vector<PolePoint>{}; };
        e.stream_moduli = [](double, const std::function<void(double, int)>&) {};
        e.flag_nonzero_limit = false; // value drains to 0 towards +infinity
        e.flag_nontrivial = false;    // single-term sum
        cat.push_back(std::move(e));
    }
    {
        CatalogEntry e;
        e.name = "1/(1-e^-s)";
        e.role = CatalogEntry::Role::positive;
        e.make = [] { return geometric_oracle(); };
        e.zeros_within = [](double) { return std::vector<PolePoint>{}; };
        e.poles_within = [](double r) { return even_lattice_with_origin(r); };
        e.stream_moduli = [](double m, const std::function<void(double, int)>& cb) {
            stream_even_origin(m, cb);
        };
        cat.push_back(std::move(e));
    }
    {
        CatalogEntry e;
        e.name = "1-e^-s";
        e.role = CatalogEntry::Role::positive;
        e.series = sum_of({{0.0, {1, 0}}, {1.0, {-1, 0}}});
        auto s = *e.series;
        e.make = [s] { return as_oracle(s); };
        e.zeros_within = [](double r) { return even_lattice_with_origin(r); };
        e.poles_within = [](double) { return std::vector<PolePoint>{}; };
        e.stream_moduli = [](double m, const std::function<void(double, int)>& cb) {
            stream_even_origin(m, cb);
        };
        cat.push_back(std::move(e));
    }
    {
        CatalogEntry e;
        e.name = "1+2*4^-s";
        e.role = CatalogEntry::Role::counterexample_pair;
        e.series = sum_of({{0.0, {1, 0}}, {std::log(4.0), {2, 0}}});
        auto s = *e.series;
        e.make = [s] { return as_oracle(s); };
        double ln4 = std::log(4.0);
        // 2*4^{-s} = -1 at sigma = ln2/ln4 = 1/2
        e.zeros_within = [ln4](double r) { return odd_lattice(0.5, ln4, r); };
        e.poles_within = [](double) { return std::vector<PolePoint>{}; };
        e.stream_moduli = [ln4](double m, const std::function<void(double, int)>& cb) {
            stream_odd(0.5, ln4, m, cb);
        };
        cat.push_back(std::move(e));
    }
    {
        CatalogEntry e;
        e.name = "1+3*9^-s";
        e.role = CatalogEntry::Role::counterexample_pair;
        e.series = sum_of({{0.0, {1, 0}}, {std::log(9.0), {3, 0}}});
        auto s = *e.series;
        e.make = [s] { return as_oracle(s); };
        double ln9 = std::log(9.0);
        e.zeros_within = [ln9](double r) { return odd_lattice(0.5, ln9, r); };
        e.poles_within = [](double) { return std::vector<PolePoint>{}; };
        e.stream_moduli = [ln9](double m, const std::function<void(double, int)>& cb) {
            stream_odd(0.5, ln9, m, cb);
        };
        cat.push_back(std::move(e));
    }
    {
        CatalogEntry e;
        e.name = "zeta";
        e.role = CatalogEntry::Role::showcase;
        // the enclosing-square sweep of locate_values reaches sqrt(2) times
        // the disk radius, so give the continuation room beyond r = 30
        e.make = [] { return zeta_oracle(44.0); };
        e.zeros_within = [](double r) {
            if (r > 41.0)
                throw domain_error("zeta reference table covers |s| <= 41 only");
            std::vector<PolePoint> out;
            for (long k = 1; 2.0 * k <= r; ++k) out.push_back({{-2.0 * k, 0}, 1});
            for (double t : zeta_nontrivial_ordinates()) {
                if (std::hypot(0.5, t) > r) break;
                out.push_back({{0.5, t}, 1});
                out.push_back({{0.5, -t}, 1});
            }
            return out;
        };
        e.poles_within = [](double r) {
            std::vector<PolePoint> out;
            if (r >= 1.0) out.push_back({{1, 0}, 1});
            return out;
        };
        e.stream_moduli = nullptr; // no closed-form lattice to extend
        cat.push_back(std::move(e));
    }
    {
        CatalogEntry e;
        e.name = "e^(e^-s)";
        e.role = CatalogEntry::Role::metadata_only;
        e.make = nullptr; // infinite order; listed for hypothesis bookkeeping only
        e.zeros_within = [](double) { return std::vector<PolePoint>{}; };
        e.poles_within = [](double) { return std::vector<PolePoint>{}; };
        e.stream_moduli = [](double, const std::function<void(double, int)>&) {};
        e.declared_order = std::numeric_limits<double>::infinity();
        e.flag_finite_order = false;
        cat.push_back(std::move(e));
    }
    return cat;
}

} // namespace

const std::vector<double>& zeta_nontrivial_ordinates() {
    static const std::vector<double> t = {
        14.134725141734694, 21.022039638771555, 25.010857580145688, 30.424876125859513,
        32.935061587739190, 37.586178158825671, 40.918719012147495, 43.327073280914999,
    };
    return t;
}

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> cat = build_catalog();
    return cat;
}

const CatalogEntry& catalog_entry(const std::string& name) {
    for (const auto& e : catalog())
        if (e.name == name) return e;
    throw precondition_error("catalog: no entry named '" + name + "'");
}

} // namespace dseries
