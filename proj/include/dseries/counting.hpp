#pragma once

#include "dseries/quadrature.hpp"

namespace dseries {

// Counting target: a finite value a (solutions of f = a) or poles (a = infinity).
struct Target {
    bool is_pole = false;
    Complex a{0, 0};
    static Target value(Complex v) { return {false, v}; }
    static Target poles() { return {true, {0, 0}}; }
};

struct ZeroRecord {
    Complex position;
    int multiplicity = 1;
    enum class Kind { value, pole } kind = Kind::value;
    double certification_radius = 0; // winding on this circle equals multiplicity
    double residual = 0;             // |f(pos)-a|, or 1/|f(pos)| for poles
    bool merged_cluster = false;     // unresolved at the resolution floor
};

struct CountResult {
    long count = 0;      // zeros of f-a inside (pole count when target is poles)
    long pole_count = 0; // resolved poles inside, for context
    bool certified = false;
    double used_radius = 0; // boundary protocol outcome (closed disk |s| <= this)
    double winding = 0;     // raw quadrature winding (Z - P)
    std::string note;
};

struct LocateResult {
    std::vector<ZeroRecord> records; // sorted by (Re, Im)
    double used_radius = 0;
    long total = 0; // sum of multiplicities
};

struct IntegratedCount {
    double sum_form = 0;  // sum log(r/|alpha_k|) + n(0) log r
    double grid_form = 0; // trapezoid integration of n(t)/t
    double discrepancy = 0;
    double used_radius = 0;
};

struct CountingRow {
    double r;
    long n_zero, n_pole;
    double N_zero, N_pole, ratio;
};

struct CountingTable {
    std::vector<CountingRow> rows;
    Complex target_value{0, 0};
    std::string note; // boundary-perturbation metadata
    LocateResult zeros, poles; // located at the largest grid radius
};

struct CountOptions {
    WindingOptions winding{};
    int max_retreats = 26;   // r_k = r (1 + 1e-6 * 1.445^{k-1})
    double box_floor = 1e-3; // quadrisection floor, times max(1, r)
    int multiplicity_cap = 16;
    bool fixed_radius = false; // fail rather than retreat (joint-radius callers)
    int threads = 1;           // box-subdivision frontier parallelism
};

// Declared poles plus zeros of lazy pole sources (quotient denominators),
// located by the argument principle and cached per source.
std::vector<PolePoint> resolve_poles(const MeromorphicOracle& f, double radius,
                                     const CountOptions& opt = {});

// n(r, a; f) on the closed disk |s| <= r. Boundary protocol: when the circle
// gauge min|f-a| (or a pole) sits too close to the contour, retreat outward
// through r(1 + 1e-6 2^{k-1}) and report the first certified radius.
CountResult count_in_disk(const MeromorphicOracle& f, double r, Target a,
                          const CountOptions& opt = {});

// Recursive quadrisection of the enclosing square, then local polishing;
// multiplicities certified by isolating-circle windings.
LocateResult locate_values(const MeromorphicOracle& f, double r, Target a,
                           const CountOptions& opt = {});

// N(r, a; f) two ways: the exact zero sum and a grid integration of n(t)/t.
IntegratedCount integrated_count(const MeromorphicOracle& f, double r, Target a,
                                 const CountOptions& opt = {});
// Same comparison from an already-located record set.
IntegratedCount integrated_count(const LocateResult& located);

double jensen_residual(const MeromorphicOracle& f, double R, double quad_tol = 1e-9,
                       const CountOptions& opt = {});
double poisson_jensen_residual(const MeromorphicOracle& f, Complex s, double R,
                               double quad_tol = 1e-9, const CountOptions& opt = {});

CountingTable counting_table(const MeromorphicOracle& f, const std::vector<double>& grid,
                             Complex a = {0, 0}, int threads = 1,
                             const CountOptions& opt = {});
std::string to_csv(const CountingTable& table);

} // namespace dseries
