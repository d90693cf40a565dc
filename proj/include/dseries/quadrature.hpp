#pragma once

#include <functional>

#include "dseries/oracle.hpp"

namespace dseries {

struct WindingOptions {
    double tol = 5e-4;        // total quadrature error target for the contour
    int max_panels = 1 << 14; // leaf budget per contour
    double integer_tol = 0.25;
    int threads = 1; // workers for batched panel evaluation
};

struct WindingResult {
    double winding = 0.0;   // Re of (1/2pi i) oint f'/(f-a) dz
    double imag_leak = 0.0; // Im of the same integral; near 0 on closed contours
    bool stabilized = false;
    double min_gauge = std::numeric_limits<double>::infinity(); // min |f-a| sampled
    int panels = 0;
};

// Closed-circle winding number of f - a about center with radius r.
WindingResult winding_circle(const MeromorphicOracle& f, Complex a, Complex center,
                             double r, const WindingOptions& opt = {});

// Counterclockwise rectangle [x0,x1] x [y0,y1].
WindingResult winding_rect(const MeromorphicOracle& f, Complex a, double x0, double y0,
                           double x1, double y1, const WindingOptions& opt = {});

// (1/2pi) int_0^{2pi} log|f(center + R e^{i phi}) - a| dphi. Panels whose
// sampled |f-a| dips below the singular floor are split at the minimum and
// finished with tanh-sinh endpoint weighting (integrable log singularity).
double boundary_log_average(const MeromorphicOracle& f, Complex a, Complex center,
                            double R, double tol = 1e-9, int threads = 1);

// Same boundary integral against the Poisson kernel Re[(Re^{i phi}+s)/(Re^{i phi}-s)].
double poisson_log_average(const MeromorphicOracle& f, Complex s, double R,
                           double tol = 1e-9, int threads = 1);

// Laurent coefficient a_m = (1/2pi i) oint f(z) z^{-(m+1)} dz over |z| = rho.
Complex cauchy_coefficient(const MeromorphicOracle& f, int m, double rho,
                           double tol = 1e-11, int threads = 1);

} // namespace dseries
