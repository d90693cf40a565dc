#pragma once

#include <complex>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dseries {

using Complex = std::complex<double>;

// Evaluation result: computed value plus an upper bound on the absolute error.
struct EvalResult {
    Complex value;
    double err;
};

struct PolePoint {
    Complex position;
    int multiplicity;
};

struct DiskRegion {
    Complex center;
    double radius;
};

// Evaluation outside an oracle's validity radius, or composition exceeding it.
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quadrature / subdivision budget exhausted without stabilization.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A stated hypothesis of an operation does not hold; message names it.
struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string fmt_sig(double x, int sig = 10) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", sig, x);
    return buf;
}

inline std::string fmt_complex(Complex z, int sig = 10) {
    return "(" + fmt_sig(z.real(), sig) + "," + fmt_sig(z.imag(), sig) + ")";
}

inline bool nearly_integer(double w, double tol = 0.25) {
    return std::abs(w - std::round(w)) <= tol;
}

} // namespace dseries
