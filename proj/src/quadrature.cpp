#include "dseries/quadrature.hpp"

#include "dseries/parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <vector>

namespace dseries {

namespace {

using GL = boost::math::quadrature::gauss<double, 16>;

// integrand value at parameter t plus a positivity gauge (|f-a|) used for
// singularity detection and boundary-proximity reporting
using PanelFn = std::function<std::pair<Complex, double>(double)>;

struct ContourSum {
    Complex integral{0, 0};
    double min_gauge = std::numeric_limits<double>::infinity();
    int panels = 0;
    bool converged = true;
    bool singular_floor = false;
};

// node parameters of one panel in fixed order (the reduction below must sum
// in exactly this order so results do not depend on the thread count)
void gl_nodes(double t0, double t1, std::vector<double>& ts, std::vector<double>& ws) {
    const double c = 0.5 * (t0 + t1), h = 0.5 * (t1 - t0);
    ts.clear();
    ws.clear();
    for (unsigned i = 0; i < GL::abscissa().size(); ++i) {
        const double x = GL::abscissa()[i], w = GL::weights()[i];
        for (double sgn : {-1.0, 1.0}) {
            if (i == 0 && GL::abscissa()[0] == 0.0 && sgn > 0) continue;
            ts.push_back(c + sgn * x * h);
            ws.push_back(w);
        }
    }
}

struct PanelJob {
    double a, b;
};

// evaluates a batch of panels with one parallel sweep over all nodes; each
// panel is then reduced sequentially in node order
void gl_panel_batch(const PanelFn& g, const std::vector<PanelJob>& jobs, int threads,
                    std::vector<Complex>& ests, std::vector<double>& gauges) {
    const std::size_t np = jobs.size();
    ests.assign(np, Complex{0, 0});
    gauges.assign(np, std::numeric_limits<double>::infinity());
    std::vector<double> ts, ws;
    std::vector<std::size_t> offs(np + 1, 0);
    std::vector<double> all_t, all_w;
    for (std::size_t p = 0; p < np; ++p) {
        gl_nodes(jobs[p].a, jobs[p].b, ts, ws);
        all_t.insert(all_t.end(), ts.begin(), ts.end());
        all_w.insert(all_w.end(), ws.begin(), ws.end());
        offs[p + 1] = all_t.size();
    }
    std::vector<Complex> vals(all_t.size());
    std::vector<double> gs(all_t.size());
    parallel_for(all_t.size(), threads, [&](std::size_t i) {
        auto [v, gauge] = g(all_t[i]);
        if (!std::isfinite(std::abs(v))) v = Complex(1e30, 1e30);
        vals[i] = v;
        gs[i] = gauge;
    });
    for (std::size_t p = 0; p < np; ++p) {
        Complex acc{0, 0};
        double mg = std::numeric_limits<double>::infinity();
        for (std::size_t i = offs[p]; i < offs[p + 1]; ++i) {
            acc += all_w[i] * vals[i];
            mg = std::min(mg, gs[i]);
        }
        ests[p] = acc * (0.5 * (jobs[p].b - jobs[p].a));
        gauges[p] = mg;
    }
}

// Adaptive bisection: a panel is accepted when its estimate agrees with the
// sum of its two halves (the accepted value is the refined half-sum, so the
// final result is one refinement level deeper than the acceptance test).
// Refinement proceeds in waves; every pending panel pair of a wave is
// evaluated in one parallel batch, while acceptance and accumulation stay
// sequential in panel order, so the result is independent of thread count.
ContourSum adaptive_contour(const PanelFn& g, double t0, double t1, double tol,
                            int max_panels, double width_floor, bool tanh_fallback,
                            int threads = 1, int init_panels = 8,
                            double singular_gauge = 1e-12) {
    struct Panel {
        double a, b;
        Complex est;
    };
    ContourSum out;
    const double W = t1 - t0;
    std::vector<Panel> wave;
    {
        const int init = init_panels;
        std::vector<PanelJob> jobs;
        for (int i = 0; i < init; ++i)
            jobs.push_back({t0 + W * i / init, t0 + W * (i + 1) / init});
        std::vector<Complex> ests;
        std::vector<double> gauges;
        gl_panel_batch(g, jobs, threads, ests, gauges);
        for (int i = 0; i < init; ++i) {
            wave.push_back({jobs[i].a, jobs[i].b, ests[i]});
            out.min_gauge = std::min(out.min_gauge, gauges[i]);
        }
        out.panels += init;
    }
    while (!wave.empty()) {
        std::vector<PanelJob> jobs;
        jobs.reserve(2 * wave.size());
        for (const Panel& p : wave) {
            const double m = 0.5 * (p.a + p.b);
            jobs.push_back({p.a, m});
            jobs.push_back({m, p.b});
        }
        std::vector<Complex> ests;
        std::vector<double> gauges;
        gl_panel_batch(g, jobs, threads, ests, gauges);
        out.panels += static_cast<int>(jobs.size());
        const bool budget_spent = out.panels >= max_panels;
        std::vector<Panel> next;
        for (std::size_t i = 0; i < wave.size(); ++i) {
            const Panel& p = wave[i];
            const Complex l = ests[2 * i], r = ests[2 * i + 1];
            const double gauge_here = std::min(gauges[2 * i], gauges[2 * i + 1]);
            out.min_gauge = std::min(out.min_gauge, gauge_here);
            const double diff = std::abs(p.est - (l + r));
            const double share = tol * (p.b - p.a) / W;
            if (diff <= share || (p.b - p.a) <= width_floor) {
                if ((p.b - p.a) <= width_floor && diff > share) {
                    if (tanh_fallback && gauge_here < singular_gauge) {
                        // split at the sampled minimum so the (integrable) log
                        // singularity sits at panel endpoints
                        const double m = 0.5 * (p.a + p.b);
                        const int probes = 64;
                        double best_t = m, best_g = std::numeric_limits<double>::infinity();
                        for (int j = 0; j <= probes; ++j) {
                            double t = p.a + (p.b - p.a) * j / probes;
                            double gg = g(t).second;
                            if (gg < best_g) {
                                best_g = gg;
                                best_t = t;
                            }
                        }
                        boost::math::quadrature::tanh_sinh<double> ts;
                        auto re_part = [&](double t) { return g(t).first.real(); };
                        auto im_part = [&](double t) { return g(t).first.imag(); };
                        double eps = (p.b - p.a) * 1e-12;
                        Complex v{ts.integrate(re_part, p.a, best_t - eps) +
                                      ts.integrate(re_part, best_t + eps, p.b),
                                  ts.integrate(im_part, p.a, best_t - eps) +
                                      ts.integrate(im_part, best_t + eps, p.b)};
                        out.integral += v;
                        out.singular_floor = true;
                        continue;
                    }
                    out.converged = false;
                }
                out.integral += l + r;
                continue;
            }
            if (budget_spent) {
                out.integral += l + r;
                out.converged = false;
                continue;
            }
            next.push_back({p.a, 0.5 * (p.a + p.b), l});
            next.push_back({0.5 * (p.a + p.b), p.b, r});
        }
        wave = std::move(next);
    }
    return out;
}

PanelFn winding_integrand_circle(const MeromorphicOracle& f, Complex a, Complex center,
                                 double r) {
    return [f, a, center, r](double th) -> std::pair<Complex, double> {
        const Complex e{std::cos(th), std::sin(th)};
        const Complex z = center + r * e;
        const EvalResult fv = f.eval(z);
        const EvalResult fd = f.deriv(z);
        const Complex den = fv.value - a;
        // dz = i r e^{i th} d th, divided by 2 pi i
        const Complex g = fd.value / den * (r * e) / (2.0 * M_PI);
        return {g, std::abs(den)};
    };
}

} // namespace

WindingResult winding_circle(const MeromorphicOracle& f, Complex a, Complex center,
                             double r, const WindingOptions& opt) {
    ContourSum cs = adaptive_contour(winding_integrand_circle(f, a, center, r), 0.0,
                                     2.0 * M_PI, opt.tol, opt.max_panels,
                                     2.0 * M_PI / (1 << 22), false, opt.threads);
    WindingResult w;
    w.winding = cs.integral.real();
    w.imag_leak = cs.integral.imag();
    w.min_gauge = cs.min_gauge;
    w.panels = cs.panels;
    w.stabilized = cs.converged && std::abs(w.imag_leak) < 0.05 &&
                   nearly_integer(w.winding, opt.integer_tol);
    return w;
}

WindingResult winding_rect(const MeromorphicOracle& f, Complex a, double x0, double y0,
                           double x1, double y1, const WindingOptions& opt) {
    const Complex corners[5] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
    Complex total{0, 0};
    WindingResult w;
    w.panels = 0;
    bool conv = true;
    for (int e = 0; e < 4; ++e) {
        const Complex z0 = corners[e], z1 = corners[e + 1];
        PanelFn g = [f, a, z0, z1](double t) -> std::pair<Complex, double> {
            const Complex z = z0 + t * (z1 - z0);
            const EvalResult fv = f.eval(z);
            const EvalResult fd = f.deriv(z);
            const Complex den = fv.value - a;
            const Complex val =
                fd.value / den * (z1 - z0) / Complex(0.0, 2.0 * M_PI);
            return {val, std::abs(den)};
        };
        ContourSum cs = adaptive_contour(g, 0.0, 1.0, opt.tol * 0.25, opt.max_panels,
                                         1.0 / (1 << 22), false, opt.threads, 4);
        total += cs.integral;
        w.min_gauge = std::min(w.min_gauge, cs.min_gauge);
        w.panels += cs.panels;
        conv = conv && cs.converged;
    }
    w.winding = total.real();
    w.imag_leak = total.imag();
    w.stabilized = conv && std::abs(w.imag_leak) < 0.05 &&
                   nearly_integer(w.winding, opt.integer_tol);
    return w;
}

double boundary_log_average(const MeromorphicOracle& f, Complex a, Complex center,
                            double R, double tol, int threads) {
    PanelFn g = [f, a, center, R](double th) -> std::pair<Complex, double> {
        const Complex z = center + R * Complex(std::cos(th), std::sin(th));
        const EvalResult fv = f.eval(z);
        const double m = std::abs(fv.value - a);
        const double v = m > 0 ? std::log(m) : -745.0; // log(DBL_MIN) floor
        return {Complex(v, 0.0), m};
    };
    ContourSum cs = adaptive_contour(g, 0.0, 2.0 * M_PI, tol * 2.0 * M_PI, 1 << 16,
                                     2.0 * M_PI / (1 << 18), true, threads);
    if (!cs.converged && !cs.singular_floor)
        throw convergence_error("boundary_log_average: quadrature did not converge (min |f-a| = " +
                                fmt_sig(cs.min_gauge) + ")");
    return cs.integral.real() / (2.0 * M_PI);
}

double poisson_log_average(const MeromorphicOracle& f, Complex s, double R, double tol,
                           int threads) {
    PanelFn g = [f, s, R](double th) -> std::pair<Complex, double> {
        const Complex w = R * Complex(std::cos(th), std::sin(th));
        const EvalResult fv = f.eval(w);
        const double m = std::abs(fv.value);
        const double lg = m > 0 ? std::log(m) : -745.0;
        const double ker = ((w + s) / (w - s)).real();
        return {Complex(ker * lg, 0.0), m};
    };
    ContourSum cs = adaptive_contour(g, 0.0, 2.0 * M_PI, tol * 2.0 * M_PI, 1 << 16,
                                     2.0 * M_PI / (1 << 18), true, threads);
    if (!cs.converged && !cs.singular_floor)
        throw convergence_error("poisson_log_average: quadrature did not converge");
    return cs.integral.real() / (2.0 * M_PI);
}

Complex cauchy_coefficient(const MeromorphicOracle& f, int m, double rho, double tol,
                           int threads) {
    PanelFn g = [f, m, rho](double th) -> std::pair<Complex, double> {
        const Complex e{std::cos(th), std::sin(th)};
        const Complex z = rho * e;
        const EvalResult fv = f.eval(z);
        // f(z) z^{-(m+1)} dz/(2 pi i) = f(z) rho^{-m} e^{-i m th} dth / (2 pi)
        const Complex v =
            fv.value * std::pow(rho, -m) * std::exp(Complex(0, -m * th)) / (2.0 * M_PI);
        return {v, std::abs(fv.value)};
    };
    ContourSum cs = adaptive_contour(g, 0.0, 2.0 * M_PI, tol, 1 << 14,
                                     2.0 * M_PI / (1 << 20), false, threads);
    if (!cs.converged)
        throw convergence_error("cauchy_coefficient: quadrature did not converge");
    return cs.integral;
}

} // namespace dseries
