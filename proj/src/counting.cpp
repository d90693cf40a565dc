#include "dseries/counting.hpp"
#include "dseries/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace dseries {
namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

// outward perturbation schedule: r, then r (1 + 1e-6 g^{k-1}) with g chosen
// so the final offset at k = 26 stays near one percent of r
double perturbed_radius(double r, int k) {
    if (k <= 0) return r;
    return r * (1.0 + 1e-6 * std::pow(1.445, k - 1));
}

// radial clearance a zero or pole must keep from the contour so the winding
// integrand stays resolvable above the panel floor
double circle_margin(double r) {
    return std::max(1e-9 * std::max(1.0, r), 1.2e-5 * r);
}

// smallest Newton distance |f - a| / |f'| over circle samples, a scale-free
// estimate of how close the contour passes to a solution of f = a; near a
// pole it degrades to the distance to the pole, so clearance stays consistent
double scan_circle(const MeromorphicOracle& f, Complex a, double r) {
    const int n = 256;
    double min_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        // fixed fractional offset keeps samples off the axes
        double th = kTwoPi * (i + 0.37) / n;
        Complex s = std::polar(r, th);
        EvalResult ev = f.eval(s);
        double g = std::abs(ev.value - a);
        if (!std::isfinite(g)) g = 1e300;
        EvalResult dv = f.deriv(s);
        double dg = std::abs(dv.value);
        double dist = 1e300;
        if (g == 0)
            dist = 0;
        else if (std::isfinite(dg) && dg > 0 && g < 1e300)
            dist = g / dg;
        min_dist = std::min(min_dist, dist);
    }
    return min_dist;
}

// moduli of solutions of f = a living near the circle |s| = r, found by plain
// Newton from the angular local minima of |f - a|; used to steer the retreat
std::vector<double> near_boundary_moduli(const MeromorphicOracle& f, Complex a, double r) {
    const int n = 512;
    std::vector<double> gap(n);
    std::vector<Complex> pts(n);
    for (int i = 0; i < n; ++i) {
        double th = kTwoPi * (i + 0.37) / n;
        pts[i] = std::polar(r, th);
        double g;
        try {
            g = std::abs(f.eval(pts[i]).value - a);
        } catch (const domain_error&) {
            g = 1e300;
        }
        gap[i] = std::isfinite(g) ? g : 1e300;
    }
    std::vector<double> mods;
    for (int i = 0; i < n; ++i) {
        int l = (i + n - 1) % n, rr = (i + 1) % n;
        if (!(gap[i] <= gap[l] && gap[i] <= gap[rr])) continue;
        Complex z = pts[i];
        bool ok = false;
        try {
            for (int it = 0; it < 30; ++it) {
                Complex fv = f.eval(z).value, fd = f.deriv(z).value;
                if (!std::isfinite(std::abs(fv)) || !std::isfinite(std::abs(fd))) break;
                Complex step = (fv - a) / fd;
                if (!std::isfinite(std::abs(step))) break;
                z -= step;
                if (std::abs(z) > 3.0 * r + 1.0) break;
                if (std::abs(step) <= 1e-11 * (1.0 + std::abs(z))) {
                    ok = true;
                    break;
                }
            }
        } catch (const domain_error&) {
            ok = false;
        }
        if (ok && std::abs(std::abs(z) - r) <= 0.08 * r) mods.push_back(std::abs(z));
    }
    std::sort(mods.begin(), mods.end());
    mods.erase(std::unique(mods.begin(), mods.end(),
                           [r](double x, double y) { return std::abs(x - y) < 1e-9 * r; }),
               mods.end());
    return mods;
}

struct RadiusChoice {
    double r;
    int k;
};

// first radius in the retreat schedule clear of the supplied moduli and, when
// a finite target is given, passing the Newton-distance circle gauge
RadiusChoice pick_radius(const MeromorphicOracle& f, const Complex* a, double r,
                         const std::vector<double>& pole_mods,
                         const std::vector<double>& zero_mods, const CountOptions& opt,
                         int k_start) {
    int k_end = opt.fixed_radius ? k_start : opt.max_retreats;
    for (int k = k_start; k <= k_end; ++k) {
        double rk = perturbed_radius(r, k);
        double margin = circle_margin(rk);
        bool clear = true;
        for (double m : pole_mods)
            if (std::abs(m - rk) < margin) clear = false;
        for (double m : zero_mods)
            if (std::abs(m - rk) < margin) clear = false;
        if (!clear) continue;
        if (a && scan_circle(f, *a, rk) < margin) continue;
        return {rk, k};
    }
    throw convergence_error("boundary protocol exhausted near r=" + fmt_sig(r) +
                            " for '" + f.label() + "'");
}

std::vector<double> moduli_of(const std::vector<PolePoint>& ps) {
    std::vector<double> out;
    out.reserve(ps.size());
    for (const auto& p : ps) out.push_back(std::abs(p.position));
    return out;
}

long poles_within(const std::vector<PolePoint>& ps, double r) {
    long n = 0;
    for (const auto& p : ps)
        if (std::abs(p.position) <= r) n += p.multiplicity;
    return n;
}

struct PoleCache {
    std::mutex mu;
    struct Entry {
        double radius = -1;
        std::vector<PolePoint> poles;
        std::shared_ptr<const detail::OracleImpl> keep;
    };
    std::map<const void*, Entry> map;
};

PoleCache& pole_cache() {
    static PoleCache c;
    return c;
}

std::vector<PolePoint> source_zeros(const MeromorphicOracle& src, double radius,
                                    const CountOptions& opt) {
    {
        std::lock_guard<std::mutex> lk(pole_cache().mu);
        auto it = pole_cache().map.find(src.key());
        if (it != pole_cache().map.end() && it->second.radius >= radius) {
            std::vector<PolePoint> out;
            for (const auto& p : it->second.poles)
                if (std::abs(p.position) <= radius) out.push_back(p);
            return out;
        }
    }
    CountOptions sub = opt;
    sub.fixed_radius = false;
    sub.threads = 1;
    LocateResult lr = locate_values(src, radius, Target::value({0, 0}), sub);
    std::vector<PolePoint> all;
    all.reserve(lr.records.size());
    for (const auto& rec : lr.records) all.push_back({rec.position, rec.multiplicity});
    {
        std::lock_guard<std::mutex> lk(pole_cache().mu);
        auto& e = pole_cache().map[src.key()];
        if (lr.used_radius > e.radius) {
            e.radius = lr.used_radius;
            e.poles = all;
            e.keep = src.impl();
        }
    }
    std::vector<PolePoint> out;
    for (const auto& p : all)
        if (std::abs(p.position) <= radius) out.push_back(p);
    return out;
}

// ---- box subdivision ----

struct Box {
    double x0, y0, x1, y1;
    long count = 0;
};

double box_diag(const Box& b) { return std::hypot(b.x1 - b.x0, b.y1 - b.y0); }

long poles_in_box(const std::vector<PolePoint>& ps, const Box& b) {
    long n = 0;
    for (const auto& p : ps) {
        double x = p.position.real(), y = p.position.imag();
        if (x > b.x0 && x < b.x1 && y > b.y0 && y < b.y1) n += p.multiplicity;
    }
    return n;
}

struct BoxCount {
    long count = 0;
    bool ok = false;
};

BoxCount box_count(const MeromorphicOracle& f, Complex a, const Box& b,
                   const std::vector<PolePoint>& poles, const CountOptions& opt) {
    WindingResult w = winding_rect(f, a, b.x0, b.y0, b.x1, b.y1, opt.winding);
    if (!w.stabilized) return {};
    long c = std::lround(w.winding) + poles_in_box(poles, b);
    if (c < 0) return {};
    return {c, true};
}

double point_segment_dist(Complex p, Complex s0, Complex s1) {
    Complex d = s1 - s0;
    double L2 = std::norm(d);
    if (L2 == 0) return std::abs(p - s0);
    double t = std::clamp(((p - s0) * std::conj(d)).real() / L2, 0.0, 1.0);
    return std::abs(p - (s0 + t * d));
}

// score a candidate split line: distance of poles to it and the sampled
// minimum of |f - a| along it (larger is safer for the child windings)
double line_score(const MeromorphicOracle& f, Complex a, Complex s0, Complex s1,
                  const std::vector<PolePoint>& poles) {
    double pd = std::numeric_limits<double>::infinity();
    for (const auto& p : poles) pd = std::min(pd, point_segment_dist(p.position, s0, s1));
    double L = std::abs(s1 - s0);
    if (pd < 1e-7 * std::max(1.0, L)) return -1.0;
    double g = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 16; ++i) {
        Complex s = s0 + (s1 - s0) * ((i + 0.4137) / 17.0);
        double v;
        try {
            v = std::abs(f.eval(s).value - a);
        } catch (const domain_error&) {
            return -1.0;
        }
        if (!std::isfinite(v)) v = 1e300;
        g = std::min(g, v);
    }
    return g;
}

ZeroRecord cluster_record(const Box& b, long m) {
    ZeroRecord rec;
    rec.position = {(b.x0 + b.x1) / 2, (b.y0 + b.y1) / 2};
    rec.multiplicity = static_cast<int>(m);
    rec.kind = ZeroRecord::Kind::value;
    rec.certification_radius = box_diag(b) / 2;
    rec.residual = std::numeric_limits<double>::quiet_NaN();
    rec.merged_cluster = true;
    return rec;
}

ZeroRecord polish_leaf(const MeromorphicOracle& f, Complex a, const Box& b, long m,
                       const CountOptions& opt) {
    if (m > opt.multiplicity_cap) return cluster_record(b, m);
    Complex z{(b.x0 + b.x1) / 2, (b.y0 + b.y1) / 2};
    double diag = box_diag(b);
    bool converged = false;
    try {
        int stagnant = 0;
        for (int it = 0; it < 60; ++it) {
            Complex fv = f.eval(z).value, fd = f.deriv(z).value;
            double g = std::abs(fv - a);
            if (!std::isfinite(g) || !std::isfinite(std::abs(fd))) break;
            Complex step = double(m) * (fv - a) / fd;
            if (!std::isfinite(std::abs(step))) break;
            double kappa = 1.0;
            bool moved = false;
            for (int t = 0; t < 8; ++t) {
                Complex zn = z - kappa * step;
                double gn = std::abs(f.eval(zn).value - a);
                if (std::isfinite(gn) && gn < g) {
                    z = zn;
                    moved = true;
                    break;
                }
                kappa /= 2;
            }
            if (!moved) {
                // stagnation at the evaluation noise floor with a tiny Newton
                // step means the root is resolved to that step
                if (std::abs(step) <= 1e-8 * (1.0 + std::abs(z))) {
                    converged = true;
                    break;
                }
                if (++stagnant >= 2) break;
                continue;
            }
            if (std::abs(kappa * step) <= 1e-12 * (1.0 + std::abs(z))) {
                converged = true;
                break;
            }
        }
    } catch (const domain_error&) {
        converged = false;
    }
    double cx = (b.x0 + b.x1) / 2, cy = (b.y0 + b.y1) / 2;
    bool escaped = std::abs(z.real() - cx) > 1.5 * (b.x1 - b.x0) ||
                   std::abs(z.imag() - cy) > 1.5 * (b.y1 - b.y0);
    if (!converged || escaped) return cluster_record(b, m);

    // isolating circle: winding about z must equal the box multiplicity; the
    // start radius is capped so polishing inside a large box does not open
    // with a circle swallowing its neighbours
    double rho = std::max(std::min(0.2 * diag, 0.05 * (1.0 + std::abs(z))),
                          1e-9 * (1.0 + std::abs(z)));
    double certified = 0;
    for (int t = 0; t < 20 && certified == 0; ++t) {
        WindingResult w;
        bool ok = true;
        try {
            w = winding_circle(f, a, z, rho, opt.winding);
        } catch (const std::exception&) {
            ok = false;
        }
        if (ok && w.stabilized) {
            long c = std::lround(w.winding);
            if (c == m) {
                certified = rho;
                break;
            }
            if (c > m) {
                rho /= 2;
                continue;
            }
        }
        rho *= 1.37;
        if (rho > 3.0 * diag) break;
    }
    if (certified == 0) {
        ZeroRecord rec = cluster_record(b, m);
        rec.position = z;
        return rec;
    }
    ZeroRecord rec;
    rec.position = z;
    rec.multiplicity = static_cast<int>(m);
    rec.kind = ZeroRecord::Kind::value;
    rec.certification_radius = certified;
    rec.residual = std::abs(f.eval(z).value - a);
    return rec;
}

// splits a box into four children whose edge windings stabilize and whose
// counts rebalance exactly; falls back to a flagged cluster when they cannot
void process_box(const MeromorphicOracle& f, Complex a, const Box& b,
                 const std::vector<PolePoint>& poles, const CountOptions& opt,
                 double floor_diag, std::vector<Box>& children, std::vector<ZeroRecord>& recs) {
    if (b.count <= 0) return;
    if (box_diag(b) <= floor_diag) {
        recs.push_back(polish_leaf(f, a, b, b.count, opt));
        return;
    }
    if (b.count == 1) {
        // a simple solution can be polished straight from the box center;
        // subdivision continues only when the isolating circle fails or the
        // iteration drifts into a sibling box
        ZeroRecord rec = polish_leaf(f, a, b, 1, opt);
        bool inside = rec.position.real() > b.x0 && rec.position.real() < b.x1 &&
                      rec.position.imag() > b.y0 && rec.position.imag() < b.y1;
        if (!rec.merged_cluster && inside) {
            recs.push_back(rec);
            return;
        }
    }
    static const double fracs[] = {0.5, 0.4629, 0.5371, 0.4123, 0.5877};
    auto rank_lines = [&](bool vertical) {
        std::vector<std::pair<double, double>> scored;
        for (double q : fracs) {
            Complex s0, s1;
            double c;
            if (vertical) {
                c = b.x0 + q * (b.x1 - b.x0);
                s0 = {c, b.y0};
                s1 = {c, b.y1};
            } else {
                c = b.y0 + q * (b.y1 - b.y0);
                s0 = {b.x0, c};
                s1 = {b.x1, c};
            }
            scored.push_back({line_score(f, a, s0, s1, poles), c});
        }
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& u, const auto& v) { return u.first > v.first; });
        return scored;
    };
    auto xs = rank_lines(true), ys = rank_lines(false);
    for (int attempt = 0; attempt < 3; ++attempt) {
        double xm = xs[std::min<size_t>(attempt, xs.size() - 1)].second;
        double ym = ys[std::min<size_t>(attempt, ys.size() - 1)].second;
        Box q[4] = {{b.x0, b.y0, xm, ym}, {xm, b.y0, b.x1, ym},
                    {b.x0, ym, xm, b.y1}, {xm, ym, b.x1, b.y1}};
        long sum = 0;
        bool ok = true;
        for (auto& c : q) {
            BoxCount bc = box_count(f, a, c, poles, opt);
            if (!bc.ok) {
                ok = false;
                break;
            }
            c.count = bc.count;
            sum += bc.count;
        }
        if (ok && sum == b.count) {
            for (auto& c : q)
                if (c.count > 0) children.push_back(c);
            return;
        }
    }
    recs.push_back(cluster_record(b, b.count));
}

double records_integral(const std::vector<ZeroRecord>& recs, double u) {
    double thresh = 1e-9 * std::max(1.0, u);
    double acc = 0;
    for (const auto& rec : recs) {
        double m = std::abs(rec.position);
        if (m > u) continue;
        acc += rec.multiplicity * (m <= thresh ? std::log(u) : std::log(u / m));
    }
    return acc;
}

long records_count(const std::vector<ZeroRecord>& recs, double u) {
    long n = 0;
    for (const auto& rec : recs)
        if (std::abs(rec.position) <= u) n += rec.multiplicity;
    return n;
}

} // namespace

std::vector<PolePoint> resolve_poles(const MeromorphicOracle& f, double radius,
                                     const CountOptions& opt) {
    std::vector<PolePoint> out;
    for (const auto& p : f.declared_poles())
        if (std::abs(p.position) <= radius) out.push_back(p);
    for (const auto& src : f.pole_sources()) {
        for (const auto& p : source_zeros(src, radius, opt)) out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](const PolePoint& u, const PolePoint& v) {
        if (u.position.real() != v.position.real()) return u.position.real() < v.position.real();
        return u.position.imag() < v.position.imag();
    });
    // coincident contributions (declared plus source-located) merge additively
    std::vector<PolePoint> merged;
    for (const auto& p : out) {
        if (!merged.empty() &&
            std::abs(merged.back().position - p.position) < 1e-12 * (1.0 + std::abs(p.position)))
            merged.back().multiplicity += p.multiplicity;
        else
            merged.push_back(p);
    }
    return merged;
}

CountResult count_in_disk(const MeromorphicOracle& f, double r, Target a,
                          const CountOptions& opt) {
    if (!(r > 0) || !std::isfinite(r)) throw precondition_error("count_in_disk: r must be positive");
    double reach = perturbed_radius(r, opt.max_retreats) + 1e-12;
    std::vector<PolePoint> poles = resolve_poles(f, reach, opt);
    std::vector<double> pole_mods = moduli_of(poles);

    if (a.is_pole) {
        RadiusChoice rc = pick_radius(f, nullptr, r, pole_mods, {}, opt, 0);
        CountResult res;
        res.count = poles_within(poles, rc.r);
        res.pole_count = res.count;
        res.certified = true;
        res.used_radius = rc.r;
        res.winding = 0;
        res.note = "geometric pole count";
        if (rc.k > 0) res.note += ", boundary perturbed k=" + std::to_string(rc.k);
        return res;
    }

    std::vector<double> zero_mods = near_boundary_moduli(f, a.a, r);
    WindingOptions wopt = opt.winding;
    wopt.threads = std::max(1, opt.threads);
    int k = 0;
    std::string trail;
    while (true) {
        RadiusChoice rc = pick_radius(f, &a.a, r, pole_mods, zero_mods, opt, k);
        WindingResult w = winding_circle(f, a.a, {0, 0}, rc.r, wopt);
        long P = poles_within(poles, rc.r);
        if (w.stabilized) {
            long Z = std::lround(w.winding) + P;
            if (Z >= 0) {
                CountResult res;
                res.count = Z;
                res.pole_count = P;
                res.certified = true;
                res.used_radius = rc.r;
                res.winding = w.winding;
                if (rc.k > 0) res.note = "boundary perturbed k=" + std::to_string(rc.k);
                return res;
            }
            trail = "negative count " + std::to_string(Z) + " at r=" + fmt_sig(rc.r);
        } else {
            trail = "winding unstable at r=" + fmt_sig(rc.r) +
                    " (min gauge " + fmt_sig(w.min_gauge) + ")";
        }
        k = rc.k + 1;
        if (opt.fixed_radius || k > opt.max_retreats)
            throw convergence_error("count_in_disk failed for '" + f.label() + "': " + trail);
    }
}

LocateResult locate_values(const MeromorphicOracle& f, double r, Target a,
                           const CountOptions& opt) {
    CountResult total = count_in_disk(f, r, a, opt);
    LocateResult out;
    out.used_radius = total.used_radius;
    out.total = total.count;
    double u = total.used_radius;

    if (a.is_pole) {
        std::vector<PolePoint> poles = resolve_poles(f, u, opt);
        WindingOptions wopt = opt.winding;
        wopt.threads = std::max(1, opt.threads);
        for (const auto& p : poles) {
            ZeroRecord rec;
            rec.position = p.position;
            rec.multiplicity = p.multiplicity;
            rec.kind = ZeroRecord::Kind::pole;
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& q : poles)
                if (&q != &p) nearest = std::min(nearest, std::abs(q.position - p.position));
            double rho = std::min(0.1 * (1.0 + std::abs(p.position)), 0.45 * nearest);
            rho = std::max(rho, 1e-9);
            rec.merged_cluster = true;
            for (int t = 0; t < 6; ++t, rho /= 1.9) {
                WindingResult w;
                try {
                    w = winding_circle(f, {0, 0}, p.position, rho, wopt);
                } catch (const std::exception&) {
                    continue;
                }
                if (w.stabilized && std::lround(w.winding) == -p.multiplicity) {
                    rec.certification_radius = rho;
                    rec.merged_cluster = false;
                    break;
                }
            }
            double av = std::abs(f.eval(p.position).value);
            rec.residual = std::isfinite(av) && av > 0 ? 1.0 / av : 0.0;
            out.records.push_back(rec);
        }
        return out;
    }

    if (total.count == 0) return out;

    double pad = std::max(1e-3, 1e-4 * u);
    std::vector<PolePoint> box_poles;
    Box top{};
    bool have_top = false;
    for (int t = 0; t < 8 && !have_top; ++t) {
        double Rq = u + pad * (1.0 + 0.61 * t);
        if (Rq * 1.41422 > f.validity_radius())
            throw domain_error("locate_values for '" + f.label() + "' needs validity radius >= " +
                               fmt_sig(Rq * 1.41422) + " to sweep the enclosing square");
        box_poles = resolve_poles(f, Rq * 1.41422 + 1e-9, opt);
        Box cand{-Rq, -Rq, Rq, Rq};
        bool edge_clear = true;
        for (const auto& p : box_poles) {
            double d = std::min(std::min(std::abs(p.position.real() - cand.x0),
                                         std::abs(p.position.real() - cand.x1)),
                                std::min(std::abs(p.position.imag() - cand.y0),
                                         std::abs(p.position.imag() - cand.y1)));
            if (d < 1e-7 * std::max(1.0, Rq)) edge_clear = false;
        }
        if (!edge_clear) continue;
        CountOptions wide = opt;
        wide.winding.threads = std::max(1, opt.threads);
        BoxCount bc = box_count(f, a.a, cand, box_poles, wide);
        if (bc.ok && bc.count >= total.count) {
            top = cand;
            top.count = bc.count;
            have_top = true;
        }
    }
    if (!have_top)
        throw convergence_error("locate_values: enclosing square winding would not stabilize for '" +
                                f.label() + "'");

    double floor_diag = opt.box_floor * std::max(1.0, u);
    std::vector<Box> frontier{top};
    std::vector<ZeroRecord> recs;
    while (!frontier.empty()) {
        std::vector<std::vector<Box>> child_slots(frontier.size());
        std::vector<std::vector<ZeroRecord>> rec_slots(frontier.size());
        // split the worker budget: across boxes while the frontier is wide,
        // across panel nodes inside each winding while it is narrow
        CountOptions level = opt;
        level.winding.threads = std::max(
            1, opt.threads / static_cast<int>(std::max<std::size_t>(1, frontier.size())));
        parallel_for(frontier.size(), opt.threads, [&](std::size_t i) {
            process_box(f, a.a, frontier[i], box_poles, level, floor_diag, child_slots[i],
                        rec_slots[i]);
        });
        std::vector<Box> next;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            next.insert(next.end(), child_slots[i].begin(), child_slots[i].end());
            recs.insert(recs.end(), rec_slots[i].begin(), rec_slots[i].end());
        }
        frontier = std::move(next);
    }

    long kept = 0;
    for (const auto& rec : recs) {
        if (std::abs(rec.position) > u) continue;
        out.records.push_back(rec);
        kept += rec.multiplicity;
    }
    if (kept != total.count)
        throw convergence_error("locate_values: subdivision kept " + std::to_string(kept) +
                                " of " + std::to_string(total.count) + " solutions for '" +
                                f.label() + "'");
    std::sort(out.records.begin(), out.records.end(), [](const ZeroRecord& x, const ZeroRecord& y) {
        if (x.position.real() != y.position.real()) return x.position.real() < y.position.real();
        return x.position.imag() < y.position.imag();
    });
    // shrink certification circles pairwise so they are disjoint
    for (std::size_t i = 0; i < out.records.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < out.records.size(); ++j)
            if (j != i)
                nearest = std::min(nearest,
                                   std::abs(out.records[i].position - out.records[j].position));
        if (std::isfinite(nearest) && !out.records[i].merged_cluster)
            out.records[i].certification_radius =
                std::min(out.records[i].certification_radius, 0.45 * nearest);
    }
    return out;
}

IntegratedCount integrated_count(const MeromorphicOracle& f, double r, Target a,
                                 const CountOptions& opt) {
    return integrated_count(locate_values(f, r, a, opt));
}

IntegratedCount integrated_count(const LocateResult& loc) {
    double u = loc.used_radius;
    if (!(u > 0)) throw precondition_error("integrated_count: records carry no radius");
    double thresh = 1e-9 * std::max(1.0, u);
    IntegratedCount out;
    out.used_radius = u;
    out.sum_form = records_integral(loc.records, u);

    long n0 = 0;
    std::vector<std::pair<double, int>> jumps;
    for (const auto& rec : loc.records) {
        double m = std::abs(rec.position);
        if (m <= thresh)
            n0 += rec.multiplicity;
        else
            jumps.push_back({m, rec.multiplicity});
    }
    std::sort(jumps.begin(), jumps.end());
    double base = n0 > 0 ? n0 * std::log(u) : 0.0;
    if (jumps.empty()) {
        out.grid_form = base;
    } else {
        double tmin = jumps.front().first * (1.0 - 1e-12);
        const int M = 4096;
        double h = (u - tmin) / M;
        auto step_n = [&](double t) {
            long n = 0;
            for (const auto& j : jumps) {
                if (j.first <= t)
                    n += j.second;
                else
                    break;
            }
            return n;
        };
        double acc = 0;
        double prev = step_n(tmin) / tmin;
        for (int i = 1; i <= M; ++i) {
            double t = tmin + h * i;
            double cur = step_n(t) / t;
            acc += 0.5 * (prev + cur) * h;
            prev = cur;
        }
        out.grid_form = base + acc;
    }
    out.discrepancy = std::abs(out.sum_form - out.grid_form);
    return out;
}

namespace {

// joint contour for the identity checks: clear of poles geometrically and of
// zeros through the circle gauge plus located near-boundary moduli
double joint_radius(const MeromorphicOracle& f, double R, const CountOptions& opt,
                    std::vector<PolePoint>& poles_out) {
    double reach = perturbed_radius(R, opt.max_retreats) + 1e-12;
    poles_out = resolve_poles(f, reach, opt);
    std::vector<double> pole_mods = moduli_of(poles_out);
    std::vector<double> zero_mods = near_boundary_moduli(f, {0, 0}, R);
    Complex zero{0, 0};
    RadiusChoice rc = pick_radius(f, &zero, R, pole_mods, zero_mods, opt, 0);
    return rc.r;
}

} // namespace

double jensen_residual(const MeromorphicOracle& f, double R, double quad_tol,
                       const CountOptions& opt) {
    std::vector<PolePoint> poles;
    double Rp = joint_radius(f, R, opt, poles);
    CountOptions fixed = opt;
    fixed.fixed_radius = true;
    LocateResult lz = locate_values(f, Rp, Target::value({0, 0}), fixed);

    double thresh = 1e-9 * std::max(1.0, Rp);
    long n0z = 0, n0p = 0;
    double min_mod = Rp;
    for (const auto& rec : lz.records) {
        double m = std::abs(rec.position);
        if (m <= thresh)
            n0z += rec.multiplicity;
        else
            min_mod = std::min(min_mod, m);
    }
    std::vector<PolePoint> poles_in;
    for (const auto& p : poles) {
        if (std::abs(p.position) > Rp) continue;
        poles_in.push_back(p);
        double m = std::abs(p.position);
        if (m <= thresh)
            n0p += p.multiplicity;
        else
            min_mod = std::min(min_mod, m);
    }

    long m_net = n0z - n0p;
    double lhs;
    if (m_net == 0) {
        double f0 = std::abs(f.eval({0, 0}).value);
        if (!std::isfinite(f0) || f0 <= 0)
            throw precondition_error("jensen_residual: f(0) is zero or infinite yet no origin "
                                     "factor was resolved");
        lhs = std::log(f0);
    } else {
        double rho0 = std::min(0.45 * min_mod, 0.5 * Rp);
        Complex c = cauchy_coefficient(f, static_cast<int>(m_net), rho0, 1e-11,
                                       std::max(1, opt.threads));
        if (!(std::abs(c) > 0))
            throw convergence_error("jensen_residual: leading coefficient came out zero");
        lhs = std::log(std::abs(c)) + double(m_net) * std::log(Rp);
    }

    double rhs = boundary_log_average(f, {0, 0}, {0, 0}, Rp, quad_tol, std::max(1, opt.threads));
    for (const auto& rec : lz.records) {
        double m = std::abs(rec.position);
        if (m > thresh) rhs += rec.multiplicity * std::log(m / Rp);
    }
    for (const auto& p : poles_in) {
        double m = std::abs(p.position);
        if (m > thresh) rhs -= p.multiplicity * std::log(m / Rp);
    }
    return std::abs(lhs - rhs);
}

double poisson_jensen_residual(const MeromorphicOracle& f, Complex s, double R,
                               double quad_tol, const CountOptions& opt) {
    std::vector<PolePoint> poles;
    double Rp = joint_radius(f, R, opt, poles);
    if (std::abs(s) >= 0.9 * Rp)
        throw precondition_error("poisson_jensen_residual: s must satisfy |s| < 0.9 R");
    CountOptions fixed = opt;
    fixed.fixed_radius = true;
    LocateResult lz = locate_values(f, Rp, Target::value({0, 0}), fixed);

    double fs = std::abs(f.eval(s).value);
    if (!std::isfinite(fs) || fs <= 0)
        throw precondition_error("poisson_jensen_residual: f(s) is zero or infinite at the probe");
    for (const auto& rec : lz.records)
        if (std::abs(rec.position - s) < 1e-9 * (1.0 + std::abs(s)))
            throw precondition_error("poisson_jensen_residual: probe coincides with a zero");

    auto blaschke = [Rp, s](Complex w) {
        return std::log(std::abs(Rp * (s - w) / (Rp * Rp - std::conj(w) * s)));
    };
    double recon = poisson_log_average(f, s, Rp, quad_tol, std::max(1, opt.threads));
    for (const auto& rec : lz.records) recon += rec.multiplicity * blaschke(rec.position);
    for (const auto& p : poles)
        if (std::abs(p.position) <= Rp) recon -= p.multiplicity * blaschke(p.position);
    return std::abs(std::log(fs) - recon);
}

CountingTable counting_table(const MeromorphicOracle& f, const std::vector<double>& grid,
                             Complex a, int threads, const CountOptions& opt) {
    if (grid.empty()) throw precondition_error("counting_table: empty radius grid");
    for (double r : grid)
        if (!(r > 0) || !std::isfinite(r))
            throw precondition_error("counting_table: radii must be positive, got " + fmt_sig(r));
    double rmax = *std::max_element(grid.begin(), grid.end());

    CountOptions lopt = opt;
    lopt.threads = std::max(1, threads);
    LocateResult lz = locate_values(f, rmax, Target::value(a), lopt);
    LocateResult lp = locate_values(f, rmax, Target::poles(), lopt);

    CountingTable table;
    table.target_value = a;
    table.rows.resize(grid.size());
    std::vector<std::string> notes(grid.size());
    CountOptions row_opt = opt;
    row_opt.threads = 1;
    parallel_for(grid.size(), std::max(1, threads), [&](std::size_t i) {
        double r = grid[i];
        CountResult cz = count_in_disk(f, r, Target::value(a), row_opt);
        CountResult cp = count_in_disk(f, r, Target::poles(), row_opt);
        long nz = records_count(lz.records, cz.used_radius);
        long np = records_count(lp.records, cp.used_radius);
        if (nz != cz.count)
            throw convergence_error("counting_table: winding count " + std::to_string(cz.count) +
                                    " disagrees with located records " + std::to_string(nz) +
                                    " at r=" + fmt_sig(r));
        if (np != cp.count)
            throw convergence_error("counting_table: pole count mismatch at r=" + fmt_sig(r));
        CountingRow row;
        row.r = r;
        row.n_zero = cz.count;
        row.n_pole = cp.count;
        row.N_zero = records_integral(lz.records, cz.used_radius);
        row.N_pole = records_integral(lp.records, cp.used_radius);
        row.ratio = double(cz.count + cp.count) / r;
        table.rows[i] = row;
        if (!cz.note.empty()) notes[i] = "r=" + fmt_sig(r) + ": " + cz.note;
    });
    std::string joined;
    for (const auto& n : notes)
        if (!n.empty()) joined += (joined.empty() ? "" : "; ") + n;
    table.note = joined;
    table.zeros = std::move(lz);
    table.poles = std::move(lp);
    return table;
}

std::string to_csv(const CountingTable& table) {
    std::ostringstream os;
    os << "r,n_zero,n_pole,N_zero,N_pole,ratio\n";
    for (const auto& row : table.rows) {
        os << fmt_sig(row.r) << ',' << row.n_zero << ',' << row.n_pole << ','
           << fmt_sig(row.N_zero) << ',' << fmt_sig(row.N_pole) << ',' << fmt_sig(row.ratio)
           << '\n';
    }
    return os.str();
}

} // namespace dseries
