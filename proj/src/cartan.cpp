#include "dseries/cartan.hpp"

#include <algorithm>
#include <cmath>

namespace dseries {
namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

bool lex_less(Complex u, Complex v) {
    if (u.real() != v.real()) return u.real() < v.real();
    return u.imag() < v.imag();
}

} // namespace

DiskCover cartan_cover(const std::vector<Complex>& points, double h) {
    if (!(h > 0)) throw precondition_error("cartan_cover: h must be positive");
    DiskCover cover;
    cover.h = h;
    cover.n_points = points.size();
    if (points.empty()) return cover;

    double rho = h / double(points.size());
    std::vector<Complex> rest = points;
    std::sort(rest.begin(), rest.end(), lex_less);

    while (!rest.empty()) {
        std::size_t n = rest.size();
        bool emitted = false;
        for (std::size_t p = n; p >= 1 && !emitted; --p) {
            double rad = double(p) * rho;
            for (const Complex& c : rest) {
                std::size_t inside = 0;
                for (const Complex& q : rest)
                    if (std::abs(q - c) <= rad) ++inside;
                if (inside < p) continue;
                // maximality of p forces exactly p points, else the disk
                // would already have served the previous larger p
                if (inside != p)
                    throw convergence_error("cartan_cover: maximal cluster of " +
                                            std::to_string(p) + " held " +
                                            std::to_string(inside) + " points");
                cover.disks.push_back({c, 2.0 * rad});
                std::vector<Complex> keep;
                keep.reserve(rest.size() - p);
                for (const Complex& q : rest)
                    if (std::abs(q - c) > rad) keep.push_back(q);
                rest = std::move(keep);
                emitted = true;
                break;
            }
        }
        if (!emitted)
            throw convergence_error("cartan_cover: no cluster found (unreachable for p=1)");
    }
    return cover;
}

double cartan_product(const std::vector<Complex>& points, Complex s) {
    double acc = 1.0;
    for (const Complex& a : points) acc *= std::abs(s - a);
    return acc;
}

Complex select_annulus_point(const std::vector<DiskCover>& covers, double R1) {
    if (!(R1 > 0)) throw precondition_error("select_annulus_point: R1 must be positive");
    double r_lo = R1 / 16.0, r_hi = R1 / 4.0;
    for (int level = 0; level < 7; ++level) {
        int nr = 16 << level, na = 64 << level;
        for (int i = 0; i < nr; ++i) {
            double r = r_lo + (i + 0.5) * (r_hi - r_lo) / nr;
            for (int j = 0; j < na; ++j) {
                double th = kTwoPi * (j + 0.31) / na;
                Complex s = std::polar(r, th);
                bool outside = true;
                for (const DiskCover& cover : covers) {
                    for (const DiskRegion& d : cover.disks) {
                        if (std::abs(s - d.center) <= d.radius * (1.0 + 1e-12) + 1e-12) {
                            outside = false;
                            break;
                        }
                    }
                    if (!outside) break;
                }
                if (outside) return s;
            }
        }
    }
    throw convergence_error("select_annulus_point: polar scan exhausted, annulus fully covered");
}

} // namespace dseries
