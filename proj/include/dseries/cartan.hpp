#pragma once

#include "dseries/types.hpp"

#include <vector>

namespace dseries {

struct DiskCover {
    std::vector<DiskRegion> disks;
    double h = 0;
    std::size_t n_points = 0;
};

// Exclusion disks with Sum radii = 2h: repeatedly take the largest p such
// that some disk of radius p(h/n) centered at one of the remaining points
// contains >= p of them (maximality forces exactly p), emit it with doubled
// radius, remove the covered points. Ties break on the lexicographically
// smallest center. Outside the union, Pi |s - a_k| > (h/e)^n.
DiskCover cartan_cover(const std::vector<Complex>& points, double h);

// Pi |s - a_k| over the input points of a cover's construction.
double cartan_product(const std::vector<Complex>& points, Complex s);

// Point in the annulus R1/16 <= |s| <= R1/4 outside every disk of every
// cover, by a radius-major coarse-to-fine polar scan.
Complex select_annulus_point(const std::vector<DiskCover>& covers, double R1);

} // namespace dseries
