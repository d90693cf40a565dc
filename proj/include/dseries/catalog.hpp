#pragma once

#include "dseries/exponential_sum.hpp"
#include "dseries/oracle.hpp"

#include <functional>
#include <optional>

namespace dseries {

struct CatalogEntry {
    std::string name;
    enum class Role { positive, negative_control, counterexample_pair, showcase, metadata_only };
    Role role = Role::positive;

    std::function<MeromorphicOracle()> make; // null for metadata-only entries

    // closed-form lattices within |s| <= r, when the function has them;
    // generators throw past their supported radius (zeta: reference table)
    std::function<std::vector<PolePoint>(double)> zeros_within;
    std::function<std::vector<PolePoint>(double)> poles_within;

    // streaming enumeration of zero+pole moduli up to a large radius, for
    // tail-integral convergence checks without materializing the lattice
    std::function<void(double, const std::function<void(double, int)>&)> stream_moduli;

    double declared_order = 1.0;
    bool flag_nonzero_limit = true;
    bool flag_finite_order = true;
    bool flag_nontrivial = true;

    std::optional<ExponentialSum> series;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& name);

// ordinates of the first zeta zeros off the real axis, |t| ascending
const std::vector<double>& zeta_nontrivial_ordinates();

} // namespace dseries
