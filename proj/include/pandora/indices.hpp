#pragma once

#include "pandora/contracts.hpp"
#include "pandora/domain.hpp"

#include <span>

namespace pandora {

struct IndexResult {
    double value = 0.0;
    /// false only for free boxes, whose root set is a ray.
    bool unique = true;
    bool never_sample = false;
};

/// Smallest r with sum_i p_i (v_i - r)^+ = cost. Values need not be sorted.
IndexResult smallest_root(std::span<const double> values, std::span<const double> probs, double cost);

/// Reservation value of a box.
IndexResult index(const Project& p);

/// Index of the box as seen by an agent paid w and valuing money by u.
IndexResult induced_index(const Contract& w, const Project& p, const UtilityFn& u = UtilityFn::identity());

} // namespace pandora
