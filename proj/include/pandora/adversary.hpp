#pragma once

#include "pandora/contracts.hpp"
#include "pandora/domain.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace pandora {

struct SafeInfimum {
    /// +inf when no safe project crowds out the known one.
    double value = 0.0;
    bool attained = false;
    /// Where the infimum is reached, or the point it is approached from above.
    double x = 0.0;
};

/**
 * inf { x - w(x) : u(w(x)) > induced index of box0 } over x >= 0.
 *
 * A zero-cost sure prize x in that set is opened and kept by the agent, so the
 * principal ends with x - w(x). Solved segment by segment.
 */
SafeInfimum safe_project_infimum(const Contract& w, const Project& box0, const UtilityFn& u = UtilityFn::identity());

struct GuaranteeReport {
    enum class Witness { known_only, safe_project, grid_set };

    double value = 0.0;
    bool attained = true;
    Witness witness = Witness::known_only;
    /// Prize of the safe project when witness == safe_project.
    double witness_x = 0.0;
    /// Extra boxes of the brute-force argmin (limit prizes shown at their base point).
    std::vector<Project> extra_boxes;
    /// Set when the value is an infimum that no project set attains.
    std::string epsilon_note;
    std::size_t sets_evaluated = 0;
};

std::string to_string(GuaranteeReport::Witness w);

/// Worst case over project sets for doubly monotone w. Throws NotDoublyMonotone.
GuaranteeReport guarantee(const Contract& w, const Project& box0, const UtilityFn& u = UtilityFn::identity());

/**
 * Adversary family searched by brute_force_guarantee.
 *
 * Empty prize or cost lists select the defaults derived from w and box0.
 * A limit prize b+ is evaluated at b + d for d = offset, offset/2, offset/4
 * and extrapolated to d = 0 when the three values are collinear.
 */
struct AdversaryGrid {
    std::size_t max_extra = 2;
    std::vector<double> prizes;
    std::vector<double> limit_prizes;
    std::vector<double> costs;
    std::vector<double> probs{0.5};
    std::size_t max_support = 2;
    bool include_limits = true;
    double offset = 1e-6;
    /// Pair every candidate box with every other; by default the second box is a sure prize.
    bool full_pairs = false;
};

/// Fills empty prize, limit and cost lists with the defaults for (w, box0, u).
AdversaryGrid default_grid(const Contract& w, const Project& box0, const UtilityFn& u, AdversaryGrid base = {});

/// Minimum principal value over {box0} plus up to max_extra boxes from the grid.
GuaranteeReport brute_force_guarantee(const Contract& w, const Project& box0, const UtilityFn& u = UtilityFn::identity(),
                                      const AdversaryGrid& grid = {});

} // namespace pandora
