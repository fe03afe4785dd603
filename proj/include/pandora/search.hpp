#pragma once

#include "pandora/contracts.hpp"
#include "pandora/domain.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace pandora {

/// Exactness budget of evaluate_exact.
inline constexpr std::size_t kMaxBoxes = 12;
inline constexpr std::size_t kMaxSupport = 32;

struct PayoffReport {
    double principal = 0.0;
    /// In utils when the agent is risk averse.
    double agent = 0.0;
    double surplus = 0.0;
    /// Law of the prize the agent finally presents.
    Distribution presented_dist = dirac(0.0);
};

/**
 * Agent-optimal search under w with ties broken in the principal's favor.
 *
 * Solves the full dynamic program over (opened set, presented prize), so the
 * result is exact for any contract, including those with jumps. The outside
 * option is a zero prize paid w(0). Throws BudgetExceeded beyond kMaxBoxes
 * boxes or kMaxSupport atoms per box.
 */
PayoffReport evaluate_exact(const Contract& w, const std::vector<Project>& boxes,
                            const UtilityFn& u = UtilityFn::identity());

/// Optimal expected surplus of a planner who owns the prizes and pays the costs.
double planner_value(const std::vector<Project>& boxes);

struct SimulationEstimate {
    double principal_mean = 0.0;
    double principal_std_error = 0.0;
    double agent_mean = 0.0;
    double agent_std_error = 0.0;
    std::uint64_t episodes = 0;
};

/**
 * Monte Carlo replay of the policy chosen by evaluate_exact.
 *
 * Each episode draws from its own generator seeded by (seed, episode), and
 * partial sums are reduced in a fixed block order, so the estimate does not
 * depend on the number of worker threads.
 */
SimulationEstimate simulate(const Contract& w, const std::vector<Project>& boxes, const UtilityFn& u,
                            std::uint64_t seed, std::uint64_t n_episodes, unsigned workers = 0);

/**
 * Single box that may be redrawn any number of times at its cost.
 *
 * The agent stops at the first draw whose wage clears the induced index;
 * draws exactly at the index are stopping points only when that helps the
 * principal. Throws NeverStops when no draw ever ends the search.
 */
PayoffReport evaluate_resampling(const Contract& w, const Project& box0);

} // namespace pandora
