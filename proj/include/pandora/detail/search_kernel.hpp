#pragma once

// Allocation-free variant of the exact search recursion for small box sets.
// Used by the brute-force adversary, which evaluates many tiny candidate sets.

#include "pandora/contracts.hpp"
#include "pandora/domain.hpp"

#include <span>
#include <vector>

namespace pandora::detail {

struct Prize {
    double y = 0.0;
    double uw = 0.0; ///< u(w(y))
    double pi = 0.0; ///< y - w(y)
};

struct PreparedBox {
    std::vector<Prize> atoms;
    std::vector<double> probs;
    double cost = 0.0;
    double index = 0.0;
};

PreparedBox prepare_box(const Contract& w, const Project& p, const UtilityFn& u);

/// Principal value of the agent-optimal, principal-favored search; agrees with
/// evaluate_exact on the same inputs. At most 4 boxes.
double principal_value(std::span<const PreparedBox* const> boxes, const Prize& outside);

} // namespace pandora::detail
