#pragma once

#include "pandora/domain.hpp"

namespace fixture {

/// Coin-flip box paying 0 or 100 at cost 10: r0 = 80, s0 = 40.
inline pandora::Project a0(double cost = 10.0) {
    return pandora::Project(pandora::make_distribution({{0.0, 0.5}, {100.0, 0.5}}), cost);
}

inline pandora::Project second_agent() {
    return pandora::Project(pandora::make_distribution({{0.0, 0.5}, {60.0, 0.5}}), 6.0);
}

} // namespace fixture
