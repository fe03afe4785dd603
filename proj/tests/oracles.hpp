#pragma once

// Independent reference implementations used only by the tests.

#include "pandora/contracts.hpp"
#include "pandora/domain.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace oracle {

/// Smallest root of sum p (v - r)^+ = cost by bisection.
inline double bisect_index(const std::vector<double>& v, const std::vector<double>& p, double cost, double tol = 1e-12) {
    auto g = [&](double r) {
        double e = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) e += p[i] * std::max(0.0, v[i] - r);
        return e - cost;
    };
    const double top = *std::max_element(v.begin(), v.end());
    const double bottom = *std::min_element(v.begin(), v.end());
    double lo = bottom - cost - 1.0;
    double hi = top;
    if (cost == 0.0) return top;
    while (hi - lo > tol * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
        if (mid == lo && mid == hi) break;
    }
    return 0.5 * (lo + hi);
}

inline double bisect_index(const pandora::Project& p) {
    return bisect_index({p.dist.support().begin(), p.dist.support().end()}, {p.dist.probs().begin(), p.dist.probs().end()},
                        p.cost);
}

/**
 * Search value by backward induction over full histories.
 *
 * Every unopened box may be opened at every history (no index pruning) and
 * the agent presents the best observed prize. Returns (agent, principal).
 */
class HistorySearch {
public:
    HistorySearch(const pandora::Contract& w, const std::vector<pandora::Project>& boxes,
                  const pandora::UtilityFn& u = pandora::UtilityFn::identity())
        : w_(w), boxes_(boxes), u_(u) {
        double scale = std::max(1.0, std::abs(u_.apply(w_(0.0))));
        for (const auto& b : boxes_)
            for (double y : b.dist.support()) scale = std::max({scale, y, std::abs(u_.apply(w_(y)))});
        tol_ = 1e-12 * scale;
    }

    std::pair<double, double> value() const {
        std::vector<double> seen;
        return solve(std::vector<bool>(boxes_.size(), false), seen);
    }

private:
    std::pair<double, double> present(const std::vector<double>& seen) const {
        // Prize 0 is always available.
        double best_y = 0.0;
        double best_u = u_.apply(w_(0.0));
        double best_pi = -w_(0.0);
        for (double y : seen) {
            const double uy = u_.apply(w_(y));
            const double py = y - w_(y);
            const bool better = uy > best_u + tol_ ||
                                (uy >= best_u - tol_ && (py > best_pi || (py == best_pi && y > best_y)));
            if (better) {
                best_y = y;
                best_u = uy;
                best_pi = py;
            }
        }
        return {best_u, best_pi};
    }

    std::pair<double, double> solve(std::vector<bool> opened, std::vector<double>& seen) const {
        std::vector<std::pair<double, double>> options{present(seen)};
        for (std::size_t i = 0; i < boxes_.size(); ++i) {
            if (opened[i]) continue;
            opened[i] = true;
            double a = -boxes_[i].cost;
            double p = 0.0;
            const auto ys = boxes_[i].dist.support();
            const auto ps = boxes_[i].dist.probs();
            for (std::size_t k = 0; k < ys.size(); ++k) {
                seen.push_back(ys[k]);
                const auto [ca, cp] = solve(opened, seen);
                seen.pop_back();
                a += ps[k] * ca;
                p += ps[k] * cp;
            }
            opened[i] = false;
            options.emplace_back(a, p);
        }
        double best = options[0].first;
        for (const auto& o : options) best = std::max(best, o.first);
        std::pair<double, double> pick{0.0, -1e300};
        for (const auto& o : options)
            if (o.first >= best - tol_ && o.second > pick.second + tol_) pick = o;
        return pick;
    }

    const pandora::Contract& w_;
    const std::vector<pandora::Project>& boxes_;
    const pandora::UtilityFn& u_;
    double tol_;
};

/// Safe-project infimum by dense sampling of x - w(x) over {u(w(x)) > r}; an upper bound.
inline double sampled_safe_infimum(const pandora::Contract& w, double r, const pandora::UtilityFn& u, double x_max,
                                   int n = 200000) {
    double best = 1e300;
    for (int i = 0; i <= n; ++i) {
        const double x = x_max * i / n;
        if (u.apply(w(x)) > r) best = std::min(best, x - w(x));
    }
    return best;
}

} // namespace oracle
