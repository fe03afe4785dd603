#include "pandora/detail/search_kernel.hpp"

#include "pandora/error.hpp"
#include "pandora/indices.hpp"

#include <algorithm>
#include <cmath>

namespace pandora::detail {

namespace {

struct Kernel {
    std::span<const PreparedBox* const> boxes;
    double tol;

    const Prize& better(const Prize& cur, const Prize& drawn) const {
        if (drawn.uw > cur.uw + tol) return drawn;
        if (drawn.uw < cur.uw - tol) return cur;
        if (drawn.pi != cur.pi) return drawn.pi > cur.pi ? drawn : cur;
        return drawn.y > cur.y ? drawn : cur;
    }

    /// Returns (agent, principal) at the state.
    std::pair<double, double> solve(unsigned mask, const Prize& cur) const {
        constexpr std::size_t kMax = 5;
        double av[kMax];
        double pv[kMax];
        std::size_t count = 0;
        av[count] = cur.uw;
        pv[count++] = cur.pi;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            const unsigned bit = 1u << i;
            const PreparedBox& b = *boxes[i];
            if ((mask & bit) || b.index < cur.uw - tol) continue;
            double a = -b.cost;
            double p = 0.0;
            for (std::size_t k = 0; k < b.atoms.size(); ++k) {
                const auto [ca, cp] = solve(mask | bit, better(cur, b.atoms[k]));
                a += b.probs[k] * ca;
                p += b.probs[k] * cp;
            }
            av[count] = a;
            pv[count++] = p;
        }
        double best = av[0];
        for (std::size_t k = 1; k < count; ++k) best = std::max(best, av[k]);
        std::size_t pick = count;
        for (std::size_t k = 0; k < count; ++k) {
            if (av[k] < best - tol) continue;
            if (pick == count || pv[k] > pv[pick] + tol) pick = k;
        }
        return {av[pick], pv[pick]};
    }
};

} // namespace

PreparedBox prepare_box(const Contract& w, const Project& p, const UtilityFn& u) {
    PreparedBox b;
    const auto ys = p.dist.support();
    b.probs.assign(p.dist.probs().begin(), p.dist.probs().end());
    for (double y : ys) {
        const double wy = w(y);
        b.atoms.push_back(Prize{y, u.apply(wy), y - wy});
    }
    b.cost = p.cost;
    b.index = induced_index(w, p, u).value;
    return b;
}

double principal_value(std::span<const PreparedBox* const> boxes, const Prize& outside) {
    if (boxes.size() > 4) throw Error(ErrorCode::BudgetExceeded, "search kernel handles at most 4 boxes");
    // Same scale-relative tolerance as evaluate_exact.
    double scale = std::max({1.0, std::abs(outside.y), std::abs(outside.uw)});
    for (const PreparedBox* b : boxes)
        for (const Prize& z : b->atoms) scale = std::max({scale, std::abs(z.y), std::abs(z.uw)});
    const Kernel k{boxes, 1e-12 * scale};
    return k.solve(0, outside).second;
}

} // namespace pandora::detail
