#include "pandora/indices.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <map>
#include <vector>

namespace pandora {

IndexResult smallest_root(std::span<const double> values, std::span<const double> probs, double cost) {
    std::map<double, double> atoms;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (probs[i] > 0.0) atoms[values[i]] += probs[i];

    if (cost == 0.0) {
        const double top = atoms.rbegin()->first;
        return IndexResult{top, false, top < 0.0};
    }

    // Walk down from the top atom. Above atom k the excess function is linear
    // with mass and first moment of the atoms strictly above.
    double mass = 0.0;
    double moment = 0.0;
    for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
        mass += it->second;
        moment += it->second * it->first;
        auto next = std::next(it);
        const double floor = next == atoms.rend() ? -std::numeric_limits<double>::infinity() : next->first;
        // g(floor) = moment - mass * floor - cost over the current piece.
        if (next == atoms.rend() || moment - mass * floor >= cost) {
            const double r = (moment - cost) / mass;
            return IndexResult{r, true, r < 0.0};
        }
    }
    return IndexResult{};
}

IndexResult index(const Project& p) { return smallest_root(p.dist.support(), p.dist.probs(), p.cost); }

IndexResult induced_index(const Contract& w, const Project& p, const UtilityFn& u) {
    const auto ys = p.dist.support();
    std::vector<double> vs(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) vs[i] = u.apply(w(ys[i]));
    return smallest_root(vs, p.dist.probs(), p.cost);
}

} // namespace pandora
