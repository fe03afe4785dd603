#include "pandora/designer.hpp"

#include "pandora/adversary.hpp"
#include "pandora/error.hpp"
#include "pandora/indices.hpp"
#include "pandora/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <numeric>
#include <random>
#include <string>

namespace pandora {

namespace {

void require_z_range(const Project& box0, double z) {
    const double s0 = box0.surplus();
    const double r0 = index(box0).value;
    if (!(z >= s0 && z < r0))
        throw Error(ErrorCode::ZOutOfRange,
                    "debt level " + std::to_string(z) + " outside [" + std::to_string(s0) + ", " + std::to_string(r0) + ")");
}

/// Sorted distinct excess values (y - z)^+ with their probabilities.
std::vector<std::pair<double, double>> excess_atoms(const Distribution& d, double z) {
    std::map<double, double> m;
    for (std::size_t i = 0; i < d.size(); ++i) m[std::max(0.0, d.support()[i] - z)] += d.probs()[i];
    return {m.begin(), m.end()};
}

/// Smallest cap with E[v(min(cap, e))] = target for increasing v, v(0) = 0; nullopt if out of reach.
template <class V, class Inv>
std::optional<double> solve_cap(const std::vector<std::pair<double, double>>& atoms, double target, V v, Inv inv) {
    if (target <= 0.0) return 0.0;
    double below = 0.0; // sum over atoms under the current piece of p * v(e)
    double above = 1.0; // mass at or above the current piece
    double prev = 0.0;
    for (const auto& [e, p] : atoms) {
        // On [prev, e] the objective is below + above * v(cap).
        if (e > prev && below + above * v(e) >= target) {
            const double cap = inv((target - below) / above);
            return std::clamp(cap, prev, e);
        }
        below += p * v(e);
        above -= p;
        prev = e;
    }
    return std::nullopt;
}

} // namespace

BaselineDesign pure_debt(const Project& box0) {
    const IndexResult r = index(box0);
    if (r.never_sample)
        throw Error(ErrorCode::NeverSampled, "known box has negative index " + std::to_string(r.value));
    return BaselineDesign{Contract::pure_debt(r.value), box0.cost == 0.0, false};
}

BaselineDesign debt_plus_equity(const Project& box0, double z) {
    require_z_range(box0, z);
    const double alpha = box0.cost / expected_excess(box0.dist, z);
    return BaselineDesign{Contract::debt_plus_equity(z, alpha), box0.cost == 0.0, false};
}

BaselineDesign capped_earnout(const Project& box0, double z) {
    require_z_range(box0, z);
    const auto atoms = excess_atoms(box0.dist, z);
    const auto cap = solve_cap(
        atoms, box0.cost, [](double x) { return x; }, [](double x) { return x; });
    if (!cap) throw Error(ErrorCode::Infeasible, "no cap reaches the inspection cost");
    const double top = atoms.back().first;
    return BaselineDesign{Contract::capped_earnout(z, *cap), box0.cost == 0.0, *cap < top};
}

OptimalityVerdict classify_optimal(const Contract& w, const Project& box0) {
    OptimalityVerdict v;
    v.s0 = box0.surplus();
    v.r0 = index(box0).value;
    v.mdl = satisfies_mdl(w, v.s0);
    v.fse = std::abs(expected_wage(w, box0.dist) - box0.cost) <= kFseTol;
    v.optimal = v.mdl && v.fse;
    return v;
}

double diversion_best_response(const Contract& w, double k, double y) {
    if (!(k >= 0.0 && k <= 1.0)) throw Error(ErrorCode::InvalidArgument, "diversion rate must lie in [0, 1]");
    if (!(y >= 0.0)) throw Error(ErrorCode::NegativePrize, "diverted prize must be nonnegative");
    // The objective is linear between breakpoints and only jumps down, so the
    // supremum sits at 0, y, a breakpoint, or the left limit at a breakpoint.
    // A left-limit supremum is reported at its breakpoint.
    const auto& f = w.shape();
    const double tol = 1e-12 * std::max({1.0, y, f.scale()});
    double best_x = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    auto offer = [&](double x, double value) {
        if (value > best + tol || (value >= best - tol && x >= best_x)) {
            best = std::max(best, value);
            best_x = x;
        }
    };
    offer(0.0, -w(0.0) + k * y);
    for (std::size_t j = 1; j < f.breaks.size(); ++j) {
        const double b = f.breaks[j];
        if (b > y) break;
        offer(b, b - std::max(0.0, f.left_limit(j)) + k * (y - b));
        offer(b, b - w(b) + k * (y - b));
    }
    offer(y, y - w(y));
    return best_x;
}

bool diversion_proof(const Contract& w, double k) {
    return structure(w).sup_left_derivative <= 1.0 - k + 1e-12;
}

MoralHazardDesign design_moral_hazard(const Project& box0, double k) {
    if (!(k >= 0.0 && k <= 1.0)) throw Error(ErrorCode::InvalidArgument, "diversion rate must lie in [0, 1]");
    const double mean = box0.dist.mean();
    const double c0 = box0.cost;
    if (k > 1.0 - c0 / mean + 1e-12)
        throw Error(ErrorCode::KTooLarge, "diversion rate " + std::to_string(k) + " exceeds 1 - c0/E[y]");
    const double s0 = box0.surplus();
    const double excess_s0 = expected_excess(box0.dist, s0);

    MoralHazardDesign d;
    d.k = k;
    d.k_star = excess_s0 > 0.0 ? 1.0 - c0 / excess_s0 : 1.0;
    if (k < d.k_star) {
        d.z = s0;
        d.alpha = excess_s0 > 0.0 ? c0 / excess_s0 : 0.0;
    } else if (k < 1.0) {
        // z_k >= 0 whenever k <= 1 - c0/E[y]; clamp the rounding at that boundary.
        d.z = std::max(0.0, smallest_root(box0.dist.support(), box0.dist.probs(), c0 / (1.0 - k)).value);
        d.alpha = 1.0 - k;
    } else {
        d.z = s0;
        d.alpha = 0.0;
    }
    d.contract = Contract::debt_plus_equity(d.z, d.alpha);
    return d;
}

RiskAverseDesign design_risk_averse(const Project& box0, const UtilityFn& u) {
    const double c0 = box0.cost;
    const double mean = box0.dist.mean();
    auto cap_at = [&](double z) {
        return solve_cap(
            excess_atoms(box0.dist, z), c0, [&](double x) { return u.apply(x); }, [&](double v) { return u.invert(v); });
    };
    // g(z) = z - E[y - min(cap(z), (y - z)^+)]; an unreachable cost counts as g > 0.
    auto g = [&](double z) -> std::optional<double> {
        const auto cap = cap_at(z);
        if (!cap) return std::nullopt;
        double paid = 0.0;
        for (std::size_t i = 0; i < box0.dist.size(); ++i)
            paid += box0.dist.probs()[i] * std::min(*cap, std::max(0.0, box0.dist.support()[i] - z));
        return z - (mean - paid);
    };

    const auto g0 = g(0.0);
    if (!g0) throw Error(ErrorCode::Infeasible, "no capped earnout gives the agent expected utility c0");
    double lo = 0.0;
    double hi = mean;
    if (*g0 < 0.0) {
        while (hi - lo > 1e-9) {
            const double mid = 0.5 * (lo + hi);
            const auto gm = g(mid);
            if (gm && *gm < 0.0)
                lo = mid;
            else
                hi = mid;
        }
    } else {
        hi = 0.0;
    }
    // lo stays feasible throughout; snap to hi when that end is feasible too.
    double z = hi;
    auto cap = cap_at(z);
    if (!cap) {
        z = lo;
        cap = cap_at(z);
    }

    RiskAverseDesign d;
    d.z_u = z;
    d.w_bar_u = *cap;
    d.contract = Contract::capped_earnout(z, *cap);
    d.guarantee = guarantee(d.contract, box0, u).value;
    d.verified = std::abs(d.guarantee - d.z_u) <= 1e-6;
    return d;
}

double sequential_debt_value(const std::vector<Project>& known, const std::vector<std::size_t>& order) {
    std::vector<double> r(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) r[k] = index(known[order[k]]).value;

    // Mass over the best prize adopted so far among rounds that continue.
    std::map<double, double> live{{0.0, 1.0}};
    double value = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const Distribution& d = known[order[k]].dist;
        std::map<double, double> next;
        double live_mass = 0.0;
        for (const auto& [b, m] : live) {
            live_mass += m;
            for (std::size_t i = 0; i < d.size(); ++i) next[std::max(b, d.support()[i])] += m * d.probs()[i];
        }
        value -= live_mass * expected_excess(d, r[k]);
        live.clear();
        const bool last = k + 1 == order.size();
        for (const auto& [b, m] : next) {
            if (last || b > r[k + 1])
                value += m * b;
            else
                live[b] += m;
        }
    }
    if (order.empty()) return 0.0;
    return value;
}

MultiAgentPlan plan_multi_agent(const std::vector<Project>& known) {
    std::vector<double> r(known.size());
    for (std::size_t i = 0; i < known.size(); ++i) {
        const IndexResult ir = index(known[i]);
        if (ir.never_sample)
            throw Error(ErrorCode::NeverSampled, "agent " + std::to_string(i) + " has negative index");
        r[i] = ir.value;
    }
    MultiAgentPlan plan;
    plan.order.resize(known.size());
    std::iota(plan.order.begin(), plan.order.end(), std::size_t{0});
    std::stable_sort(plan.order.begin(), plan.order.end(), [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });
    for (std::size_t k = 0; k < plan.order.size(); ++k) {
        plan.debts.push_back(r[plan.order[k]]);
        if (k + 1 < plan.order.size()) plan.stop_thresholds.push_back(r[plan.order[k + 1]]);
    }
    plan.expected_principal = sequential_debt_value(known, plan.order);
    if (known.size() <= kMaxBoxes) plan.planner_value = planner_value(known);
    return plan;
}

EfficiencyReport efficiency_report(const Project& box0, std::uint64_t seed, std::size_t audit_sets) {
    EfficiencyReport rep;
    rep.r0 = index(box0).value;
    rep.y_min = box0.dist.min_support();
    const double mean = box0.dist.mean();
    const double tol = 1e-12 * std::max(1.0, box0.dist.max_support());
    rep.condition = box0.cost >= mean - rep.y_min - tol;
    if (rep.r0 < 0.0) return rep;

    const Contract w0 = Contract::pure_debt(rep.r0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double span = std::max(1.0, box0.dist.max_support());

    for (std::size_t t = 0; t < audit_sets; ++t) {
        std::vector<Project> set{box0};
        const std::size_t extra = 1 + rng() % 2;
        for (std::size_t b = 0; b < extra; ++b) {
            const std::size_t n = 2 + rng() % 2;
            std::vector<std::pair<double, double>> atoms;
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double p = 0.1 + unit(rng);
                atoms.emplace_back(span * 2.0 * unit(rng), p);
                total += p;
            }
            // One prize well above r0 so that a target index in [r0, top) exists.
            atoms.back().first = rep.r0 + span * (0.1 + unit(rng));
            for (auto& a : atoms) a.second /= total;
            const Distribution d = make_distribution(atoms);
            const double target = rep.r0 + (d.max_support() - rep.r0) * 0.9 * unit(rng);
            set.emplace_back(d, expected_excess(d, target));
        }

        std::vector<double> r, rw;
        for (const Project& p : set) {
            r.push_back(index(p).value);
            rw.push_back(induced_index(w0, p).value);
        }
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (std::abs(rw[i] - (r[i] - rep.r0)) > 1e-12 * std::max(1.0, std::abs(r[i]))) rep.shift_identity = false;
            for (std::size_t j = 0; j < set.size(); ++j)
                if ((r[i] > r[j] + tol) != (rw[i] > rw[j] + tol)) rep.order_preserved = false;
            for (const Project& p : set)
                for (double y : p.dist.support())
                    if ((y > r[i] + tol) != (w0(y) > rw[i] + tol)) rep.stops_match = false;
        }
        const double gap = planner_value(set) - evaluate_exact(w0, set).surplus;
        rep.max_surplus_gap = std::max(rep.max_surplus_gap, gap);
        ++rep.audit_sets;
    }

    if (!rep.condition) {
        // A sure prize just below r0 at a small cost: worth opening for the
        // planner after a low draw, never for the agent paid with debt r0.
        const double eps = (rep.r0 - rep.y_min) / 100.0;
        Project a1(dirac(rep.r0 - eps), eps);
        EfficiencyCounterexample cx{a1, 0.0, 0.0, 0.0};
        cx.planner_surplus = planner_value({box0, a1});
        cx.agent_surplus = evaluate_exact(w0, {box0, a1}).surplus;
        cx.gap = cx.planner_surplus - cx.agent_surplus;
        rep.counterexample = cx;
    }
    return rep;
}

} // namespace pandora
