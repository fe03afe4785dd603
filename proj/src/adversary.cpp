#include "pandora/adversary.hpp"

#include "pandora/detail/search_kernel.hpp"
#include "pandora/error.hpp"
#include "pandora/indices.hpp"
#include "pandora/search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>
#include <utility>

namespace pandora {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Wage threshold tau with u(w) > r <=> w > tau; -inf when every wage qualifies.
/// An index within rounding of zero counts as zero, matching the search tie rule.
double wage_threshold(const Contract& w, const Project& box0, const UtilityFn& u) {
    const double r = induced_index(w, box0, u).value;
    double scale = 1.0;
    for (double y : box0.dist.support()) scale = std::max(scale, std::abs(u.apply(w(y))));
    if (r < -1e-12 * scale) return -kInf;
    return u.invert(std::max(0.0, r));
}

/// Points where the wage crosses tau from below, segment by segment.
std::vector<double> crossing_points(const Contract& w, double tau) {
    std::vector<double> out;
    if (!std::isfinite(tau)) return out;
    const auto& f = w.shape();
    for (std::size_t j = 0; j < f.breaks.size(); ++j) {
        const double s = f.slopes[j];
        if (s == 0.0) continue;
        const double x = f.breaks[j] + (tau - f.values[j]) / s;
        const double end = j + 1 < f.breaks.size() ? f.breaks[j + 1] : kInf;
        if (x >= f.breaks[j] && x < end) out.push_back(x);
    }
    return out;
}

void sort_unique(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

} // namespace

std::string to_string(GuaranteeReport::Witness w) {
    switch (w) {
    case GuaranteeReport::Witness::known_only: return "known_only";
    case GuaranteeReport::Witness::safe_project: return "safe_project";
    case GuaranteeReport::Witness::grid_set: return "grid_set";
    }
    return "known_only";
}

SafeInfimum safe_project_infimum(const Contract& w, const Project& box0, const UtilityFn& u) {
    const double tau = wage_threshold(w, box0, u);
    const auto& f = w.shape();
    const double tol = 1e-12 * f.scale();

    SafeInfimum best{kInf, false, 0.0};
    auto offer = [&](double value, bool attained, double x) {
        if (value < best.value - tol || (value <= best.value + tol && attained && !best.attained))
            best = SafeInfimum{value, attained, x};
    };

    for (std::size_t j = 0; j < f.breaks.size(); ++j) {
        const double a = f.breaks[j];
        const double e = j + 1 < f.breaks.size() ? f.breaks[j + 1] : kInf;
        const double v = f.values[j];
        const double s = f.slopes[j];

        // Feasible part of [a, e): the set where v + s (x - a) > tau.
        double lo = a;
        bool lo_closed = true;
        double hi = e;
        if (std::isfinite(tau)) {
            if (s == 0.0) {
                if (!(v > tau)) continue;
            } else {
                const double cross = a + (tau - v) / s;
                if (s > 0.0) {
                    if (cross >= a) {
                        lo = cross;
                        lo_closed = false;
                    }
                } else {
                    hi = std::min(hi, cross);
                }
            }
        }
        if (!(lo < hi)) continue;

        const double m = 1.0 - s;
        if (m >= 0.0) {
            offer(lo - (v + s * (lo - a)), lo_closed, lo);
        } else if (!std::isfinite(hi)) {
            offer(-kInf, false, lo);
        } else {
            offer(hi - (v + s * (hi - a)), false, hi);
        }
    }
    return best;
}

GuaranteeReport guarantee(const Contract& w, const Project& box0, const UtilityFn& u) {
    if (!structure(w).doubly_monotone)
        throw Error(ErrorCode::NotDoublyMonotone, "structural guarantee needs a doubly monotone contract");
    const double known = evaluate_exact(w, {box0}, u).principal;
    const SafeInfimum safe = safe_project_infimum(w, box0, u);
    const double tol = 1e-12 * std::max(1.0, std::abs(known));

    GuaranteeReport rep;
    rep.sets_evaluated = 1;
    if (safe.value < known - tol) {
        rep.value = safe.value;
        rep.attained = safe.attained;
        rep.witness = GuaranteeReport::Witness::safe_project;
        rep.witness_x = safe.x;
        if (!safe.attained)
            rep.epsilon_note = "infimum approached by safe projects (delta_x, 0) with x near " + fmt(safe.x) +
                               "; not attained";
    } else {
        rep.value = known;
        rep.witness = GuaranteeReport::Witness::known_only;
    }
    return rep;
}

AdversaryGrid default_grid(const Contract& w, const Project& box0, const UtilityFn& u, AdversaryGrid g) {
    const double r0 = index(box0).value;
    const double s0 = box0.surplus();
    const double tau = wage_threshold(w, box0, u);
    const auto crossings = crossing_points(w, tau);

    if (g.prizes.empty()) {
        for (double b : w.breakpoints()) {
            g.prizes.push_back(b);
            if (b - g.offset >= 0.0) g.prizes.push_back(b - g.offset);
            g.prizes.push_back(b + g.offset);
        }
        for (double y : box0.dist.support()) g.prizes.push_back(y);
        if (s0 >= 0.0) g.prizes.push_back(s0);
        if (r0 >= 0.0) g.prizes.push_back(r0);
        for (double x : crossings) g.prizes.push_back(x);
    }
    if (g.limit_prizes.empty() && g.include_limits) {
        for (double b : w.breakpoints()) g.limit_prizes.push_back(b);
        for (double x : crossings) g.limit_prizes.push_back(x);
    }
    if (g.costs.empty()) g.costs = {0.0, box0.cost / 2.0, box0.cost};
    sort_unique(g.prizes);
    sort_unique(g.limit_prizes);
    sort_unique(g.costs);
    return g;
}

namespace {

struct Token {
    double base;
    bool limit;
};

struct Candidate {
    std::vector<std::pair<std::size_t, double>> atoms; // (token, probability)
    double cost;
    bool has_limit;
};

constexpr std::size_t kVariants = 3;

struct SetResult {
    double value = kInf;
    bool attained = true;
    std::size_t key = 0;
    int a = -1;
    int b = -1;
};

bool before(const SetResult& x, const SetResult& y) {
    return x.value < y.value || (x.value == y.value && x.key < y.key);
}

} // namespace

GuaranteeReport brute_force_guarantee(const Contract& w, const Project& box0, const UtilityFn& u,
                                      const AdversaryGrid& grid_in) {
    if (grid_in.max_extra > 2) throw Error(ErrorCode::BudgetExceeded, "brute force supports at most 2 extra boxes");
    if (grid_in.max_support == 0 || grid_in.max_support > 2)
        throw Error(ErrorCode::BudgetExceeded, "brute force supports boxes with 1 or 2 prizes");
    if (!(grid_in.offset > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid offset must be positive");
    for (double p : grid_in.probs)
        if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "grid probabilities must lie in (0, 1)");
    const AdversaryGrid g = default_grid(w, box0, u, grid_in);
    for (double x : g.prizes)
        if (!(x >= 0.0)) throw Error(ErrorCode::NegativePrize, "grid prize " + fmt(x) + " is negative");
    for (double c : g.costs)
        if (!(c >= 0.0)) throw Error(ErrorCode::InvalidArgument, "grid cost " + fmt(c) + " is negative");

    std::vector<Token> tokens;
    for (double x : g.prizes) tokens.push_back({x, false});
    if (g.include_limits)
        for (double x : g.limit_prizes) tokens.push_back({x, true});

    std::vector<Candidate> cands;
    for (std::size_t t = 0; t < tokens.size(); ++t)
        for (double c : g.costs) cands.push_back({{{t, 1.0}}, c, tokens[t].limit});
    const std::size_t n_single = cands.size();
    if (g.max_support >= 2) {
        for (std::size_t t1 = 0; t1 < tokens.size(); ++t1)
            for (std::size_t t2 = t1 + 1; t2 < tokens.size(); ++t2)
                for (double p : g.probs)
                    for (double c : g.costs)
                        cands.push_back({{{t1, p}, {t2, 1.0 - p}}, c, tokens[t1].limit || tokens[t2].limit});
    }

    const double delta[kVariants] = {g.offset, g.offset / 2.0, g.offset / 4.0};
    const double w0 = w(0.0);
    const detail::Prize outside{0.0, u.apply(w0), -w0};
    const detail::PreparedBox known = detail::prepare_box(w, box0, u);

    // prepared[i][k]: candidate i with limit prizes at base + delta[k].
    std::vector<std::array<detail::PreparedBox, kVariants>> prepared(cands.size());
    std::vector<std::array<bool, kVariants>> active(cands.size());
    std::vector<char> useful(cands.size(), 0);
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const Candidate& cd = cands[i];
        for (std::size_t k = 0; k < kVariants; ++k) {
            if (k > 0 && !cd.has_limit) {
                prepared[i][k] = prepared[i][0];
                active[i][k] = active[i][0];
                continue;
            }
            std::vector<std::pair<double, double>> pairs;
            for (const auto& [t, p] : cd.atoms)
                pairs.emplace_back(tokens[t].base + (tokens[t].limit ? delta[k] : 0.0), p);
            prepared[i][k] = detail::prepare_box(w, Project(make_distribution(pairs), cd.cost), u);
            double scale = 1.0;
            for (const auto& z : prepared[i][k].atoms) scale = std::max({scale, z.y, std::abs(z.uw)});
            // A box whose index is below the wage of the outside option is never opened.
            active[i][k] = prepared[i][k].index >= outside.uw - 1e-9 * scale;
        }
        useful[i] = active[i][0] || active[i][1] || active[i][2];
    }

    auto evaluate = [&](int a, int b) {
        const bool lim = (a >= 0 && cands[a].has_limit) || (b >= 0 && cands[b].has_limit);
        double v[kVariants];
        const std::size_t nv = lim ? kVariants : 1;
        for (std::size_t k = 0; k < nv; ++k) {
            const detail::PreparedBox* boxes[3] = {&known, nullptr, nullptr};
            std::size_t n = 1;
            if (a >= 0 && active[a][k]) boxes[n++] = &prepared[a][k];
            if (b >= 0 && active[b][k]) boxes[n++] = &prepared[b][k];
            v[k] = detail::principal_value(std::span<const detail::PreparedBox* const>(boxes, n), outside);
        }
        if (!lim) return std::pair{v[0], true};
        const double scale = std::max({1.0, std::abs(v[0]), std::abs(v[2])});
        const double d1 = v[0] - v[1];
        const double d2 = v[1] - v[2];
        if (std::abs(d1 - 2.0 * d2) <= 1e-10 * scale) {
            if (v[0] == v[2]) return std::pair{v[2], true};
            return std::pair{2.0 * v[2] - v[1], false};
        }
        return std::pair{std::min({v[0], v[1], v[2]}), true};
    };

    // Sets are keyed in enumeration order: {}, singletons, then pairs.
    SetResult best;
    {
        const auto [v, att] = evaluate(-1, -1);
        best = SetResult{v, att, 0, -1, -1};
    }
    std::size_t evaluated = 1;
    const std::size_t n = cands.size();
    if (g.max_extra >= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!useful[i]) continue;
            const auto [v, att] = evaluate(static_cast<int>(i), -1);
            ++evaluated;
            const SetResult r{v, att, 1 + i, static_cast<int>(i), -1};
            if (before(r, best)) best = r;
        }
    }
    if (g.max_extra >= 2) {
        // Pair (i, j) with j <= i; j ranges over sure prizes unless full_pairs.
        const std::size_t j_end = g.full_pairs ? n : n_single;
        unsigned threads = std::max(1u, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
        std::vector<SetResult> local(threads);
        std::vector<std::size_t> counts(threads, 0);
        auto work = [&](unsigned t) {
            SetResult lb;
            for (std::size_t i = t; i < n; i += threads) {
                if (!useful[i]) continue;
                for (std::size_t j = 0; j <= i && j < j_end; ++j) {
                    if (!useful[j]) continue;
                    const auto [v, att] = evaluate(static_cast<int>(i), static_cast<int>(j));
                    ++counts[t];
                    const SetResult r{v, att, 1 + n + i * n + j, static_cast<int>(i), static_cast<int>(j)};
                    if (before(r, lb)) lb = r;
                }
            }
            local[t] = lb;
        };
        if (threads <= 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
            for (auto& th : pool) th.join();
        }
        for (unsigned t = 0; t < threads; ++t) {
            evaluated += counts[t];
            if (before(local[t], best)) best = local[t];
        }
    }

    GuaranteeReport rep;
    rep.value = best.value;
    rep.attained = best.attained;
    rep.sets_evaluated = evaluated;
    for (int id : {best.a, best.b}) {
        if (id < 0) continue;
        std::vector<std::pair<double, double>> pairs;
        for (const auto& [t, p] : cands[id].atoms) pairs.emplace_back(tokens[t].base, p);
        rep.extra_boxes.emplace_back(make_distribution(pairs), cands[id].cost);
    }
    if (rep.extra_boxes.empty()) {
        rep.witness = GuaranteeReport::Witness::known_only;
    } else if (rep.extra_boxes.size() == 1 && rep.extra_boxes[0].dist.size() == 1 && rep.extra_boxes[0].cost == 0.0) {
        rep.witness = GuaranteeReport::Witness::safe_project;
        rep.witness_x = rep.extra_boxes[0].dist.support()[0];
    } else {
        rep.witness = GuaranteeReport::Witness::grid_set;
    }
    if (!rep.attained)
        rep.epsilon_note = "infimum approached as limit prizes shrink toward their base points; not attained";
    return rep;
}

} // namespace pandora
