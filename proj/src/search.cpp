#include "pandora/search.hpp"

#include "pandora/error.hpp"
#include "pandora/indices.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <utility>

namespace pandora {

namespace {

constexpr std::uint8_t kStop = 0;

/// Dynamic program over (opened mask, presented prize).
class Solver {
public:
    Solver(const Contract& w, const std::vector<Project>& boxes, const UtilityFn& u) : n_(boxes.size()) {
        if (n_ > kMaxBoxes)
            throw Error(ErrorCode::BudgetExceeded, std::to_string(n_) + " boxes exceed the exact budget of " +
                                                       std::to_string(kMaxBoxes));
        std::map<double, std::uint16_t> ids;
        ids[0.0] = 0;
        for (const auto& b : boxes) {
            if (b.dist.size() > kMaxSupport)
                throw Error(ErrorCode::BudgetExceeded, "box support of " + std::to_string(b.dist.size()) +
                                                           " atoms exceeds " + std::to_string(kMaxSupport));
            for (double y : b.dist.support()) ids.emplace(y, 0);
        }
        std::uint16_t next = 0;
        for (auto& [y, id] : ids) {
            id = next++;
            y_.push_back(y);
            const double wy = w(y);
            uw_.push_back(u.apply(wy));
            pi_.push_back(y - wy);
        }
        outside_ = ids.at(0.0);
        p_ = y_.size();

        double scale = 1.0;
        for (std::size_t k = 0; k < p_; ++k) scale = std::max({scale, std::abs(y_[k]), std::abs(uw_[k])});
        tol_ = 1e-12 * scale;

        for (const auto& b : boxes) {
            cost_.push_back(b.cost);
            index_.push_back(induced_index(w, b, u).value);
            std::vector<std::pair<std::uint16_t, double>> atoms;
            for (std::size_t j = 0; j < b.dist.size(); ++j)
                atoms.emplace_back(ids.at(b.dist.support()[j]), b.dist.probs()[j]);
            atoms_.push_back(std::move(atoms));
        }

        const std::size_t states = (std::size_t{1} << n_) * p_;
        agent_.assign(states, 0.0);
        principal_.assign(states, 0.0);
        choice_.assign(states, kStop);
        done_.assign(states, 0);
        solve(0, outside_);
    }

    double agent_value() const { return agent_[outside_]; }
    double principal_value() const { return principal_[outside_]; }
    std::size_t prizes() const { return p_; }
    double prize(std::size_t k) const { return y_[k]; }
    double wage_utility(std::size_t k) const { return uw_[k]; }
    double principal_payoff(std::size_t k) const { return pi_[k]; }
    std::size_t outside() const { return outside_; }
    double cost(std::size_t i) const { return cost_[i]; }
    const std::vector<std::pair<std::uint16_t, double>>& atoms(std::size_t i) const { return atoms_[i]; }

    /// 0 to stop, i + 1 to open box i.
    std::uint8_t choice(std::uint32_t mask, std::size_t cur) const { return choice_[mask * p_ + cur]; }

    /// Prize presented after holding `cur` and drawing `drawn`.
    std::size_t better(std::size_t cur, std::size_t drawn) const {
        if (uw_[drawn] > uw_[cur] + tol_) return drawn;
        if (uw_[drawn] < uw_[cur] - tol_) return cur;
        if (pi_[drawn] != pi_[cur]) return pi_[drawn] > pi_[cur] ? drawn : cur;
        return y_[drawn] > y_[cur] ? drawn : cur;
    }

    /// Probability that each prize is the one finally presented.
    std::vector<double> presented_mass() const {
        std::vector<double> reach(agent_.size(), 0.0);
        std::vector<double> out(p_, 0.0);
        reach[outside_] = 1.0;
        // Transitions only add bits, so increasing mask order is topological.
        for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n_); ++mask) {
            for (std::size_t cur = 0; cur < p_; ++cur) {
                const double m = reach[mask * p_ + cur];
                if (m == 0.0) continue;
                const std::uint8_t c = choice(mask, cur);
                if (c == kStop) {
                    out[cur] += m;
                    continue;
                }
                const std::size_t i = c - 1u;
                const std::uint32_t child = mask | (std::uint32_t{1} << i);
                for (const auto& [k, q] : atoms_[i]) reach[child * p_ + better(cur, k)] += m * q;
            }
        }
        return out;
    }

private:
    void solve(std::uint32_t mask, std::size_t cur) {
        const std::size_t s = mask * p_ + cur;
        if (done_[s]) return;

        std::array<double, kMaxBoxes + 1> av{};
        std::array<double, kMaxBoxes + 1> pv{};
        std::array<std::uint8_t, kMaxBoxes + 1> tag{};
        std::size_t count = 0;
        av[count] = uw_[cur];
        pv[count] = pi_[cur];
        tag[count++] = kStop;

        for (std::size_t i = 0; i < n_; ++i) {
            const std::uint32_t bit = std::uint32_t{1} << i;
            // A box whose index is below the wage in hand is never worth opening.
            if ((mask & bit) || index_[i] < uw_[cur] - tol_) continue;
            double a = -cost_[i];
            double p = 0.0;
            for (const auto& [k, q] : atoms_[i]) {
                const std::size_t nxt = better(cur, k);
                solve(mask | bit, nxt);
                const std::size_t t = (mask | bit) * p_ + nxt;
                a += q * agent_[t];
                p += q * principal_[t];
            }
            av[count] = a;
            pv[count] = p;
            tag[count++] = static_cast<std::uint8_t>(i + 1);
        }

        double best_agent = av[0];
        for (std::size_t b = 1; b < count; ++b) best_agent = std::max(best_agent, av[b]);
        std::size_t pick = count;
        for (std::size_t b = 0; b < count; ++b) {
            if (av[b] < best_agent - tol_) continue;
            if (pick == count || pv[b] > pv[pick] + tol_) pick = b;
        }
        agent_[s] = av[pick];
        principal_[s] = pv[pick];
        choice_[s] = tag[pick];
        done_[s] = 1;
    }

    std::size_t n_;
    std::size_t p_ = 0;
    std::size_t outside_ = 0;
    double tol_ = 1e-12;
    std::vector<double> y_, uw_, pi_;
    std::vector<double> cost_, index_;
    std::vector<std::vector<std::pair<std::uint16_t, double>>> atoms_;
    std::vector<double> agent_, principal_;
    std::vector<std::uint8_t> choice_, done_;
};

Distribution distribution_from_mass(const std::vector<double>& ys, const std::vector<double>& mass) {
    std::vector<std::pair<double, double>> pairs;
    double total = 0.0;
    for (std::size_t k = 0; k < ys.size(); ++k) {
        if (mass[k] > 0.0) {
            pairs.emplace_back(ys[k], mass[k]);
            total += mass[k];
        }
    }
    for (auto& pr : pairs) pr.second /= total;
    return make_distribution(pairs);
}

struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

constexpr std::uint64_t kBlock = 4096;

struct BlockSums {
    double principal = 0.0;
    double principal_sq = 0.0;
    double agent = 0.0;
    double agent_sq = 0.0;
};

} // namespace

PayoffReport evaluate_exact(const Contract& w, const std::vector<Project>& boxes, const UtilityFn& u) {
    const Solver solver(w, boxes, u);
    PayoffReport r;
    r.principal = solver.principal_value();
    r.agent = solver.agent_value();
    r.surplus = r.principal + r.agent;

    std::vector<double> ys(solver.prizes());
    for (std::size_t k = 0; k < ys.size(); ++k) ys[k] = solver.prize(k);
    r.presented_dist = distribution_from_mass(ys, solver.presented_mass());
    return r;
}

double planner_value(const std::vector<Project>& boxes) {
    return evaluate_exact(Contract::linear(1.0), boxes).surplus;
}

SimulationEstimate simulate(const Contract& w, const std::vector<Project>& boxes, const UtilityFn& u,
                            std::uint64_t seed, std::uint64_t n_episodes, unsigned workers) {
    if (n_episodes == 0) throw Error(ErrorCode::InvalidArgument, "simulate needs at least one episode");
    const Solver solver(w, boxes, u);

    const std::uint64_t blocks = (n_episodes + kBlock - 1) / kBlock;
    std::vector<BlockSums> sums(blocks);

    auto run_block = [&](std::uint64_t b) {
        BlockSums acc;
        const std::uint64_t end = std::min(n_episodes, (b + 1) * kBlock);
        for (std::uint64_t e = b * kBlock; e < end; ++e) {
            SplitMix64 rng{seed};
            rng.state ^= SplitMix64{e}.next();
            std::uint32_t mask = 0;
            std::size_t cur = solver.outside();
            double paid = 0.0;
            for (;;) {
                const std::uint8_t c = solver.choice(mask, cur);
                if (c == kStop) break;
                const std::size_t i = c - 1u;
                paid += solver.cost(i);
                mask |= std::uint32_t{1} << i;
                const double x = rng.uniform();
                const auto& atoms = solver.atoms(i);
                std::size_t k = atoms.back().first;
                double cum = 0.0;
                for (const auto& [id, q] : atoms) {
                    cum += q;
                    if (x < cum) {
                        k = id;
                        break;
                    }
                }
                cur = solver.better(cur, k);
            }
            const double p = solver.principal_payoff(cur);
            const double a = solver.wage_utility(cur) - paid;
            acc.principal += p;
            acc.principal_sq += p * p;
            acc.agent += a;
            acc.agent_sq += a * a;
        }
        sums[b] = acc;
    };

    unsigned threads = workers != 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));
    if (threads <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::uint64_t b = t; b < blocks; b += threads) run_block(b);
            });
        for (auto& th : pool) th.join();
    }

    BlockSums total;
    for (const auto& s : sums) {
        total.principal += s.principal;
        total.principal_sq += s.principal_sq;
        total.agent += s.agent;
        total.agent_sq += s.agent_sq;
    }
    const double n = static_cast<double>(n_episodes);
    auto std_error = [n](double sum, double sq) {
        if (n < 2.0) return 0.0;
        const double mean = sum / n;
        const double var = std::max(0.0, (sq - n * mean * mean) / (n - 1.0));
        return std::sqrt(var / n);
    };
    SimulationEstimate est;
    est.episodes = n_episodes;
    est.principal_mean = total.principal / n;
    est.agent_mean = total.agent / n;
    est.principal_std_error = std_error(total.principal, total.principal_sq);
    est.agent_std_error = std_error(total.agent, total.agent_sq);
    return est;
}

PayoffReport evaluate_resampling(const Contract& w, const Project& box0) {
    const double r = induced_index(w, box0).value;
    const double b0 = w(0.0);
    const auto ys = box0.dist.support();
    const auto ps = box0.dist.probs();

    double scale = std::max({1.0, std::abs(r), box0.dist.max_support()});
    const double tol = 1e-12 * scale;

    PayoffReport quit;
    quit.principal = -b0;
    quit.agent = b0;
    quit.surplus = 0.0;
    quit.presented_dist = dirac(0.0);
    if (b0 > r + tol) return quit;

    std::vector<std::size_t> strict;
    std::vector<std::size_t> edge;
    for (std::size_t k = 0; k < ys.size(); ++k) {
        const double v = w(ys[k]);
        if (v > r + tol)
            strict.push_back(k);
        else if (std::abs(v - r) <= tol)
            edge.push_back(k);
    }
    if (strict.empty() && edge.empty())
        throw Error(ErrorCode::NeverStops, "no draw clears the induced index");

    // Indifferent draws are added best-first for the principal; some prefix is optimal.
    auto payoff = [&](std::size_t k) { return ys[k] - w(ys[k]); };
    std::stable_sort(edge.begin(), edge.end(), [&](std::size_t a, std::size_t b) { return payoff(a) > payoff(b); });

    double mass = 0.0;
    double moment = 0.0;
    for (std::size_t k : strict) {
        mass += ps[k];
        moment += ps[k] * payoff(k);
    }
    std::size_t best_prefix = 0;
    double best = mass > 0.0 ? moment / mass : -std::numeric_limits<double>::infinity();
    double m = mass;
    double mo = moment;
    for (std::size_t t = 0; t < edge.size(); ++t) {
        m += ps[edge[t]];
        mo += ps[edge[t]] * payoff(edge[t]);
        if (mo / m > best + tol) {
            best = mo / m;
            best_prefix = t + 1;
        }
    }

    // At b0 = r the agent may also stop before the first draw.
    if (std::abs(b0 - r) <= tol && quit.principal > best + tol) return quit;

    std::vector<std::pair<double, double>> stop;
    for (std::size_t k : strict) stop.emplace_back(ys[k], ps[k]);
    for (std::size_t t = 0; t < best_prefix; ++t) stop.emplace_back(ys[edge[t]], ps[edge[t]]);
    double p_stop = 0.0;
    double wage = 0.0;
    for (const auto& [y, p] : stop) {
        p_stop += p;
        wage += p * w(y);
    }
    for (auto& pr : stop) pr.second /= p_stop;

    PayoffReport rep;
    rep.principal = best;
    rep.agent = wage / p_stop - box0.cost / p_stop;
    rep.surplus = rep.principal + rep.agent;
    rep.presented_dist = make_distribution(stop);
    return rep;
}

} // namespace pandora
