#pragma once

#include "pandora/contracts.hpp"
#include "pandora/domain.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace pandora {

/// Tolerance of the full-surplus-extraction check E[w] = c0.
inline constexpr double kFseTol = 1e-9;

struct BaselineDesign {
    Contract contract;
    /// Free known box: every debt level at or above the top prize is equivalent.
    bool degenerate = false;
    /// Capped earnout whose cap is below the largest excess y - z.
    bool cap_binding = false;
};

/// Debt at the known box's index. Throws NeverSampled when that index is negative.
BaselineDesign pure_debt(const Project& box0);

/// Debt z in [s0, r0) plus the equity share that extracts the full surplus. Throws ZOutOfRange.
BaselineDesign debt_plus_equity(const Project& box0, double z);

/// Debt z in [s0, r0) plus the cap that extracts the full surplus. Throws ZOutOfRange or Infeasible.
BaselineDesign capped_earnout(const Project& box0, double z);

struct OptimalityVerdict {
    bool mdl = false;
    bool fse = false;
    bool optimal = false;
    double s0 = 0.0;
    double r0 = 0.0;
};

/// Robust optimality test: w(y) <= [y - s0]^+ everywhere and E[w] = c0.
OptimalityVerdict classify_optimal(const Contract& w, const Project& box0);

/// Largest yhat in [0, y] maximizing yhat - w(yhat) + k (y - yhat).
double diversion_best_response(const Contract& w, double k, double y);

/// No prize is ever under-reported when a fraction k of diverted value is kept.
bool diversion_proof(const Contract& w, double k);

struct MoralHazardDesign {
    double k = 0.0;
    double k_star = 0.0;
    double z = 0.0;
    double alpha = 0.0;
    Contract contract = Contract::linear(0.0);
};

/// Optimal debt-plus-equity contract under diversion rate k. Throws KTooLarge.
MoralHazardDesign design_moral_hazard(const Project& box0, double k);

struct RiskAverseDesign {
    double z_u = 0.0;
    double w_bar_u = 0.0;
    /// Structural guarantee of the returned contract, computed afterwards.
    double guarantee = 0.0;
    /// guarantee agrees with z_u within 1e-6.
    bool verified = false;
    Contract contract = Contract::linear(0.0);
};

/// Capped-earnout debt for an agent with concave utility u. Throws Infeasible.
RiskAverseDesign design_risk_averse(const Project& box0, const UtilityFn& u);

struct MultiAgentPlan {
    /// Input positions, highest index first (stable on ties).
    std::vector<std::size_t> order;
    std::vector<double> debts;
    /// Stop after round k when the best prize exceeds stop_thresholds[k]; one fewer than rounds.
    std::vector<double> stop_thresholds;
    double expected_principal = 0.0;
    /// Empty when the set is beyond the exact search budget.
    std::optional<double> planner_value;
};

/// Sequential delegation with one debt contract per agent. Throws NeverSampled.
MultiAgentPlan plan_multi_agent(const std::vector<Project>& known);

/// Value of the sequential plan for a fixed agent order.
double sequential_debt_value(const std::vector<Project>& known, const std::vector<std::size_t>& order);

struct EfficiencyCounterexample {
    Project extra_box;
    double planner_surplus = 0.0;
    double agent_surplus = 0.0;
    double gap = 0.0;
};

struct EfficiencyReport {
    /// c0 >= E[y] - min support, equivalently min support >= r0.
    bool condition = false;
    double r0 = 0.0;
    double y_min = 0.0;
    std::size_t audit_sets = 0;
    bool shift_identity = true;
    bool order_preserved = true;
    bool stops_match = true;
    double max_surplus_gap = 0.0;
    std::optional<EfficiencyCounterexample> counterexample;
};

/// Efficiency of the debt contract at r0, with a seeded audit over random project sets.
EfficiencyReport efficiency_report(const Project& box0, std::uint64_t seed = 1, std::size_t audit_sets = 64);

} // namespace pandora
