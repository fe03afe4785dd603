#pragma once

#include "pandora/domain.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pandora {

/**
 * Right-continuous piecewise-linear function on [0, inf).
 *
 * Segment j covers [breaks[j], breaks[j+1]) and evaluates to
 * values[j] + slopes[j] * (y - breaks[j]); the last segment is unbounded.
 * Values may jump at breakpoints; evaluation at a breakpoint returns the
 * right-limit.
 */
struct PiecewiseLinear {
    std::vector<double> breaks;
    std::vector<double> values;
    std::vector<double> slopes;

    double operator()(double y) const noexcept;
    std::size_t segment_of(double y) const noexcept;
    /// Limit from the left at breaks[j], j >= 1.
    double left_limit(std::size_t j) const noexcept;
    /// values[j] - left_limit(j), j >= 1.
    double jump(std::size_t j) const noexcept { return values[j] - left_limit(j); }
    /// Largest magnitude among breakpoints and values, at least 1.
    double scale() const noexcept;
};

/// sup over y >= 0 of f(y) - g(y), including left limits; +inf when unbounded.
double sup_difference(const PiecewiseLinear& f, const PiecewiseLinear& g);

/**
 * Limited-liability wage schedule w(y) >= 0.
 *
 * Only upward jumps are representable. The named families keep their
 * parameters so they serialize back to the same canonical JSON.
 */
class Contract {
public:
    enum class Kind { pure_debt, debt_plus_equity, capped_earnout, linear, constant, piecewise };

    struct Params {
        double z = 0.0;
        double alpha = 0.0;
        double wbar = 0.0;
        double value = 0.0;
    };

    /// [y - z]^+
    static Contract pure_debt(double z);
    /// [alpha (y - z)]^+
    static Contract debt_plus_equity(double z, double alpha);
    /// min{wbar, [y - z]^+}
    static Contract capped_earnout(double z, double wbar);
    static Contract linear(double alpha);
    static Contract constant(double value);
    static Contract piecewise(std::vector<double> breaks, std::vector<double> values, std::vector<double> slopes);

    /// Throws NegativePrize for y < 0.
    double eval(double y) const;
    double operator()(double y) const { return eval(y); }

    Kind kind() const noexcept { return kind_; }
    const Params& params() const noexcept { return params_; }
    const PiecewiseLinear& shape() const noexcept { return pwl_; }
    std::span<const double> breakpoints() const noexcept { return pwl_.breaks; }
    std::span<const double> values() const noexcept { return pwl_.values; }
    std::span<const double> slopes() const noexcept { return pwl_.slopes; }
    std::size_t segments() const noexcept { return pwl_.breaks.size(); }

private:
    Contract(Kind kind, Params params, PiecewiseLinear pwl);

    Kind kind_;
    Params params_;
    PiecewiseLinear pwl_;
};

struct StructureReport {
    bool limited_liability = true;
    bool wage_monotone = true;
    bool principal_monotone = true;
    bool doubly_monotone = true;
    /// max incoming slope; +inf when the schedule jumps.
    double sup_left_derivative = 0.0;
};

StructureReport structure(const Contract& w);

/// E_F[w(y)].
double expected_wage(const Contract& w, const Distribution& dist);

/// Tolerance of the minimum-debt-level check.
inline constexpr double kMdlTol = 1e-9;

/// w(y) <= [y - s0]^+ for every y >= 0, decided segment by segment.
bool satisfies_mdl(const Contract& w, double s0, double tol = kMdlTol);

/// The function y -> [y - s0]^+ on y >= 0 (s0 may be negative).
PiecewiseLinear debt_bound(double s0);

} // namespace pandora
