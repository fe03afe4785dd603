#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace pandora {

/// Tolerance on the probability mass of caller-supplied distributions.
inline constexpr double kInputProbTol = 1e-9;

/**
 * Finite-support prize distribution.
 *
 * Prizes are nonnegative and strictly increasing; probabilities are positive and
 * sum to one. Instances are only created through make_distribution(), which
 * canonicalizes the input (merge duplicates, drop null atoms, sort).
 */
class Distribution {
public:
    std::span<const double> support() const noexcept { return support_; }
    std::span<const double> probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return support_.size(); }

    double min_support() const noexcept { return support_.front(); }
    double max_support() const noexcept { return support_.back(); }
    double mean() const noexcept;

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    friend Distribution make_distribution(std::span<const std::pair<double, double>> pairs);

    Distribution(std::vector<double> support, std::vector<double> probs)
        : support_(std::move(support)), probs_(std::move(probs)) {}

    std::vector<double> support_;
    std::vector<double> probs_;
};

/// Builds a canonical distribution from (prize, probability) pairs.
/// Throws NegativePrize, ProbSumInvalid or EmptySupport.
Distribution make_distribution(std::span<const std::pair<double, double>> pairs);
Distribution make_distribution(std::initializer_list<std::pair<double, double>> pairs);

/// Point mass at `x`.
Distribution dirac(double x);

/// n-point midpoint-quantile discretization of Uniform[lo, hi].
Distribution discretize_uniform(double lo, double hi, std::size_t n);

/// n-point midpoint-quantile discretization of LogNormal(mu, sigma).
Distribution discretize_lognormal(double mu, double sigma, std::size_t n);

/// E[(y - z)^+]. For z <= min support this is mean() - z.
double expected_excess(const Distribution& dist, double z) noexcept;

/// A Pandora box: prize distribution and inspection cost.
struct Project {
    Distribution dist;
    double cost = 0.0;

    Project(Distribution d, double c);

    /// E[y] - cost.
    double surplus() const noexcept { return dist.mean() - cost; }

    friend bool operator==(const Project&, const Project&) = default;
};

/**
 * Agent utility over money: strictly increasing, u(0) = 0, concave unless identity.
 *
 * The tabulated variant interpolates linearly between breakpoints and extends
 * the last segment beyond the table.
 */
class UtilityFn {
public:
    enum class Kind { identity, power, scaled_sqrt, tabulated };

    static UtilityFn identity();
    static UtilityFn power(double exponent);
    static UtilityFn scaled_sqrt(double scale);
    static UtilityFn tabulated(std::vector<double> xs, std::vector<double> values);

    double apply(double x) const;
    /// Throws OutOfRange for v < 0.
    double invert(double v) const;

    Kind kind() const noexcept { return kind_; }
    bool is_identity() const noexcept { return kind_ == Kind::identity; }
    /// Exponent for power, scale for scaled_sqrt, unused otherwise.
    double parameter() const noexcept { return param_; }
    std::span<const double> table_x() const noexcept { return xs_; }
    std::span<const double> table_u() const noexcept { return us_; }

    friend bool operator==(const UtilityFn&, const UtilityFn&) = default;

private:
    UtilityFn(Kind kind, double param) : kind_(kind), param_(param) {}
    void validate() const;

    Kind kind_ = Kind::identity;
    double param_ = 1.0;
    std::vector<double> xs_;
    std::vector<double> us_;
};

} // namespace pandora
