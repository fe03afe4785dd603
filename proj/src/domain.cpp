#include "pandora/domain.hpp"

#include "pandora/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include <boost/math/distributions/normal.hpp>

namespace pandora {

double Distribution::mean() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) m += probs_[i] * support_[i];
    return m;
}

Distribution make_distribution(std::span<const std::pair<double, double>> pairs) {
    std::map<double, double> merged;
    double total = 0.0;
    for (const auto& [prize, prob] : pairs) {
        if (!std::isfinite(prize) || prize < 0.0)
            throw Error(ErrorCode::NegativePrize, "prize " + std::to_string(prize) + " is not a finite nonnegative value");
        if (!std::isfinite(prob) || prob < 0.0)
            throw Error(ErrorCode::ProbSumInvalid, "probability " + std::to_string(prob) + " is negative");
        if (prob == 0.0) continue;
        merged[prize] += prob;
        total += prob;
    }
    if (merged.empty()) throw Error(ErrorCode::EmptySupport, "no atom carries positive probability");
    if (std::abs(total - 1.0) > kInputProbTol)
        throw Error(ErrorCode::ProbSumInvalid, "probabilities sum to " + std::to_string(total));

    std::vector<double> support;
    std::vector<double> probs;
    support.reserve(merged.size());
    probs.reserve(merged.size());
    // Renormalize only past rounding noise so reloading a written distribution is exact.
    const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(merged.size());
    const double divisor = std::abs(total - 1.0) <= rounding ? 1.0 : total;
    for (const auto& [prize, prob] : merged) {
        support.push_back(prize);
        probs.push_back(prob / divisor);
    }
    return Distribution(std::move(support), std::move(probs));
}

Distribution make_distribution(std::initializer_list<std::pair<double, double>> pairs) {
    return make_distribution(std::span<const std::pair<double, double>>(pairs.begin(), pairs.size()));
}

Distribution dirac(double x) { return make_distribution({{x, 1.0}}); }

namespace {

Distribution equal_weights(const std::vector<double>& points) {
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(points.size());
    const double p = 1.0 / static_cast<double>(points.size());
    for (double x : points) pairs.emplace_back(x, p);
    return make_distribution(pairs);
}

} // namespace

Distribution discretize_uniform(double lo, double hi, std::size_t n) {
    if (n == 0 || !(lo >= 0.0) || !(hi >= lo))
        throw Error(ErrorCode::InvalidArgument, "uniform discretization needs 0 <= lo <= hi and n >= 1");
    std::vector<double> points(n);
    for (std::size_t i = 0; i < n; ++i)
        points[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    return equal_weights(points);
}

Distribution discretize_lognormal(double mu, double sigma, std::size_t n) {
    if (n == 0 || !(sigma > 0.0))
        throw Error(ErrorCode::InvalidArgument, "lognormal discretization needs sigma > 0 and n >= 1");
    const boost::math::normal_distribution<double> standard(0.0, 1.0);
    std::vector<double> points(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        points[i] = std::exp(mu + sigma * boost::math::quantile(standard, q));
    }
    return equal_weights(points);
}

double expected_excess(const Distribution& dist, double z) noexcept {
    const auto ys = dist.support();
    const auto ps = dist.probs();
    double e = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i)
        if (ys[i] > z) e += ps[i] * (ys[i] - z);
    return e;
}

Project::Project(Distribution d, double c) : dist(std::move(d)), cost(c) {
    if (!std::isfinite(c) || c < 0.0)
        throw Error(ErrorCode::InvalidArgument, "project cost must be finite and nonnegative");
}

// ---------------------------------------------------------------------------
// UtilityFn

UtilityFn UtilityFn::identity() { return UtilityFn(Kind::identity, 1.0); }

UtilityFn UtilityFn::power(double exponent) {
    if (!(exponent > 0.0 && exponent <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "power utility exponent must lie in (0, 1]");
    UtilityFn u(Kind::power, exponent);
    u.validate();
    return u;
}

UtilityFn UtilityFn::scaled_sqrt(double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw Error(ErrorCode::InvalidArgument, "sqrt utility scale must be positive");
    UtilityFn u(Kind::scaled_sqrt, scale);
    u.validate();
    return u;
}

UtilityFn UtilityFn::tabulated(std::vector<double> xs, std::vector<double> values) {
    if (xs.size() < 2 || xs.size() != values.size())
        throw Error(ErrorCode::InvalidArgument, "tabulated utility needs at least two (x, u) pairs");
    if (xs.front() != 0.0 || values.front() != 0.0)
        throw Error(ErrorCode::InvalidArgument, "tabulated utility must start at (0, 0)");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1]) || !(values[i] > values[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "tabulated utility must be strictly increasing");
    }
    UtilityFn u(Kind::tabulated, 0.0);
    u.xs_ = std::move(xs);
    u.us_ = std::move(values);
    u.validate();
    return u;
}

double UtilityFn::apply(double x) const {
    if (x < 0.0) throw Error(ErrorCode::OutOfRange, "utility evaluated at negative money");
    switch (kind_) {
    case Kind::identity: return x;
    case Kind::power: return param_ == 1.0 ? x : std::pow(x, param_);
    case Kind::scaled_sqrt: return param_ * std::sqrt(x);
    case Kind::tabulated: {
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
        if (hi >= xs_.size()) hi = xs_.size() - 1;
        const std::size_t lo = hi - 1;
        const double slope = (us_[hi] - us_[lo]) / (xs_[hi] - xs_[lo]);
        return us_[lo] + slope * (x - xs_[lo]);
    }
    }
    return x;
}

double UtilityFn::invert(double v) const {
    if (v < 0.0) throw Error(ErrorCode::OutOfRange, "utility level below u(0) = 0");
    switch (kind_) {
    case Kind::identity: return v;
    case Kind::power: return param_ == 1.0 ? v : std::pow(v, 1.0 / param_);
    case Kind::scaled_sqrt: {
        const double r = v / param_;
        return r * r;
    }
    case Kind::tabulated: {
        const auto it = std::upper_bound(us_.begin(), us_.end(), v);
        std::size_t hi = static_cast<std::size_t>(it - us_.begin());
        if (hi >= us_.size()) hi = us_.size() - 1;
        const std::size_t lo = hi - 1;
        const double slope = (us_[hi] - us_[lo]) / (xs_[hi] - xs_[lo]);
        return xs_[lo] + (v - us_[lo]) / slope;
    }
    }
    return v;
}

void UtilityFn::validate() const {
    constexpr int kProbes = 1000;
    const double top = kind_ == Kind::tabulated ? 1.5 * xs_.back() : 1000.0;
    const double step = top / kProbes;
    double prev = apply(0.0);
    if (prev != 0.0) throw Error(ErrorCode::InvalidArgument, "utility must satisfy u(0) = 0");
    double prev_slope = INFINITY;
    for (int i = 1; i <= kProbes; ++i) {
        const double cur = apply(step * i);
        const double slope = (cur - prev) / step;
        if (!(cur > prev)) throw Error(ErrorCode::InvalidArgument, "utility is not strictly increasing on the probe grid");
        if (kind_ != Kind::identity && slope > prev_slope + 1e-9 * std::max(1.0, std::abs(prev_slope)))
            throw Error(ErrorCode::InvalidArgument, "utility is not concave on the probe grid");
        prev = cur;
        prev_slope = slope;
    }
}

} // namespace pandora
