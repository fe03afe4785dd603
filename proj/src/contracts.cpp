#include "pandora/contracts.hpp"

#include "pandora/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pandora {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Relative tolerance used for jump and sign decisions.
double shape_tol(const PiecewiseLinear& f) { return 1e-12 * f.scale(); }

} // namespace

double PiecewiseLinear::operator()(double y) const noexcept {
    const std::size_t j = segment_of(y);
    return values[j] + slopes[j] * (y - breaks[j]);
}

std::size_t PiecewiseLinear::segment_of(double y) const noexcept {
    const auto it = std::upper_bound(breaks.begin(), breaks.end(), y);
    return it == breaks.begin() ? 0 : static_cast<std::size_t>(it - breaks.begin()) - 1;
}

double PiecewiseLinear::left_limit(std::size_t j) const noexcept {
    return values[j - 1] + slopes[j - 1] * (breaks[j] - breaks[j - 1]);
}

double PiecewiseLinear::scale() const noexcept {
    double s = 1.0;
    for (double b : breaks) s = std::max(s, std::abs(b));
    for (double v : values) s = std::max(s, std::abs(v));
    return s;
}

double sup_difference(const PiecewiseLinear& f, const PiecewiseLinear& g) {
    std::vector<double> grid(f.breaks);
    grid.insert(grid.end(), g.breaks.begin(), g.breaks.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double best = -kInf;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double a = grid[k];
        const std::size_t jf = f.segment_of(a);
        const std::size_t jg = g.segment_of(a);
        best = std::max(best, f(a) - g(a));
        const double slope = f.slopes[jf] - g.slopes[jg];
        if (k + 1 < grid.size()) {
            // Both functions are linear on [a, b); take the left limit at b.
            const double b = grid[k + 1];
            const double fl = f.values[jf] + f.slopes[jf] * (b - f.breaks[jf]);
            const double gl = g.values[jg] + g.slopes[jg] * (b - g.breaks[jg]);
            best = std::max(best, fl - gl);
        } else if (slope > 1e-15) {
            return kInf;
        }
    }
    return best;
}

PiecewiseLinear debt_bound(double s0) {
    if (s0 > 0.0) return PiecewiseLinear{{0.0, s0}, {0.0, 0.0}, {0.0, 1.0}};
    return PiecewiseLinear{{0.0}, {-s0}, {1.0}};
}

// ---------------------------------------------------------------------------
// Contract

Contract::Contract(Kind kind, Params params, PiecewiseLinear pwl)
    : kind_(kind), params_(params), pwl_(std::move(pwl)) {
    const auto& b = pwl_.breaks;
    if (b.empty() || b.size() != pwl_.values.size() || b.size() != pwl_.slopes.size())
        throw Error(ErrorCode::InvalidArgument, "contract needs matching breakpoints, values and slopes");
    if (b.front() != 0.0) throw Error(ErrorCode::InvalidArgument, "contract breakpoints must start at 0");
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (!std::isfinite(b[j]) || !std::isfinite(pwl_.values[j]) || !std::isfinite(pwl_.slopes[j]))
            throw Error(ErrorCode::InvalidArgument, "contract data must be finite");
        if (j > 0 && !(b[j] > b[j - 1]))
            throw Error(ErrorCode::InvalidArgument, "contract breakpoints must be strictly increasing");
    }
    const double tol = shape_tol(pwl_);
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (pwl_.values[j] < -tol)
            throw Error(ErrorCode::InvalidArgument, "contract violates limited liability at y = " + std::to_string(b[j]));
        if (j > 0) {
            if (pwl_.left_limit(j) < -tol)
                throw Error(ErrorCode::InvalidArgument, "contract violates limited liability below y = " + std::to_string(b[j]));
            if (pwl_.jump(j) < -tol)
                throw Error(ErrorCode::InvalidArgument, "contract jumps downward at y = " + std::to_string(b[j]));
        }
    }
    if (pwl_.slopes.back() < 0.0)
        throw Error(ErrorCode::InvalidArgument, "contract final slope must be nonnegative (limited liability)");
}

Contract Contract::pure_debt(double z) {
    if (!(z >= 0.0) || !std::isfinite(z)) throw Error(ErrorCode::InvalidArgument, "debt level must be finite and >= 0");
    PiecewiseLinear f = z > 0.0 ? PiecewiseLinear{{0.0, z}, {0.0, 0.0}, {0.0, 1.0}} : PiecewiseLinear{{0.0}, {0.0}, {1.0}};
    return Contract(Kind::pure_debt, Params{.z = z, .alpha = 1.0}, std::move(f));
}

Contract Contract::debt_plus_equity(double z, double alpha) {
    if (!(z >= 0.0) || !std::isfinite(z)) throw Error(ErrorCode::InvalidArgument, "debt level must be finite and >= 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidArgument, "equity share must be >= 0");
    PiecewiseLinear f = z > 0.0 ? PiecewiseLinear{{0.0, z}, {0.0, 0.0}, {0.0, alpha}} : PiecewiseLinear{{0.0}, {0.0}, {alpha}};
    return Contract(Kind::debt_plus_equity, Params{.z = z, .alpha = alpha}, std::move(f));
}

Contract Contract::capped_earnout(double z, double wbar) {
    if (!(z >= 0.0) || !std::isfinite(z)) throw Error(ErrorCode::InvalidArgument, "debt level must be finite and >= 0");
    if (!(wbar >= 0.0) || !std::isfinite(wbar)) throw Error(ErrorCode::InvalidArgument, "cap must be finite and >= 0");
    PiecewiseLinear f;
    if (z > 0.0) {
        f.breaks.push_back(0.0);
        f.values.push_back(0.0);
        f.slopes.push_back(0.0);
    }
    if (wbar > 0.0) {
        f.breaks.push_back(z);
        f.values.push_back(0.0);
        f.slopes.push_back(1.0);
        f.breaks.push_back(z + wbar);
        f.values.push_back(wbar);
        f.slopes.push_back(0.0);
    } else if (f.breaks.empty()) {
        f = PiecewiseLinear{{0.0}, {0.0}, {0.0}};
    }
    return Contract(Kind::capped_earnout, Params{.z = z, .wbar = wbar}, std::move(f));
}

Contract Contract::linear(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidArgument, "linear share must be >= 0");
    return Contract(Kind::linear, Params{.alpha = alpha}, PiecewiseLinear{{0.0}, {0.0}, {alpha}});
}

Contract Contract::constant(double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) throw Error(ErrorCode::InvalidArgument, "constant wage must be >= 0");
    return Contract(Kind::constant, Params{.value = value}, PiecewiseLinear{{0.0}, {value}, {0.0}});
}

Contract Contract::piecewise(std::vector<double> breaks, std::vector<double> values, std::vector<double> slopes) {
    return Contract(Kind::piecewise, Params{}, PiecewiseLinear{std::move(breaks), std::move(values), std::move(slopes)});
}

double Contract::eval(double y) const {
    if (!(y >= 0.0)) throw Error(ErrorCode::NegativePrize, "contract evaluated at negative prize");
    return std::max(0.0, pwl_(y));
}

// ---------------------------------------------------------------------------

StructureReport structure(const Contract& w) {
    const auto& f = w.shape();
    const double tol = shape_tol(f);
    StructureReport r;
    r.sup_left_derivative = -kInf;
    for (std::size_t j = 0; j < f.breaks.size(); ++j) {
        const double s = f.slopes[j];
        r.sup_left_derivative = std::max(r.sup_left_derivative, s);
        if (s < 0.0) r.wage_monotone = false;
        if (s > 1.0) r.principal_monotone = false;
        if (j > 0 && f.jump(j) > tol) {
            r.principal_monotone = false;
            r.sup_left_derivative = kInf;
        }
    }
    r.doubly_monotone = r.wage_monotone && r.principal_monotone;
    return r;
}

double expected_wage(const Contract& w, const Distribution& dist) {
    const auto ys = dist.support();
    const auto ps = dist.probs();
    double e = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) e += ps[i] * w(ys[i]);
    return e;
}

bool satisfies_mdl(const Contract& w, double s0, double tol) {
    return sup_difference(w.shape(), debt_bound(s0)) <= tol;
}

} // namespace pandora
