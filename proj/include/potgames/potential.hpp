#pragma once

#include <functional>
#include <memory>
#include <set>
#include <span>
#include <vector>

#include "potgames/quadrature.hpp"

namespace potgames {

/// Derivative values below this floor do not count as strictly positive.
inline constexpr double kPositivityTolerance = 1e-12;

/// A candidate end-of-game potential: a scalar map on regret plus the
/// positivity degree its author claims for it. The claim is never trusted;
/// gates that need SP{2} or SP{4} re-validate with
/// strict_positivity_report before relying on it.
class FinalPotential {
public:
    FinalPotential(std::function<double(double)> evaluator,
                   int declared_sp_order);

    double operator()(double r) const { return eval_(r); }
    int declared_sp_order() const { return declared_sp_order_; }

private:
    std::function<double(double)> eval_;
    int declared_sp_order_;
};

/// Result of probing a function's derivatives 0..order_checked on a grid.
struct PositivityReport {
    int order_checked = 0;
    double tolerance = kPositivityTolerance;
    std::vector<double> grid;            // R values probed
    std::vector<double> min_derivative;  // per order 0..order_checked
    bool passed = false;
};

/// Time-indexed potential phi(t, R). Three kinds:
///   exponential(eta):  exp(sqrt(2) * eta * R - eta^2 * t)
///   normal_hedge:      exp(R^2 / (2 (t+1))) / sqrt(t+1) for R >= 0,
///                      1 / sqrt(t+1) for R < 0
///   gaussian_final:    E[final(X)], X ~ Normal(R, horizon - t),
///                      defined for 0 <= t <= horizon only
///
/// Immutable after construction; all member functions are const and
/// thread-safe.
class Potential {
public:
    enum class Kind { Exponential, NormalHedge, GaussianFinal };

    static Potential exponential(double eta);
    static Potential normal_hedge();
    /// Validates SP{2} of `final` on the default grid; throws
    /// PositivityError if the check fails.
    static Potential gaussian_final(FinalPotential final, double horizon,
                                    int quadrature_order = 64);

    Kind kind() const { return kind_; }
    double eta() const { return eta_; }
    /// Horizon of a gaussian_final potential; +inf for anytime kinds.
    double horizon() const { return horizon_; }

    /// Orders 1..6 whose R-derivatives have closed forms.
    const std::set<int>& analytic_derivative_orders() const {
        return analytic_orders_;
    }

    double eval(double t, double r) const;

    /// d^order phi / dR^order, order in 1..6. Analytic where available,
    /// otherwise central finite differences. NormalHedge derivatives are a
    /// domain error at the kink R == 0.
    double partial_r(double t, double r, int order) const;

    /// dphi/dt + (1/2) d^2 phi/dR^2. Zero (up to rounding/quadrature) for
    /// solutions of the backward equation.
    double kolmogorov_residual(double t, double r) const;

private:
    Potential() = default;

    void check_time(double t) const;

    Kind kind_ = Kind::Exponential;
    double eta_ = 0.0;
    double horizon_ = 0.0;
    int quad_order_ = 0;
    std::shared_ptr<const FinalPotential> final_;
    std::shared_ptr<const GaussHermiteRule> rule_;
    std::set<int> analytic_orders_;
};

/// R grid used by construction-time SP gates: [-4, 4] in steps of 0.5.
const std::vector<double>& default_sp_grid();

/// Probes f and its derivatives 0..k (all via central finite differences,
/// independent of any analytic path) at every grid point. Passes iff every
/// probed value exceeds kPositivityTolerance.
PositivityReport strict_positivity_report(
    const std::function<double(double)>& f, int k, std::span<const double> grid);

PositivityReport strict_positivity_report(const FinalPotential& f, int k,
                                          std::span<const double> grid);

/// Potential restricted to a fixed time slice.
PositivityReport strict_positivity_report(const Potential& p, double t, int k,
                                          std::span<const double> grid);

/// Fourth-order divided difference of f on the arithmetic grid
/// {R-2a, R-a, R, R+a, R+2a}:
///     (f(R-2a) - 4 f(R-a) + 6 f(R) - 4 f(R+a) + f(R+2a)) / (24 a^4)
double divided_difference_g(const FinalPotential& f, double r, double a);
double divided_difference_g(const std::function<double(double)>& f, double r,
                            double a);

/// Recursive (Newton) divided difference [x_0, ..., x_n; f] over strictly
/// increasing points.
double divided_difference(const std::function<double(double)>& f,
                          std::span<const double> points);

/// n-convexity test: true iff the n-th order divided difference over the
/// given n+1 strictly increasing points is >= 0.
bool n_convexity_check(const FinalPotential& f, int n,
                       std::span<const double> points);
bool n_convexity_check(const std::function<double(double)>& f, int n,
                       std::span<const double> points);

/// E[f(X)] for X ~ Normal(r, horizon - t) by Gauss-Hermite quadrature.
/// Exact (no quadrature) at t == horizon.
double gaussian_convolve(const FinalPotential& f, double horizon, double t,
                         double r, int quadrature_order = 64);
double gaussian_convolve(const std::function<double(double)>& f,
                         double horizon, double t, double r,
                         int quadrature_order = 64);

namespace detail {
/// Central finite-difference derivative of the given order (0..6) with the
/// project-pinned step schedule. Order 0 returns f(x).
double fd_derivative(const std::function<double(double)>& f, double x,
                     int order);
double fd_step(int order, double x);
}  // namespace detail

}  // namespace potgames
