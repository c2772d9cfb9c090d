#include "potgames/potential.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "potgames/errors.hpp"

namespace potgames {

namespace {

const double kSqrt2 = std::sqrt(2.0);

bool is_gaussian(Potential::Kind k) {
    return k == Potential::Kind::GaussianFinal;
}

}  // namespace

// ---------------------------------------------------------------------------
// finite differences
// ---------------------------------------------------------------------------

namespace detail {

double fd_step(int order, double x) {
    // First-order steps use the pinned 1e-5; higher orders need larger
    // steps to keep cancellation noise below truncation at double
    // precision (h ~ eps^(1/(order+2))).
    static constexpr std::array<double, 7> base = {
        0.0, 1e-5, 1.2e-4, 1.2e-3, 2.5e-3, 6e-3, 1.1e-2};
    return base[order] * std::max(1.0, std::abs(x));
}

double fd_derivative(const std::function<double(double)>& f, double x,
                     int order) {
    if (order < 0 || order > 6)
        throw std::invalid_argument("fd_derivative: order must be in 0..6");
    if (order == 0) return f(x);

    const double h = fd_step(order, x);
    const double h2 = h * h;
    switch (order) {
        case 1:
            return (f(x + h) - f(x - h)) / (2.0 * h);
        case 2:
            return (f(x + h) - 2.0 * f(x) + f(x - h)) / h2;
        case 3:
            return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) -
                    f(x - 2 * h)) /
                   (2.0 * h * h2);
        case 4:
            return (f(x + 2 * h) - 4.0 * f(x + h) + 6.0 * f(x) -
                    4.0 * f(x - h) + f(x - 2 * h)) /
                   (h2 * h2);
        case 5:
            return (f(x + 3 * h) - 4.0 * f(x + 2 * h) + 5.0 * f(x + h) -
                    5.0 * f(x - h) + 4.0 * f(x - 2 * h) - f(x - 3 * h)) /
                   (2.0 * h * h2 * h2);
        default:
            return (f(x + 3 * h) - 6.0 * f(x + 2 * h) + 15.0 * f(x + h) -
                    20.0 * f(x) + 15.0 * f(x - h) - 6.0 * f(x - 2 * h) +
                    f(x - 3 * h)) /
                   (h2 * h2 * h2);
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// FinalPotential
// ---------------------------------------------------------------------------

FinalPotential::FinalPotential(std::function<double(double)> evaluator,
                               int declared_sp_order)
    : eval_(std::move(evaluator)), declared_sp_order_(declared_sp_order) {
    if (!eval_)
        throw std::invalid_argument("FinalPotential: empty evaluator");
    if (declared_sp_order_ != 2 && declared_sp_order_ != 4)
        throw std::invalid_argument(
            "FinalPotential: declared_sp_order must be 2 or 4");
}

// ---------------------------------------------------------------------------
// Potential
// ---------------------------------------------------------------------------

Potential Potential::exponential(double eta) {
    if (!(eta > 0.0))
        throw std::invalid_argument("Potential::exponential: eta must be > 0");
    Potential p;
    p.kind_ = Kind::Exponential;
    p.eta_ = eta;
    p.horizon_ = std::numeric_limits<double>::infinity();
    p.analytic_orders_ = {1, 2, 3, 4, 5, 6};
    return p;
}

Potential Potential::normal_hedge() {
    Potential p;
    p.kind_ = Kind::NormalHedge;
    p.horizon_ = std::numeric_limits<double>::infinity();
    p.analytic_orders_ = {1, 2, 3, 4, 5, 6};
    return p;
}

Potential Potential::gaussian_final(FinalPotential final, double horizon,
                                    int quadrature_order) {
    if (!(horizon > 0.0))
        throw std::invalid_argument(
            "Potential::gaussian_final: horizon must be > 0");
    if (quadrature_order < 1)
        throw std::invalid_argument(
            "Potential::gaussian_final: quadrature_order must be >= 1");

    const auto report = strict_positivity_report(final, 2, default_sp_grid());
    if (!report.passed)
        throw PositivityError(
            "gaussian_final: final potential fails SP{2} on the default grid");

    Potential p;
    p.kind_ = Kind::GaussianFinal;
    p.horizon_ = horizon;
    p.quad_order_ = quadrature_order;
    p.final_ = std::make_shared<const FinalPotential>(std::move(final));
    p.rule_ = std::make_shared<const GaussHermiteRule>(
        gauss_hermite(quadrature_order));
    return p;
}

void Potential::check_time(double t) const {
    if (!(t >= 0.0))
        throw std::invalid_argument("Potential: t must be >= 0");
    if (is_gaussian(kind_) && t > horizon_)
        throw std::domain_error(
            "Potential: t beyond the gaussian_final horizon");
}

double Potential::eval(double t, double r) const {
    check_time(t);
    switch (kind_) {
        case Kind::Exponential:
            return std::exp(kSqrt2 * eta_ * r - eta_ * eta_ * t);
        case Kind::NormalHedge: {
            const double u = t + 1.0;
            if (r < 0.0) return 1.0 / std::sqrt(u);
            return std::exp(r * r / (2.0 * u)) / std::sqrt(u);
        }
        case Kind::GaussianFinal:
            return gauss_expectation(
                *rule_, r, horizon_ - t,
                [this](double x) { return (*final_)(x); });
    }
    return 0.0;  // unreachable
}

double Potential::partial_r(double t, double r, int order) const {
    if (order < 1 || order > 6)
        throw std::invalid_argument("partial_r: order must be in 1..6");
    check_time(t);

    switch (kind_) {
        case Kind::Exponential: {
            const double c = kSqrt2 * eta_;
            return std::pow(c, order) * eval(t, r);
        }
        case Kind::NormalHedge: {
            if (r == 0.0)
                throw std::domain_error(
                    "partial_r: NormalHedge derivative at the kink R = 0");
            if (r < 0.0) return 0.0;
            const double u = t + 1.0;
            const double phi = eval(t, r);
            const double r2 = r * r;
            switch (order) {
                case 1: return r / u * phi;
                case 2: return (r2 + u) / (u * u) * phi;
                case 3: return r * (r2 + 3.0 * u) / (u * u * u) * phi;
                case 4:
                    return (r2 * r2 + 6.0 * u * r2 + 3.0 * u * u) /
                           (u * u * u * u) * phi;
                case 5:
                    return r * (r2 * r2 + 10.0 * u * r2 + 15.0 * u * u) /
                           (u * u * u * u * u) * phi;
                default:
                    return (r2 * r2 * r2 + 15.0 * u * r2 * r2 +
                            45.0 * u * u * r2 + 15.0 * u * u * u) /
                           (u * u * u * u * u * u) * phi;
            }
        }
        case Kind::GaussianFinal:
            return detail::fd_derivative(
                [this, t](double x) { return eval(t, x); }, r, order);
    }
    return 0.0;  // unreachable
}

double Potential::kolmogorov_residual(double t, double r) const {
    check_time(t);
    switch (kind_) {
        case Kind::Exponential: {
            const double phi = eval(t, r);
            const double dt = -eta_ * eta_ * phi;
            const double drr = 2.0 * eta_ * eta_ * phi;
            return dt + 0.5 * drr;
        }
        case Kind::NormalHedge: {
            if (r == 0.0)
                throw std::domain_error(
                    "kolmogorov_residual: NormalHedge kink at R = 0");
            const double u = t + 1.0;
            if (r < 0.0) {
                // flat branch: d/dt of u^{-1/2}, no curvature
                return -0.5 / (u * std::sqrt(u));
            }
            const double phi = eval(t, r);
            const double dt = -(u + r * r) / (2.0 * u * u) * phi;
            const double drr = (r * r + u) / (u * u) * phi;
            return dt + 0.5 * drr;
        }
        case Kind::GaussianFinal: {
            // Numeric in both variables; the time stencil falls back to
            // one-sided forms near the domain edges.
            const double h = detail::fd_step(2, t);
            auto at = [this, r](double tt) { return eval(tt, r); };
            double dt;
            if (t - h >= 0.0 && t + h <= horizon_) {
                dt = (at(t + h) - at(t - h)) / (2.0 * h);
            } else if (t + 2 * h <= horizon_) {
                dt = (-3.0 * at(t) + 4.0 * at(t + h) - at(t + 2 * h)) /
                     (2.0 * h);
            } else {
                dt = (3.0 * at(t) - 4.0 * at(t - h) + at(t - 2 * h)) /
                     (2.0 * h);
            }
            return dt + 0.5 * partial_r(t, r, 2);
        }
    }
    return 0.0;  // unreachable
}

// ---------------------------------------------------------------------------
// strict positivity
// ---------------------------------------------------------------------------

const std::vector<double>& default_sp_grid() {
    static const std::vector<double> grid = [] {
        std::vector<double> g;
        for (int i = -8; i <= 8; ++i) g.push_back(0.5 * i);
        return g;
    }();
    return grid;
}

PositivityReport strict_positivity_report(
    const std::function<double(double)>& f, int k,
    std::span<const double> grid) {
    if (k < 0 || k > 6)
        throw std::invalid_argument(
            "strict_positivity_report: order must be in 0..6");
    if (grid.empty())
        throw std::invalid_argument("strict_positivity_report: empty grid");

    PositivityReport report;
    report.order_checked = k;
    report.grid.assign(grid.begin(), grid.end());
    report.min_derivative.assign(k + 1,
                                 std::numeric_limits<double>::infinity());
    for (int order = 0; order <= k; ++order) {
        for (double x : grid) {
            const double v = detail::fd_derivative(f, x, order);
            if (v < report.min_derivative[order])
                report.min_derivative[order] = v;
        }
    }
    report.passed = true;
    for (double m : report.min_derivative) {
        if (!(m > report.tolerance)) report.passed = false;
    }
    return report;
}

PositivityReport strict_positivity_report(const FinalPotential& f, int k,
                                          std::span<const double> grid) {
    return strict_positivity_report(
        [&f](double x) { return f(x); }, k, grid);
}

PositivityReport strict_positivity_report(const Potential& p, double t, int k,
                                          std::span<const double> grid) {
    return strict_positivity_report(
        [&p, t](double x) { return p.eval(t, x); }, k, grid);
}

// ---------------------------------------------------------------------------
// divided differences
// ---------------------------------------------------------------------------

double divided_difference_g(const std::function<double(double)>& f, double r,
                            double a) {
    if (!(a > 0.0))
        throw std::invalid_argument("divided_difference_g: a must be > 0");
    const double a2 = a * a;
    return (f(r - 2 * a) - 4.0 * f(r - a) + 6.0 * f(r) - 4.0 * f(r + a) +
            f(r + 2 * a)) /
           (24.0 * a2 * a2);
}

double divided_difference_g(const FinalPotential& f, double r, double a) {
    return divided_difference_g([&f](double x) { return f(x); }, r, a);
}

double divided_difference(const std::function<double(double)>& f,
                          std::span<const double> points) {
    if (points.empty())
        throw std::invalid_argument("divided_difference: no points");
    for (size_t i = 1; i < points.size(); ++i) {
        if (!(points[i] > points[i - 1]))
            throw std::invalid_argument(
                "divided_difference: points must be strictly increasing");
    }
    std::vector<double> table(points.size());
    for (size_t i = 0; i < points.size(); ++i) table[i] = f(points[i]);
    for (size_t level = 1; level < points.size(); ++level) {
        for (size_t i = 0; i + level < points.size(); ++i) {
            table[i] =
                (table[i + 1] - table[i]) / (points[i + level] - points[i]);
        }
    }
    return table[0];
}

bool n_convexity_check(const std::function<double(double)>& f, int n,
                       std::span<const double> points) {
    if (n < 0) throw std::invalid_argument("n_convexity_check: n must be >= 0");
    if (points.size() != static_cast<size_t>(n) + 1)
        throw std::invalid_argument(
            "n_convexity_check: need exactly n+1 points");
    return divided_difference(f, points) >= 0.0;
}

bool n_convexity_check(const FinalPotential& f, int n,
                       std::span<const double> points) {
    return n_convexity_check([&f](double x) { return f(x); }, n, points);
}

// ---------------------------------------------------------------------------
// gaussian convolution
// ---------------------------------------------------------------------------

double gaussian_convolve(const std::function<double(double)>& f,
                         double horizon, double t, double r,
                         int quadrature_order) {
    if (!(horizon > 0.0))
        throw std::invalid_argument("gaussian_convolve: horizon must be > 0");
    if (quadrature_order < 1)
        throw std::invalid_argument(
            "gaussian_convolve: quadrature_order must be >= 1");
    if (t < 0.0 || t > horizon)
        throw std::domain_error("gaussian_convolve: t outside [0, horizon]");
    if (t == horizon) return f(r);
    return gauss_expectation(gauss_hermite_cached(quadrature_order), r,
                             horizon - t, f);
}

double gaussian_convolve(const FinalPotential& f, double horizon, double t,
                         double r, int quadrature_order) {
    return gaussian_convolve([&f](double x) { return f(x); }, horizon, t, r,
                             quadrature_order);
}

}  // namespace potgames
