#include "potgames/lattice.hpp"

#include <cmath>
#include <stdexcept>

#include "potgames/errors.hpp"

namespace potgames {

namespace {

constexpr int kMaxLevel = 12;
// Full triangular storage budget: (n+1)(n+2)/2 nodes must fit here.
constexpr std::size_t kMaxNodes = std::size_t{1} << 24;

std::size_t triangle_nodes(long n) {
    return static_cast<std::size_t>((n + 1) * (n + 2) / 2);
}

void require_sp2(const FinalPotential& final, const char* who) {
    const auto report = strict_positivity_report(final, 2, default_sp_grid());
    if (!report.passed)
        throw PositivityError(std::string(who) +
                              ": final potential fails SP{2} on the default "
                              "grid");
}

}  // namespace

double binomial_expectation(const std::function<double(double)>& f, int n,
                            double sigma, double r0) {
    if (n < 0)
        throw std::invalid_argument("binomial_expectation: n must be >= 0");
    if (!(sigma > 0.0))
        throw std::invalid_argument("binomial_expectation: sigma must be > 0");
    if (n == 0) return f(r0);

    double acc = 0.0;
    if (n <= 60) {
        double w = std::ldexp(1.0, -n);
        for (int j = 0; j <= n; ++j) {
            acc += w * f(r0 + (2.0 * j - n) * sigma);
            w = w * (n - j) / (j + 1.0);
        }
    } else {
        const double ln2 = std::log(2.0);
        const double lg_n1 = std::lgamma(n + 1.0);
        for (int j = 0; j <= n; ++j) {
            const double lw = lg_n1 - std::lgamma(j + 1.0) -
                              std::lgamma(n - j + 1.0) - n * ln2;
            const double w = std::exp(lw);
            if (w > 0.0) acc += w * f(r0 + (2.0 * j - n) * sigma);
        }
    }
    return acc;
}

double discrete_step_size(double horizon, int k) {
    if (!(horizon > 0.0))
        throw std::invalid_argument("discrete_step_size: horizon must be > 0");
    if (k < 0)
        throw std::invalid_argument("discrete_step_size: k must be >= 0");
    return std::sqrt(horizon) * std::ldexp(1.0, -k);
}

// ---------------------------------------------------------------------------
// LatticeTable
// ---------------------------------------------------------------------------

double LatticeTable::value(int i, int j) const {
    if (i < 0 || i > steps_ || j < 0 || j > i)
        throw std::invalid_argument("LatticeTable::value: node out of range");
    return values_[static_cast<std::size_t>(i) * (i + 1) / 2 + j];
}

double LatticeTable::eval(int i, double r) const {
    if (i < 0 || i > steps_)
        throw std::invalid_argument("LatticeTable::eval: column out of range");
    const double j_real = (r / dr_ + i) / 2.0;
    const double j_round = std::round(j_real);
    if (std::abs(j_real - j_round) < 1e-9 * std::max(1.0, std::abs(j_real)) &&
        j_round >= 0.0 && j_round <= i) {
        return value(i, static_cast<int>(j_round));
    }
    return binomial_expectation([this](double x) { return (*final_)(x); },
                                steps_ - i, dr_, r);
}

void LatticeTable::fill() {
    values_.assign(triangle_nodes(steps_), 0.0);
    auto at = [this](int i, int j) -> double& {
        return values_[static_cast<std::size_t>(i) * (i + 1) / 2 + j];
    };
    for (int j = 0; j <= steps_; ++j)
        at(steps_, j) = (*final_)(r_of(steps_, j));
    for (int i = steps_ - 1; i >= 0; --i) {
        for (int j = 0; j <= i; ++j)
            at(i, j) = 0.5 * (at(i + 1, j) + at(i + 1, j + 1));
    }
}

LatticeTable backward_table(const FinalPotential& final, double horizon,
                            int k, LatticeTable::Side side) {
    if (!(horizon > 0.0))
        throw std::invalid_argument("backward_table: horizon must be > 0");
    if (k < 0) throw std::invalid_argument("backward_table: k must be >= 0");
    if (k > kMaxLevel)
        throw std::length_error("backward_table: k exceeds the level cap (12)");
    const long n = 1L << (2 * k);
    if (triangle_nodes(n) > kMaxNodes)
        throw std::length_error(
            "backward_table: lattice exceeds the node budget; use "
            "closed_form_potential for probes at this level");
    require_sp2(final, "backward_table");

    const double s = discrete_step_size(horizon, k);
    LatticeTable table;
    table.steps_ = static_cast<int>(n);
    table.dt_ = s * s;
    table.dr_ = side == LatticeTable::Side::Lower ? s : s * (1.0 + s);
    table.horizon_ = horizon;
    table.level_ = k;
    table.side_ = side;
    table.final_ = std::make_shared<const FinalPotential>(final);
    table.fill();
    return table;
}

LatticeTable integer_lattice_table(const FinalPotential& final, int T,
                                   LatticeTable::Side side) {
    if (T < 1)
        throw std::invalid_argument("integer_lattice_table: T must be >= 1");
    if (triangle_nodes(T) > kMaxNodes)
        throw std::length_error("integer_lattice_table: T too large");
    require_sp2(final, "integer_lattice_table");

    LatticeTable table;
    table.steps_ = T;
    table.dt_ = 1.0;
    table.dr_ = side == LatticeTable::Side::Lower ? 1.0 : 2.0;
    table.horizon_ = static_cast<double>(T);
    table.level_ = -1;
    table.side_ = side;
    table.final_ = std::make_shared<const FinalPotential>(final);
    table.fill();
    return table;
}

double closed_form_potential(const FinalPotential& final, double horizon,
                             int k, int i, double r0,
                             LatticeTable::Side side) {
    if (k < 0 || k > kMaxLevel)
        throw std::invalid_argument("closed_form_potential: k out of range");
    const long n = 1L << (2 * k);
    if (i < 0 || i > n)
        throw std::invalid_argument(
            "closed_form_potential: i must be in 0..2^(2k)");
    const double s = discrete_step_size(horizon, k);
    const double sigma = side == LatticeTable::Side::Lower ? s : s * (1.0 + s);
    return binomial_expectation([&final](double x) { return final(x); },
                                static_cast<int>(n) - i, sigma, r0);
}

double closed_form_integer(const FinalPotential& final, int T, int i,
                           double r0, LatticeTable::Side side) {
    if (T < 0) throw std::invalid_argument("closed_form_integer: T must be >= 0");
    if (i < 0 || i > T)
        throw std::invalid_argument("closed_form_integer: i must be in 0..T");
    const double sigma = side == LatticeTable::Side::Lower ? 1.0 : 2.0;
    return binomial_expectation([&final](double x) { return final(x); },
                                T - i, sigma, r0);
}

}  // namespace potgames
