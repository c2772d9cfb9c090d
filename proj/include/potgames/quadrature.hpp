#pragma once

#include <functional>
#include <vector>

namespace potgames {

/// Gauss-Hermite rule for integrals of the form
///     integral exp(-x^2) f(x) dx  ~=  sum_i w[i] * f(x[i])
/// Nodes are symmetric about 0; weights are strictly positive.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    int order() const { return static_cast<int>(nodes.size()); }
};

/// Builds the n-point Gauss-Hermite rule (Newton iteration on the
/// orthonormal Hermite recurrence). n must be >= 1.
GaussHermiteRule gauss_hermite(int n);

/// Cached, thread-safe access to rules by order.
const GaussHermiteRule& gauss_hermite_cached(int n);

/// E[f(X)] for X ~ Normal(mean, variance) via the n-point rule.
/// variance == 0 returns f(mean) exactly.
double gauss_expectation(const GaussHermiteRule& rule, double mean,
                         double variance, const std::function<double(double)>& f);

}  // namespace potgames
