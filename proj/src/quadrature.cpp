#include "potgames/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace potgames {

namespace {

// pi^{-1/4}, the value of the zeroth orthonormal Hermite polynomial.
constexpr double kPiToMinusQuarter = 0.7511255444649425;

// Evaluates the orthonormal Hermite polynomial of degree n at z and the
// (scaled) value of degree n-1, via the three-term recurrence.
void hermite_pair(int n, double z, double& pn, double& pn1) {
    double p1 = kPiToMinusQuarter;
    double p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
    }
    pn = p1;
    pn1 = p2;
}

}  // namespace

GaussHermiteRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");

    GaussHermiteRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);

    const int half = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < half; ++i) {
        // Initial guesses for the i-th largest root (largest first).
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) -
                1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[i - 2];
        }

        double pn = 0.0, pn1 = 0.0, pp = 0.0;
        for (int it = 0; it < 64; ++it) {
            hermite_pair(n, z, pn, pn1);
            pp = std::sqrt(2.0 * n) * pn1;  // derivative of orthonormal H_n
            const double dz = pn / pp;
            z -= dz;
            if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        hermite_pair(n, z, pn, pn1);
        pp = std::sqrt(2.0 * n) * pn1;

        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        rule.weights[i] = 2.0 / (pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }

    // the Newton sweep fills largest roots first; hand back sorted nodes
    std::vector<std::pair<double, double>> paired(n);
    for (int i = 0; i < n; ++i) paired[i] = {rule.nodes[i], rule.weights[i]};
    std::sort(paired.begin(), paired.end());
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = paired[i].first;
        rule.weights[i] = paired[i].second;
    }
    return rule;
}

const GaussHermiteRule& gauss_hermite_cached(int n) {
    static std::mutex mu;
    static std::map<int, GaussHermiteRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_hermite(n)).first;
    return it->second;
}

double gauss_expectation(const GaussHermiteRule& rule, double mean,
                         double variance,
                         const std::function<double(double)>& f) {
    if (variance < 0.0)
        throw std::invalid_argument("gauss_expectation: negative variance");
    if (variance == 0.0) return f(mean);

    // X = mean + sqrt(2 * variance) * u with u ~ exp(-u^2)/sqrt(pi).
    const double scale = std::sqrt(2.0 * variance);
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::acos(-1.0));
    double acc = 0.0;
    for (int i = 0; i < rule.order(); ++i) {
        acc += rule.weights[i] * f(mean + scale * rule.nodes[i]);
    }
    return acc * inv_sqrt_pi;
}

}  // namespace potgames
