#pragma once

#include <cstddef>
#include <memory>

#include "potgames/potential.hpp"

namespace potgames {

/// Triangular backward-induction table of a lower or upper game potential.
///
/// Nodes are (i, j) with column i in 0..steps() and j in 0..i, located at
/// t = i * time_step() and R = (2j - i) * r_spacing(). Column steps()
/// holds the final potential exactly; every interior node is the average
/// of its two successors, i.e. one +-r_spacing() hop back in regret.
///
/// Lower tables hop by the adversary step s, upper tables by s(1+s); the
/// upper offsets leave the adversary's lattice, so the upper table lives
/// on its own lattice of spacing s(1+s) rather than interpolating.
class LatticeTable {
public:
    enum class Side { Lower, Upper };

    int steps() const { return steps_; }
    double time_step() const { return dt_; }
    double r_spacing() const { return dr_; }
    Side side() const { return side_; }
    double horizon() const { return horizon_; }
    /// Refinement level k for discrete-game tables, -1 for integer-game
    /// tables.
    int level() const { return level_; }
    const FinalPotential& final_potential() const { return *final_; }
    std::size_t node_count() const { return values_.size(); }

    double t_of(int i) const { return i * dt_; }
    double r_of(int i, int j) const { return (2.0 * j - i) * dr_; }

    double value(int i, int j) const;

    /// Potential at column i and arbitrary regret r: a table lookup when r
    /// sits on this lattice, otherwise the exact binomial closed form from
    /// the final potential (no interpolation).
    double eval(int i, double r) const;

private:
    friend LatticeTable backward_table(const FinalPotential&, double, int,
                                       LatticeTable::Side);
    friend LatticeTable integer_lattice_table(const FinalPotential&, int,
                                              LatticeTable::Side);
    LatticeTable() = default;
    void fill();

    int steps_ = 0;
    double dt_ = 0.0;
    double dr_ = 0.0;
    double horizon_ = 0.0;
    int level_ = -1;
    Side side_ = Side::Lower;
    std::shared_ptr<const FinalPotential> final_;
    std::vector<double> values_;  // triangular, row i at offset i(i+1)/2
};

/// E[f(r0 + B(n, sigma))] by exact binomial summation (log-space
/// coefficients once n exceeds 60).
double binomial_expectation(const std::function<double(double)>& f, int n,
                            double sigma, double r0);

/// Adversary step size of the level-k discrete game: sqrt(horizon) * 2^-k.
double discrete_step_size(double horizon, int k);

/// Level-k discrete-game table over 2^(2k) steps of duration s_k^2.
/// Requires the final to pass SP{2} on the default grid; k is capped at 12
/// and by a node-count budget.
LatticeTable backward_table(const FinalPotential& final, double horizon,
                            int k, LatticeTable::Side side);

/// Integer-game table: T unit steps, regret hops of 1 (lower) or 2
/// (upper). Same SP{2} gate.
LatticeTable integer_lattice_table(const FinalPotential& final, int T,
                                   LatticeTable::Side side);

/// Exact discrete-game potential value: the expectation of the final under
/// r0 + B(2^(2k) - i, sigma) with sigma = s_k (lower) or s_k(1+s_k)
/// (upper).
double closed_form_potential(const FinalPotential& final, double horizon,
                             int k, int i, double r0,
                             LatticeTable::Side side);

/// Integer-game closed form: r0 + B(T - i, 1) (lower) or B(T - i, 2)
/// (upper).
double closed_form_integer(const FinalPotential& final, int T, int i,
                           double r0, LatticeTable::Side side);

}  // namespace potgames
