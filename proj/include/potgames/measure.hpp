#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "potgames/potential.hpp"

namespace potgames {

inline constexpr double kMassTolerance = 1e-12;
inline constexpr double kMergeTolerance = 1e-9;
inline constexpr std::size_t kMaxAtoms = std::size_t{1} << 20;

struct Atom {
    double regret = 0.0;
    double mass = 0.0;
};

/// Finite atomic probability measure over regret values: the game state.
/// Atoms are sorted by regret; masses are positive and sum to 1. Unlabeled
/// states merge atoms closer than kMergeTolerance (mass-weighted). Labeled
/// states (one label per atom, finite-expert mode) never merge.
/// Immutable after construction.
class RegretState {
public:
    static RegretState point_mass(double regret);
    static RegretState from_atoms(std::vector<Atom> atoms);
    static RegretState from_labeled(std::vector<Atom> atoms,
                                    std::vector<std::string> labels);
    /// N experts, equal mass, all at regret 0, labels "0".."N-1".
    static RegretState uniform_experts(int n);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<std::string>& labels() const { return labels_; }
    bool labeled() const { return !labels_.empty(); }
    std::size_t size() const { return atoms_.size(); }

    double min_regret() const { return atoms_.front().regret; }
    double max_regret() const { return atoms_.back().regret; }
    double mean() const;
    double variance() const;
    /// Probability mass of {regret >= r}.
    double tail_mass(double r) const;

private:
    RegretState() = default;
    std::vector<Atom> atoms_;
    std::vector<std::string> labels_;
};

/// One finite-support loss distribution: (loss value, probability) pairs.
struct LossDist {
    std::vector<std::pair<double, double>> points;

    double mean() const;
    double second_moment() const;
};

/// Adversary move: a per-atom loss distribution plus the declared step
/// size s. Every support point must lie in [-s, +s] and each per-atom
/// distribution must sum to 1.
class LossMap {
public:
    LossMap(double step_size, std::vector<LossDist> per_atom);
    /// The same distribution replicated for each of n atoms.
    static LossMap uniform(double step_size, LossDist dist, std::size_t n);

    double step_size() const { return step_size_; }
    const std::vector<LossDist>& per_atom() const { return per_atom_; }

private:
    double step_size_;
    std::vector<LossDist> per_atom_;
};

/// Nonincreasing map from regret thresholds to tail probabilities.
struct BoundFunction {
    std::function<double(double)> g;
};

/// Score of a state: sum of mass * phi(t, regret).
double score(const RegretState& state, const Potential& p, double t);
double score(const RegretState& state,
             const std::function<double(double)>& phi);

/// Regret at the top eps-percentile by mass: the regret of the atom at
/// which the descending cumulative mass first reaches eps (ties include
/// the whole atom).
double epsilon_regret(const RegretState& state, double eps);

/// Distribution of a sum of n iid fair +-s coin flips: atoms at (2j-n)s
/// with mass C(n,j)/2^n.
RegretState binomial_dist(int n, double s);

/// One game-state update: atom (R, m) expands to (R + ell - y, m*q(y))
/// over the support of its loss distribution, then the result is
/// sorted/merged/renormalized. Regret rises when an action's loss y falls
/// below the learner's loss ell.
RegretState convolve_step(const RegretState& state, const LossMap& losses,
                          double ell);

/// Simultaneous regret bound: true iff tail_mass(R) <= G(R) + slack at
/// every grid point. Also verifies that G is nonincreasing with range in
/// [0,1] across the tested points.
bool srb_check(const RegretState& state, const BoundFunction& bound,
               std::span<const double> grid, double slack = kMassTolerance);

/// Average potential score, to be compared with 1 by the caller. Throws
/// std::domain_error if phi is nonpositive at some atom.
double apb_score(const RegretState& state,
                 const std::function<double(double)>& phi);

}  // namespace potgames
