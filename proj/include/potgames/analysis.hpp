#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "potgames/games.hpp"
#include "potgames/lattice.hpp"

namespace potgames {

/// Generic study artifact: ordered parameters, named numeric series,
/// named pass/fail verdicts and the tolerances they used. Serializes to
/// JSON via io.hpp. NaN entries mark probe/level combinations that are not
/// defined (e.g. a probe time off a coarse lattice).
struct StudyReport {
    std::string study;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<std::string> probes;
    std::vector<std::pair<std::string, std::vector<double>>> values;
    std::vector<std::pair<std::string, bool>> verdicts;
    std::vector<std::pair<std::string, double>> tolerances;
    std::uint64_t seed = 0;

    bool passed() const;
    const std::vector<double>* series(const std::string& name) const;
    void add_series(std::string name, std::vector<double> v);
    void add_param(std::string key, std::string value);
};

/// Lower/upper closed-form values per refinement level at each probe,
/// against the Gaussian-convolution limit. Gate: SP{2} on the default
/// grid.
StudyReport convergence_study(const FinalPotential& final, double horizon,
                              int k_max,
                              std::span<const std::pair<double, double>> probes);

/// Verifies lower_{k+1} > lower_k + margin at shared lattice nodes for
/// consecutive levels (interior times only; at t = horizon both sides
/// equal the final and the strict inequality is vacuous), plus the
/// one-step-vs-four-quarter-steps identity. Gate: SP{4}, strict.
/// With an empty probe list the study sweeps every shared node via tables;
/// otherwise it evaluates closed forms at the given probes.
StudyReport monotonicity_study(const FinalPotential& final, double horizon,
                               int k_max,
                               std::span<const std::pair<double, double>> probes);

struct VarianceClock {
    double v_n = 0.0;
    std::vector<double> var_sequence;
};

/// V_n = sum of recorded time increments; Var_i recomputed per step from
/// the captured state/weights/loss moments. Throws std::invalid_argument
/// when the trace was recorded without per-step details.
VarianceClock variance_clock(const GameTrace& trace);

enum class BoundKind { Exp, NormalHedge, Uniform };

/// Regret-bound evaluators:
///   exp:          sqrt(2 t ln(1/eps))
///   normal_hedge: sqrt((t+1) (2 ln(1/(2 eps)) + ln(t+1)))
///   uniform:      sqrt((t+nu) (ln(t+nu) + 2 ln(1/eps)))
/// Negative bracket values (vacuous regimes) clamp to 0.
double bound_value(BoundKind kind, double t, double eps, double nu = 1.0);

/// eps-percentile regret of an equal-mass sample of regrets.
double epsilon_regret_of_values(std::span<const double> regrets, double eps);

/// Checks every recorded iteration of every trace against
/// bound_value(kind, t) for each eps in the grid; reports per-eps
/// violation counts and worst excesses.
StudyReport bound_verification(std::span<const ExpertTrace> traces,
                               BoundKind kind, std::span<const double> eps_grid,
                               double nu = 1.0);

}  // namespace potgames
