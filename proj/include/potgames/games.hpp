#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "potgames/lattice.hpp"
#include "potgames/measure.hpp"
#include "potgames/potential.hpp"

namespace potgames {

/// Per-atom learner weights P, normalized so that Psi (.) P = 1.
struct WeightFunction {
    std::vector<double> values;
};

/// Normalizes raw nonnegative weights against the state's masses; throws
/// DegeneratePotentialError when the normalizer vanishes.
WeightFunction normalize_weights(const RegretState& state,
                                 std::vector<double> raw);

/// P == 1 everywhere (the trivial weight function).
WeightFunction uniform_weights(const RegretState& state);

/// Integer-game learner: weight at R proportional to
/// (phi(i, R+2) - phi(i, R-2)) / 2, read from the upper potential table at
/// column i (the column reached once the step completes).
WeightFunction learner_weights_integer(const LatticeTable& pot_table, int i,
                                       const RegretState& state);

/// Discrete-game learner at time t_i: offsets +-s_k(1+s_k) on the upper
/// table, evaluated at t_{i+1}.
WeightFunction learner_weights_discrete(const LatticeTable& pot_table,
                                        double t_i, const RegretState& state,
                                        int k);

/// Continuous-game learner: weight proportional to dphi/dR at (t, R).
WeightFunction learner_weights_continuous(const Potential& p, double t,
                                          const RegretState& state);

/// Engine variant of the continuous learner: the NormalHedge kink at R = 0
/// contributes derivative 0 (both one-sided limits vanish), and a fully
/// flat state falls back to uniform weights instead of erroring.
WeightFunction learner_weights_continuous_safe(const Potential& p, double t,
                                               const RegretState& state);

// ---------------------------------------------------------------------------
// adversaries
// ---------------------------------------------------------------------------

struct AdversaryMove {
    enum class Kind { RandomWalk, Biased, Constant };
    Kind kind = Kind::RandomWalk;
    double s = 1.0;  // declared step size
    double p = 0.5;  // P(+s) for Biased
    double l = 0.0;  // loss value for Constant

    static AdversaryMove random_walk(double s);
    static AdversaryMove biased(double s, double p);
    static AdversaryMove constant(double l, double s);
};

/// Materializes the per-atom loss distributions of a move (the same
/// distribution at every atom).
LossMap adversary_loss_map(const AdversaryMove& move, const RegretState& state);

/// Adaptive adversary: sees the step index, clock, state and the learner's
/// weights before committing to a move.
using AdversaryFn = std::function<AdversaryMove(
    long step, double t, const RegretState& state, const WeightFunction& w)>;

AdversaryFn fixed_adversary(AdversaryMove move);
AdversaryFn scripted_adversary(std::vector<AdversaryMove> moves);

/// Custom learner hook for run_game.
using LearnerFn = std::function<WeightFunction(long step, double t,
                                               const RegretState& state)>;

// ---------------------------------------------------------------------------
// shared step computations
// ---------------------------------------------------------------------------

/// Aggregate loss ell = sum of mass * P(R) * B(R) with B the per-atom mean
/// loss. The overload with a cap throws GameRuleViolation when
/// |ell| > cap (the discrete/continuous |ell| <= c s^2 game rule).
double aggregate_loss(const RegretState& state, const WeightFunction& weights,
                      const LossMap& losses);
double aggregate_loss(const RegretState& state, const WeightFunction& weights,
                      const LossMap& losses, double cap, long step);

/// Clock advance of the continuous game:
///     dt = sum of mass * H(t,R) * E[(y - ell)^2],
/// H the curvature density phi_RR / (Psi (.) phi_RR).
double time_increment(const RegretState& state, const Potential& p, double t,
                      const LossMap& losses, double ell);

/// Engine variant: NormalHedge kink/flat atoms contribute zero curvature;
/// returns 0 when the whole state carries no curvature.
double time_increment_safe(const RegretState& state, const Potential& p,
                           double t, const LossMap& losses, double ell);

/// Per-iteration variance statistic: sum of p_j E[y_j^2] - ell^2 with
/// p_j = mass_j * P_j the learner's action distribution.
double iteration_variance(const RegretState& state,
                          const WeightFunction& weights, const LossMap& losses);

// ---------------------------------------------------------------------------
// game runner
// ---------------------------------------------------------------------------

enum class LearnerKind { Potential, Uniform };

struct GameConfig {
    enum class Mode { Integer, Discrete, Continuous };
    Mode mode = Mode::Integer;

    // Integer mode
    int T = 0;
    // Discrete mode: step size sqrt(horizon)*2^-k and 2^(2k) iterations are
    // derived from (horizon, k). Continuous mode reads horizon as tau.
    double horizon = 0.0;
    int k = 0;
    // Continuous mode
    double max_step = 0.0;
    double c = 1.0;
    long max_iters = 1000000;

    // Integer/discrete modes build potential tables from `final`;
    // continuous mode scores and differentiates `potential`.
    std::optional<FinalPotential> final;
    std::optional<Potential> potential;

    LearnerKind learner = LearnerKind::Potential;
    std::vector<double> eps_list{0.1, 0.01};
    std::optional<RegretState> initial_state;  // default: point mass at 0
    bool record_details = true;
    bool validate_step_bound = true;
};

struct TraceRow {
    long iter = 0;
    double t = 0.0;
    double s = 0.0;
    double ell = 0.0;
    double dt = 0.0;
    double score = 0.0;
    std::vector<double> eps_regrets;
};

/// Optional per-step capture used by variance_clock.
struct StepDetail {
    RegretState pre_state = RegretState::point_mass(0.0);
    WeightFunction weights;
    std::vector<double> loss_mean;  // per-atom E[y]
    std::vector<double> loss_m2;    // per-atom E[y^2]
    double s = 0.0;
    double ell = 0.0;
    double dt = 0.0;
};

struct GameTrace {
    std::vector<TraceRow> rows;  // rows[0] is the pre-game snapshot
    std::vector<StepDetail> details;
    std::vector<double> eps_list;
    RegretState final_state = RegretState::point_mass(0.0);
    double v_n = 0.0;       // sum of recorded dt
    double t_reached = 0.0;
    bool reached_horizon = false;

    double initial_score() const { return rows.front().score; }
    double final_score() const { return rows.back().score; }
};

/// Runs one game loop of the configured mode. Integer and discrete modes
/// score each iteration against the adversary-guaranteed (lower) backward
/// table; continuous mode scores against the configured potential.
/// A rule break (loss support, |ell| cap, step-size bound) aborts with
/// GameRuleViolation naming the step.
GameTrace run_game(const GameConfig& config, const AdversaryFn& adversary);
GameTrace run_game(const GameConfig& config, const AdversaryFn& adversary,
                   const LearnerFn& learner);

// ---------------------------------------------------------------------------
// finite-expert front end
// ---------------------------------------------------------------------------

struct ExpertGameConfig {
    int n_experts = 2;
    long T = 0;
    Potential potential = Potential::normal_hedge();
    std::vector<double> eps_list{0.1, 0.01};
    std::uint64_t seed = 0;
    /// Loss matrix [iteration][expert] in [-1, 1]; when empty, iid fair
    /// +-1 losses are drawn from `seed`.
    std::vector<std::vector<double>> losses;
};

struct ExpertTraceRow {
    long iter = 0;
    double t = 0.0;
    double ell = 0.0;
    double dt = 0.0;
    double var_i = 0.0;
    double score = 0.0;
    std::vector<double> regrets;  // per expert, input order
    std::vector<double> eps_regrets;
};

struct ExpertTrace {
    std::vector<ExpertTraceRow> rows;
    std::vector<double> eps_list;
    double v_n = 0.0;
};

/// Runs the N-expert game (point-mass losses per expert) on the continuous
/// clock, starting from N equal atoms at regret 0.
ExpertTrace run_expert_game(const ExpertGameConfig& config);

}  // namespace potgames
