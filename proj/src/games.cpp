#include "potgames/games.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "potgames/errors.hpp"

namespace potgames {

namespace {

// NormalHedge derivatives at the kink R = 0 are a domain error in the
// potential module; the engine instead uses the r -> 0+ limit of the
// convex branch (the side losses move into). Odd orders vanish there, so
// kink atoms still get zero weight, while the curvature stays positive
// and the clock keeps pace with the loss variance. Without this the clock
// stalls on the all-zero start state and the anytime bound breaks.
double engine_partial_r(const Potential& p, double t, double r, int order) {
    if (p.kind() == Potential::Kind::NormalHedge && r == 0.0) {
        const double u = t + 1.0;
        const double phi = p.eval(t, 0.0);
        switch (order) {
            case 2: return phi / u;
            case 4: return 3.0 * phi / (u * u);
            case 6: return 15.0 * phi / (u * u * u);
            default: return 0.0;
        }
    }
    return p.partial_r(t, r, order);
}

void check_sizes(const RegretState& state, const WeightFunction& weights,
                 const LossMap& losses, const char* who) {
    if (weights.values.size() != state.size() ||
        losses.per_atom().size() != state.size())
        throw std::invalid_argument(std::string(who) +
                                    ": state/weights/losses misaligned");
}

}  // namespace

// ---------------------------------------------------------------------------
// weights
// ---------------------------------------------------------------------------

WeightFunction normalize_weights(const RegretState& state,
                                 std::vector<double> raw) {
    if (raw.size() != state.size())
        throw std::invalid_argument("normalize_weights: size mismatch");
    double z = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] < 0.0)
            throw std::invalid_argument(
                "normalize_weights: weights must be nonnegative");
        z += state.atoms()[i].mass * raw[i];
    }
    if (!(z > 0.0))
        throw DegeneratePotentialError(
            "normalize_weights: potential carries no weight information "
            "(normalizer is zero)");
    for (double& w : raw) w /= z;
    return WeightFunction{std::move(raw)};
}

WeightFunction uniform_weights(const RegretState& state) {
    return WeightFunction{std::vector<double>(state.size(), 1.0)};
}

WeightFunction learner_weights_integer(const LatticeTable& pot_table, int i,
                                       const RegretState& state) {
    std::vector<double> raw(state.size());
    for (std::size_t a = 0; a < state.size(); ++a) {
        const double r = state.atoms()[a].regret;
        raw[a] = 0.5 * (pot_table.eval(i, r + 2.0) - pot_table.eval(i, r - 2.0));
    }
    return normalize_weights(state, std::move(raw));
}

WeightFunction learner_weights_discrete(const LatticeTable& pot_table,
                                        double t_i, const RegretState& state,
                                        int k) {
    if (pot_table.level() != k)
        throw std::invalid_argument(
            "learner_weights_discrete: table level does not match k");
    const double dt = pot_table.time_step();
    const double col_real = t_i / dt;
    const int col = static_cast<int>(std::round(col_real));
    if (std::abs(col_real - col) > 1e-9 || col < 0 || col >= pot_table.steps())
        throw std::invalid_argument(
            "learner_weights_discrete: t_i is not an interior lattice time");
    const double off = pot_table.r_spacing();  // s_k (1 + s_k) on upper tables
    std::vector<double> raw(state.size());
    for (std::size_t a = 0; a < state.size(); ++a) {
        const double r = state.atoms()[a].regret;
        raw[a] = 0.5 *
                 (pot_table.eval(col + 1, r + off) - pot_table.eval(col + 1, r - off));
    }
    return normalize_weights(state, std::move(raw));
}

WeightFunction learner_weights_continuous(const Potential& p, double t,
                                          const RegretState& state) {
    std::vector<double> raw(state.size());
    for (std::size_t a = 0; a < state.size(); ++a)
        raw[a] = p.partial_r(t, state.atoms()[a].regret, 1);
    return normalize_weights(state, std::move(raw));
}

WeightFunction learner_weights_continuous_safe(const Potential& p, double t,
                                               const RegretState& state) {
    std::vector<double> raw(state.size());
    double z = 0.0;
    for (std::size_t a = 0; a < state.size(); ++a) {
        raw[a] = engine_partial_r(p, t, state.atoms()[a].regret, 1);
        z += state.atoms()[a].mass * raw[a];
    }
    if (!(z > 0.0)) return uniform_weights(state);
    for (double& w : raw) w /= z;
    return WeightFunction{std::move(raw)};
}

// ---------------------------------------------------------------------------
// adversaries
// ---------------------------------------------------------------------------

AdversaryMove AdversaryMove::random_walk(double s) {
    AdversaryMove m;
    m.kind = Kind::RandomWalk;
    m.s = s;
    return m;
}

AdversaryMove AdversaryMove::biased(double s, double p) {
    AdversaryMove m;
    m.kind = Kind::Biased;
    m.s = s;
    m.p = p;
    return m;
}

AdversaryMove AdversaryMove::constant(double l, double s) {
    AdversaryMove m;
    m.kind = Kind::Constant;
    m.s = s;
    m.l = l;
    return m;
}

LossMap adversary_loss_map(const AdversaryMove& move,
                           const RegretState& state) {
    if (!(move.s > 0.0) || move.s > 1.0)
        throw std::invalid_argument(
            "adversary_loss_map: step size must be in (0, 1]");
    LossDist dist;
    switch (move.kind) {
        case AdversaryMove::Kind::RandomWalk:
            dist.points = {{move.s, 0.5}, {-move.s, 0.5}};
            break;
        case AdversaryMove::Kind::Biased:
            if (move.p < 0.0 || move.p > 1.0)
                throw std::invalid_argument(
                    "adversary_loss_map: bias probability must be in [0, 1]");
            dist.points = {{move.s, move.p}, {-move.s, 1.0 - move.p}};
            break;
        case AdversaryMove::Kind::Constant:
            if (std::abs(move.l) > move.s)
                throw std::invalid_argument(
                    "adversary_loss_map: |l| must not exceed the step size");
            dist.points = {{move.l, 1.0}};
            break;
    }
    return LossMap::uniform(move.s, std::move(dist), state.size());
}

AdversaryFn fixed_adversary(AdversaryMove move) {
    return [move](long, double, const RegretState&, const WeightFunction&) {
        return move;
    };
}

AdversaryFn scripted_adversary(std::vector<AdversaryMove> moves) {
    return [moves](long step, double, const RegretState&,
                   const WeightFunction&) {
        if (step < 0 || static_cast<std::size_t>(step) >= moves.size())
            throw GameRuleViolation("scripted adversary exhausted", step);
        return moves[static_cast<std::size_t>(step)];
    };
}

// ---------------------------------------------------------------------------
// step computations
// ---------------------------------------------------------------------------

double aggregate_loss(const RegretState& state, const WeightFunction& weights,
                      const LossMap& losses) {
    check_sizes(state, weights, losses, "aggregate_loss");
    double ell = 0.0;
    for (std::size_t a = 0; a < state.size(); ++a) {
        ell += state.atoms()[a].mass * weights.values[a] *
               losses.per_atom()[a].mean();
    }
    return ell;
}

double aggregate_loss(const RegretState& state, const WeightFunction& weights,
                      const LossMap& losses, double cap, long step) {
    const double ell = aggregate_loss(state, weights, losses);
    if (std::abs(ell) > cap + 1e-15)
        throw GameRuleViolation(
            "adversary move drives |ell| beyond the c*s^2 cap", step);
    return ell;
}

namespace {

double increment_impl(const RegretState& state, const Potential& p, double t,
                      const LossMap& losses, double ell, bool safe) {
    if (losses.per_atom().size() != state.size())
        throw std::invalid_argument("time_increment: losses misaligned");
    std::vector<double> curvature(state.size());
    double zh = 0.0;
    for (std::size_t a = 0; a < state.size(); ++a) {
        const double r = state.atoms()[a].regret;
        curvature[a] = safe ? engine_partial_r(p, t, r, 2)
                            : p.partial_r(t, r, 2);
        zh += state.atoms()[a].mass * curvature[a];
    }
    if (!(zh > 0.0)) {
        if (safe) return 0.0;
        throw DegeneratePotentialError("time_increment: zero curvature mass");
    }
    double dt = 0.0;
    for (std::size_t a = 0; a < state.size(); ++a) {
        const LossDist& d = losses.per_atom()[a];
        const double e2 = d.second_moment() - 2.0 * ell * d.mean() + ell * ell;
        dt += state.atoms()[a].mass * (curvature[a] / zh) * e2;
    }
    return dt;
}

}  // namespace

double time_increment(const RegretState& state, const Potential& p, double t,
                      const LossMap& losses, double ell) {
    return increment_impl(state, p, t, losses, ell, /*safe=*/false);
}

double time_increment_safe(const RegretState& state, const Potential& p,
                           double t, const LossMap& losses, double ell) {
    return increment_impl(state, p, t, losses, ell, /*safe=*/true);
}

double iteration_variance(const RegretState& state,
                          const WeightFunction& weights,
                          const LossMap& losses) {
    check_sizes(state, weights, losses, "iteration_variance");
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t a = 0; a < state.size(); ++a) {
        const double pa = state.atoms()[a].mass * weights.values[a];
        m1 += pa * losses.per_atom()[a].mean();
        m2 += pa * losses.per_atom()[a].second_moment();
    }
    return m2 - m1 * m1;
}

// ---------------------------------------------------------------------------
// run_game
// ---------------------------------------------------------------------------

namespace {

std::vector<double> snapshot_eps(const RegretState& state,
                                 const std::vector<double>& eps_list) {
    std::vector<double> out;
    out.reserve(eps_list.size());
    for (double e : eps_list) out.push_back(epsilon_regret(state, e));
    return out;
}

double table_score(const RegretState& state, const LatticeTable& table,
                   int col) {
    double acc = 0.0;
    for (const Atom& a : state.atoms())
        acc += a.mass * table.eval(col, a.regret);
    return acc;
}

void validate_move(const AdversaryMove& move, long step) {
    if (!(move.s > 0.0) || move.s > 1.0)
        throw GameRuleViolation("adversary step size outside (0, 1]", step);
    if (move.kind == AdversaryMove::Kind::Biased &&
        (move.p < 0.0 || move.p > 1.0))
        throw GameRuleViolation("adversary bias probability outside [0, 1]",
                                step);
    if (move.kind == AdversaryMove::Kind::Constant &&
        std::abs(move.l) > move.s)
        throw GameRuleViolation("adversary constant loss outside [-s, s]",
                                step);
}

void record_detail(GameTrace& trace, const GameConfig& config,
                   const RegretState& pre, const WeightFunction& w,
                   const LossMap& losses, double s, double ell, double dt) {
    if (!config.record_details) return;
    StepDetail d;
    d.pre_state = pre;
    d.weights = w;
    d.loss_mean.reserve(losses.per_atom().size());
    d.loss_m2.reserve(losses.per_atom().size());
    for (const LossDist& ld : losses.per_atom()) {
        d.loss_mean.push_back(ld.mean());
        d.loss_m2.push_back(ld.second_moment());
    }
    d.s = s;
    d.ell = ell;
    d.dt = dt;
    trace.details.push_back(std::move(d));
}

/// Integer and discrete modes share the lattice loop; they differ only in
/// the tables, the step size and the ell cap.
GameTrace run_lattice_game(const GameConfig& config,
                           const AdversaryFn& adversary,
                           const LearnerFn* learner_override) {
    const bool discrete = config.mode == GameConfig::Mode::Discrete;
    if (!config.final)
        throw std::invalid_argument("run_game: lattice modes need a final");

    LatticeTable lower = discrete
        ? backward_table(*config.final, config.horizon, config.k,
                         LatticeTable::Side::Lower)
        : integer_lattice_table(*config.final, config.T,
                                LatticeTable::Side::Lower);
    std::optional<LatticeTable> upper;
    if (!learner_override && config.learner == LearnerKind::Potential) {
        upper = discrete ? backward_table(*config.final, config.horizon,
                                          config.k, LatticeTable::Side::Upper)
                         : integer_lattice_table(*config.final, config.T,
                                                 LatticeTable::Side::Upper);
    }

    const int n = lower.steps();
    const double s_k = discrete ? lower.r_spacing() : 1.0;
    const double dt = lower.time_step();
    if (discrete && config.validate_step_bound && s_k > 1.0 + 1e-15)
        throw GameRuleViolation(
            "discrete step size exceeds min(sqrt(horizon - t), 1)", 0);

    RegretState state = config.initial_state ? *config.initial_state
                                             : RegretState::point_mass(0.0);
    GameTrace trace;
    trace.eps_list = config.eps_list;
    trace.rows.push_back({0, 0.0, 0.0, 0.0, 0.0, table_score(state, lower, 0),
                          snapshot_eps(state, config.eps_list)});

    for (int m = 0; m < n; ++m) {
        const double t = m * dt;
        WeightFunction w;
        if (learner_override) {
            w = (*learner_override)(m, t, state);
        } else if (config.learner == LearnerKind::Uniform) {
            w = uniform_weights(state);
        } else if (discrete) {
            w = learner_weights_discrete(*upper, t, state, config.k);
        } else {
            w = learner_weights_integer(*upper, m + 1, state);
        }

        const AdversaryMove move = adversary(m, t, state, w);
        validate_move(move, m);
        if (discrete && std::abs(move.s - s_k) > 1e-12)
            throw GameRuleViolation(
                "discrete-game adversary must declare the level step size", m);

        const LossMap losses = adversary_loss_map(move, state);
        const double ell =
            discrete ? aggregate_loss(state, w, losses,
                                      config.c * s_k * s_k, m)
                     : aggregate_loss(state, w, losses);
        record_detail(trace, config, state, w, losses, move.s, ell, dt);

        state = convolve_step(state, losses, ell);
        trace.rows.push_back({m + 1, (m + 1) * dt, move.s, ell, dt,
                              table_score(state, lower, m + 1),
                              snapshot_eps(state, config.eps_list)});
        trace.v_n += dt;
    }

    trace.final_state = state;
    trace.t_reached = n * dt;
    trace.reached_horizon = true;
    return trace;
}

GameTrace run_continuous_game(const GameConfig& config,
                              const AdversaryFn& adversary,
                              const LearnerFn* learner_override) {
    if (!config.potential)
        throw std::invalid_argument("run_game: continuous mode needs a potential");
    if (!(config.max_step > 0.0) || config.max_step >= 1.0)
        throw std::invalid_argument("run_game: max_step must be in (0, 1)");
    if (!(config.horizon > 0.0))
        throw std::invalid_argument("run_game: horizon must be > 0");

    const Potential& pot = *config.potential;
    RegretState state = config.initial_state ? *config.initial_state
                                             : RegretState::point_mass(0.0);
    GameTrace trace;
    trace.eps_list = config.eps_list;

    double t = 0.0;
    trace.rows.push_back({0, 0.0, 0.0, 0.0, 0.0, score(state, pot, 0.0),
                          snapshot_eps(state, config.eps_list)});

    for (long m = 0; m < config.max_iters; ++m) {
        if (config.horizon - t <= 1e-12) break;

        WeightFunction w;
        if (learner_override) {
            w = (*learner_override)(m, t, state);
        } else if (config.learner == LearnerKind::Uniform) {
            w = uniform_weights(state);
        } else {
            w = learner_weights_continuous_safe(pot, t, state);
        }

        const AdversaryMove move = adversary(m, t, state, w);
        validate_move(move, m);
        if (config.validate_step_bound && move.s > config.max_step + 1e-15)
            throw GameRuleViolation("adversary step size exceeds the maximum",
                                    m);

        const LossMap losses = adversary_loss_map(move, state);
        const double ell = aggregate_loss(state, w, losses,
                                          config.c * move.s * move.s, m);
        const double dt = time_increment_safe(state, pot, t, losses, ell);

        // No partial-step rule exists: a step that would overshoot the
        // horizon is refused and the run reports t_reached < tau.
        if (t + dt > config.horizon + 1e-12) break;

        record_detail(trace, config, state, w, losses, move.s, ell, dt);
        state = convolve_step(state, losses, ell);
        t += dt;
        // keep horizon-limited potentials inside their domain when rounding
        // lands the clock a few ulps past tau
        if (std::abs(config.horizon - t) <= 1e-12) t = config.horizon;
        trace.v_n += dt;
        trace.rows.push_back({m + 1, t, move.s, ell, dt, score(state, pot, t),
                              snapshot_eps(state, config.eps_list)});
    }

    trace.final_state = state;
    trace.t_reached = t;
    trace.reached_horizon = config.horizon - t <= 1e-12;
    return trace;
}

}  // namespace

GameTrace run_game(const GameConfig& config, const AdversaryFn& adversary) {
    if (config.mode == GameConfig::Mode::Continuous)
        return run_continuous_game(config, adversary, nullptr);
    return run_lattice_game(config, adversary, nullptr);
}

GameTrace run_game(const GameConfig& config, const AdversaryFn& adversary,
                   const LearnerFn& learner) {
    if (config.mode == GameConfig::Mode::Continuous)
        return run_continuous_game(config, adversary, &learner);
    return run_lattice_game(config, adversary, &learner);
}

// ---------------------------------------------------------------------------
// finite-expert mode
// ---------------------------------------------------------------------------

ExpertTrace run_expert_game(const ExpertGameConfig& config) {
    const int n = config.n_experts;
    if (n < 1)
        throw std::invalid_argument("run_expert_game: need >= 1 expert");
    if (config.T < 0)
        throw std::invalid_argument("run_expert_game: T must be >= 0");
    if (!config.losses.empty()) {
        if (static_cast<long>(config.losses.size()) != config.T)
            throw std::invalid_argument(
                "run_expert_game: loss matrix must have T rows");
        for (const auto& row : config.losses) {
            if (static_cast<int>(row.size()) != n)
                throw std::invalid_argument(
                    "run_expert_game: loss row width != number of experts");
            for (double l : row)
                if (std::abs(l) > 1.0)
                    throw std::invalid_argument(
                        "run_expert_game: losses must lie in [-1, 1]");
        }
    }

    const Potential& pot = config.potential;
    RegretState state = RegretState::uniform_experts(n);
    std::mt19937_64 rng(config.seed);

    ExpertTrace trace;
    trace.eps_list = config.eps_list;

    auto expert_regrets = [n](const RegretState& st) {
        std::vector<double> out(n, 0.0);
        for (std::size_t a = 0; a < st.size(); ++a)
            out[std::stoul(st.labels()[a])] = st.atoms()[a].regret;
        return out;
    };

    double t = 0.0;
    trace.rows.push_back({0, 0.0, 0.0, 0.0, 0.0, score(state, pot, 0.0),
                          expert_regrets(state),
                          snapshot_eps(state, config.eps_list)});

    for (long iter = 1; iter <= config.T; ++iter) {
        std::vector<double> row_losses(n);
        if (config.losses.empty()) {
            for (int j = 0; j < n; ++j)
                row_losses[j] = (rng() >> 63) ? 1.0 : -1.0;
        } else {
            row_losses = config.losses[iter - 1];
        }

        const WeightFunction w = learner_weights_continuous_safe(pot, t, state);

        std::vector<LossDist> per_atom(state.size());
        for (std::size_t a = 0; a < state.size(); ++a) {
            const double l = row_losses[std::stoul(state.labels()[a])];
            per_atom[a].points = {{l, 1.0}};
        }
        const LossMap losses(1.0, std::move(per_atom));

        const double ell = aggregate_loss(state, w, losses);
        const double var_i = iteration_variance(state, w, losses);
        const double dt = time_increment_safe(state, pot, t, losses, ell);

        state = convolve_step(state, losses, ell);
        t += dt;
        trace.v_n += dt;
        trace.rows.push_back({iter, t, ell, dt, var_i, score(state, pot, t),
                              expert_regrets(state),
                              snapshot_eps(state, config.eps_list)});
    }
    return trace;
}

}  // namespace potgames
