// potgames: experiment runner for the potential-based regret games.
//
// Subcommands: integer-game, discrete-game, continuous-game, convergence,
// monotonicity, bounds, verify-bounds. Config may come from a TOML/JSON
// file (--config); command-line flags override file values. Exit codes:
// 0 success, 2 config error, 3 game-rule violation, 4 positivity
// precondition failure.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <thread>

#include "potgames/analysis.hpp"
#include "potgames/config.hpp"
#include "potgames/errors.hpp"
#include "potgames/games.hpp"
#include "potgames/io.hpp"
#include "potgames/speclang.hpp"

using namespace potgames;

namespace {

std::vector<double> parse_eps_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad eps value '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty eps list");
    return out;
}

std::pair<double, double> parse_probe(const std::string& text) {
    const std::size_t comma = text.find(',');
    if (comma == std::string::npos)
        throw ConfigError("probe must be t,R: '" + text + "'");
    try {
        return {std::stod(text.substr(0, comma)),
                std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ConfigError("probe must be t,R: '" + text + "'");
    }
}

template <typename T>
T require(const std::optional<T>& field, const char* key) {
    if (!field) throw ConfigError(std::string("missing config key '") + key + "'");
    return *field;
}

double trace_max_eps_regret(const GameTrace& trace) {
    double m = -std::numeric_limits<double>::infinity();
    for (const TraceRow& row : trace.rows)
        for (double e : row.eps_regrets) m = std::max(m, e);
    return m;
}

BoundKind parse_bound_kind(const std::string& kind) {
    if (kind == "exp") return BoundKind::Exp;
    if (kind == "normalhedge") return BoundKind::NormalHedge;
    if (kind == "uniform") return BoundKind::Uniform;
    throw ConfigError("unknown bound kind '" + kind +
                      "' (exp|normalhedge|uniform)");
}

// ---------------------------------------------------------------------------
// subcommand execution
// ---------------------------------------------------------------------------

int run_lattice_cli(const ExperimentConfig& cfg, bool dry_run) {
    const bool discrete = cfg.subcommand == "discrete-game";
    GameConfig game;
    game.mode = discrete ? GameConfig::Mode::Discrete : GameConfig::Mode::Integer;
    game.final = parse_final_spec(require(cfg.final_spec, "final"));
    if (discrete) {
        game.horizon = require(cfg.horizon, "horizon");
        game.k = require(cfg.k, "k");
        if (cfg.c) game.c = *cfg.c;
    } else {
        game.T = static_cast<int>(require(cfg.T, "T"));
    }
    game.learner = parse_learner_spec(cfg.learner.value_or("potential"));
    if (!cfg.eps.empty()) game.eps_list = cfg.eps;
    const AdversaryFn adversary =
        parse_adversary(cfg.adversary.value_or("random-walk"));
    if (dry_run) {
        std::cout << "dry-run ok: " << cfg.subcommand << "\n";
        return 0;
    }

    const GameTrace trace = run_game(game, adversary);
    if (cfg.out) save_trace_csv(trace, *cfg.out);
    std::cout << cfg.subcommand
              << " final_score=" << format_double(trace.final_score())
              << " max_eps_regret=" << format_double(trace_max_eps_regret(trace))
              << " v_n=" << format_double(trace.v_n) << "\n";
    return 0;
}

int run_continuous_cli(const ExperimentConfig& cfg, bool dry_run) {
    GameConfig game;
    game.mode = GameConfig::Mode::Continuous;
    game.potential = parse_potential_spec(require(cfg.potential, "potential"));
    game.horizon = require(cfg.horizon, "horizon");
    game.max_step = require(cfg.max_step, "max_step");
    if (cfg.c) game.c = *cfg.c;
    if (cfg.iters) game.max_iters = *cfg.iters;
    game.learner = parse_learner_spec(cfg.learner.value_or("potential"));
    if (!cfg.eps.empty()) game.eps_list = cfg.eps;
    const AdversaryFn adversary =
        parse_adversary(require(cfg.adversary, "adversary"));
    if (dry_run) {
        std::cout << "dry-run ok: continuous-game\n";
        return 0;
    }

    const GameTrace trace = run_game(game, adversary);
    if (cfg.out) save_trace_csv(trace, *cfg.out);
    std::cout << "continuous-game final_score="
              << format_double(trace.final_score())
              << " max_eps_regret=" << format_double(trace_max_eps_regret(trace))
              << " v_n=" << format_double(trace.v_n)
              << " t_reached=" << format_double(trace.t_reached) << "\n";
    return 0;
}

int run_study_cli(const ExperimentConfig& cfg, bool dry_run) {
    const bool monotone = cfg.subcommand == "monotonicity";
    const FinalPotential final = parse_final_spec(require(cfg.final_spec, "final"));
    const double horizon = require(cfg.horizon, "horizon");
    const int kmax = require(cfg.kmax, "kmax");
    std::vector<std::pair<double, double>> probes;
    for (const std::string& p : cfg.probes) probes.push_back(parse_probe(p));
    if (!monotone && probes.empty()) probes.push_back({0.0, 0.0});
    if (dry_run) {
        std::cout << "dry-run ok: " << cfg.subcommand << "\n";
        return 0;
    }

    StudyReport report = monotone
        ? monotonicity_study(final, horizon, kmax, probes)
        : convergence_study(final, horizon, kmax, probes);
    report.seed = static_cast<std::uint64_t>(cfg.seed.value_or(0));
    if (cfg.out) save_study_report_json(report, *cfg.out);
    std::cout << cfg.subcommand << " passed=" << (report.passed() ? "true" : "false")
              << " verdicts=" << report.verdicts.size() << "\n";
    return report.passed() ? 0 : 1;
}

int run_bounds_cli(const ExperimentConfig& cfg, bool dry_run) {
    const BoundKind kind = parse_bound_kind(require(cfg.kind, "kind"));
    const double t = require(cfg.t, "t");
    if (cfg.eps.empty()) throw ConfigError("missing config key 'eps'");
    const double nu = cfg.nu.value_or(1.0);
    if (dry_run) {
        std::cout << "dry-run ok: bounds\n";
        return 0;
    }
    for (double eps : cfg.eps) {
        std::cout << "bound kind=" << *cfg.kind << " t=" << format_double(t)
                  << " eps=" << format_double(eps)
                  << " value=" << format_double(bound_value(kind, t, eps, nu))
                  << "\n";
    }
    return 0;
}

int run_verify_bounds_cli(const ExperimentConfig& cfg, bool dry_run) {
    ExpertGameConfig expert;
    expert.n_experts = require(cfg.experts, "experts");
    expert.T = require(cfg.T, "T");
    expert.potential =
        parse_potential_spec(cfg.potential.value_or("normalhedge"));
    const BoundKind kind = parse_bound_kind(cfg.kind.value_or("normalhedge"));
    const std::vector<double> eps_grid =
        cfg.eps.empty() ? std::vector<double>{0.5, 0.25, 0.1, 0.05, 0.02}
                        : cfg.eps;
    expert.eps_list = eps_grid;
    const double nu = cfg.nu.value_or(1.0);
    const int n_seeds = cfg.seeds.value_or(1);
    const long base_seed = cfg.seed.value_or(0);
    const int jobs = std::max(1, cfg.jobs.value_or(1));

    const std::string losses = cfg.losses.value_or("iid");
    std::vector<std::vector<double>> loss_matrix;
    if (losses != "iid") loss_matrix = load_expert_losses_csv(losses);
    if (dry_run) {
        std::cout << "dry-run ok: verify-bounds\n";
        return 0;
    }

    std::vector<ExpertTrace> traces(n_seeds);
    auto worker = [&](int begin, int step) {
        for (int i = begin; i < n_seeds; i += step) {
            ExpertGameConfig one = expert;
            one.seed = static_cast<std::uint64_t>(base_seed) + i;
            one.losses = loss_matrix;
            traces[i] = run_expert_game(one);
        }
    };
    if (jobs == 1 || n_seeds == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker, j, jobs);
        for (std::thread& th : pool) th.join();
    }

    StudyReport report = bound_verification(traces, kind, eps_grid, nu);
    report.seed = static_cast<std::uint64_t>(base_seed);
    report.add_param("experts", std::to_string(expert.n_experts));
    report.add_param("T", std::to_string(expert.T));
    report.add_param("seeds", std::to_string(n_seeds));
    if (cfg.out) save_study_report_json(report, *cfg.out);

    long violations = 0;
    const auto* counts = report.series("violations");
    if (counts)
        for (double v : *counts) violations += static_cast<long>(v);
    const auto* excess = report.series("max_excess");
    double worst = -std::numeric_limits<double>::infinity();
    if (excess)
        for (double v : *excess) worst = std::max(worst, v);
    std::cout << "verify-bounds experts=" << expert.n_experts
              << " T=" << expert.T << " seeds=" << n_seeds
              << " violations=" << violations
              << " max_excess=" << format_double(worst) << "\n";
    return 0;
}

int dispatch(const ExperimentConfig& cfg, bool dry_run,
             const std::string& emit_config) {
    if (!emit_config.empty()) cfg.save(emit_config);
    if (cfg.subcommand == "integer-game" || cfg.subcommand == "discrete-game")
        return run_lattice_cli(cfg, dry_run);
    if (cfg.subcommand == "continuous-game")
        return run_continuous_cli(cfg, dry_run);
    if (cfg.subcommand == "convergence" || cfg.subcommand == "monotonicity")
        return run_study_cli(cfg, dry_run);
    if (cfg.subcommand == "bounds") return run_bounds_cli(cfg, dry_run);
    if (cfg.subcommand == "verify-bounds")
        return run_verify_bounds_cli(cfg, dry_run);
    throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
}

/// Per-subcommand flag capture; only flags the user actually passed end up
/// set, so they override config-file values cleanly.
struct FlagSet {
    std::string config_path, emit_config;
    bool dry_run = false;
    std::optional<long> T, iters, seed;
    std::optional<int> k, kmax, experts, seeds, jobs;
    std::optional<double> horizon, max_step, c, t, nu;
    std::optional<std::string> final_spec, potential, adversary, learner, kind,
        losses, out, eps_text;
    std::vector<std::string> probes;

    void register_options(CLI::App* app) {
        app->add_option("--config", config_path,
                        "TOML or JSON config file (flags override)");
        app->add_flag("--dry-run", dry_run, "validate config, compute nothing");
        app->add_option("--emit-config", emit_config,
                        "write the effective config to this path");
        app->add_option("--T", T);
        app->add_option("--horizon", horizon);
        app->add_option("--k", k);
        app->add_option("--kmax", kmax);
        app->add_option("--max-step", max_step);
        app->add_option("--c", c);
        app->add_option("--iters", iters);
        app->add_option("--t", t);
        app->add_option("--final", final_spec);
        app->add_option("--potential", potential);
        app->add_option("--adversary", adversary);
        app->add_option("--learner", learner);
        app->add_option("--kind", kind);
        app->add_option("--eps", eps_text, "comma-separated list");
        app->add_option("--nu", nu);
        app->add_option("--experts", experts);
        app->add_option("--seeds", seeds);
        app->add_option("--losses", losses, "expert-loss CSV path or 'iid'");
        app->add_option("--probe", probes, "t,R probe (repeatable)");
        app->add_option("--seed", seed);
        app->add_option("--out", out);
        app->add_option("--jobs", jobs);
    }

    ExperimentConfig merge(const std::string& subcommand) const {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = ExperimentConfig::from_file(config_path);
        cfg.subcommand = subcommand;
        if (T) cfg.T = *T;
        if (horizon) cfg.horizon = *horizon;
        if (k) cfg.k = *k;
        if (kmax) cfg.kmax = *kmax;
        if (max_step) cfg.max_step = *max_step;
        if (c) cfg.c = *c;
        if (iters) cfg.iters = *iters;
        if (t) cfg.t = *t;
        if (final_spec) cfg.final_spec = *final_spec;
        if (potential) cfg.potential = *potential;
        if (adversary) cfg.adversary = *adversary;
        if (learner) cfg.learner = *learner;
        if (kind) cfg.kind = *kind;
        if (eps_text) cfg.eps = parse_eps_list(*eps_text);
        if (nu) cfg.nu = *nu;
        if (experts) cfg.experts = *experts;
        if (seeds) cfg.seeds = *seeds;
        if (losses) cfg.losses = *losses;
        if (!probes.empty()) cfg.probes = probes;
        if (seed) cfg.seed = *seed;
        if (out) cfg.out = *out;
        if (jobs) cfg.jobs = *jobs;
        return cfg;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"potential-game regret simulator"};
    app.require_subcommand(1);

    const std::vector<std::string> names{
        "integer-game", "discrete-game", "continuous-game", "convergence",
        "monotonicity", "bounds",        "verify-bounds"};
    std::vector<std::unique_ptr<FlagSet>> flags;
    std::vector<CLI::App*> subs;
    for (const std::string& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        flags.push_back(std::make_unique<FlagSet>());
        flags.back()->register_options(sub);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (subs[i]->parsed()) {
                const ExperimentConfig cfg = flags[i]->merge(names[i]);
                return dispatch(cfg, flags[i]->dry_run, flags[i]->emit_config);
            }
        }
        throw ConfigError("no subcommand given");
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help path
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const GameRuleViolation& e) {
        std::cerr << "game-rule violation: " << e.what() << "\n";
        return 3;
    } catch (const PositivityError& e) {
        std::cerr << "positivity precondition failed: " << e.what() << "\n";
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
