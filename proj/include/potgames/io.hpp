#pragma once

#include <string>
#include <vector>

#include "potgames/analysis.hpp"
#include "potgames/games.hpp"
#include "potgames/measure.hpp"

namespace potgames {

/// All floating-point output goes through this: %.17g, enough digits to
/// round-trip doubles exactly.
std::string format_double(double v);

/// State CSV: header `regret,mass` or `regret,mass,label`. The loader
/// enforces the state invariants (positive masses summing to 1 within
/// 1e-12) before construction.
RegretState load_state_csv(const std::string& path);
void save_state_csv(const RegretState& state, const std::string& path);

/// Expert-loss CSV: one row per iteration, one column per expert, no
/// header, entries in [-1, 1].
std::vector<std::vector<double>> load_expert_losses_csv(
    const std::string& path);

/// Scripted-adversary CSV: header `iter,kind,param1,param2` with kind one
/// of random_walk (param1 = s), biased (param1 = s, param2 = p), constant
/// (param1 = l, param2 = s).
std::vector<AdversaryMove> load_adversary_script_csv(const std::string& path);

std::string trace_csv(const GameTrace& trace);
void save_trace_csv(const GameTrace& trace, const std::string& path);

std::string expert_trace_csv(const ExpertTrace& trace);
void save_expert_trace_csv(const ExpertTrace& trace, const std::string& path);

/// Lattice export: `i,j,t,R,value` rows.
std::string table_csv(const LatticeTable& table);
void save_table_csv(const LatticeTable& table, const std::string& path);

/// Deterministic JSON: insertion-ordered keys, %.17g numbers, NaN -> null.
std::string study_report_json(const StudyReport& report);
void save_study_report_json(const StudyReport& report,
                            const std::string& path);

std::string json_escape(const std::string& s);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace potgames
