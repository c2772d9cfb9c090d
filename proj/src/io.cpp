#include "potgames/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "potgames/errors.hpp"

namespace potgames {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(context + ": cannot parse number '" + s + "'");
    }
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = strip(line);
        if (!t.empty()) lines.push_back(t);
    }
    return lines;
}

std::string eps_header(const std::vector<double>& eps_list) {
    std::string h;
    for (double e : eps_list) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), ",eps_regret_%g", e);
        h += buf;
    }
    return h;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

// ---------------------------------------------------------------------------
// state CSV
// ---------------------------------------------------------------------------

RegretState load_state_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw ConfigError(path + ": empty state file");
    const auto header = split(lines[0], ',');
    bool labeled;
    if (header.size() == 2 && strip(header[0]) == "regret" &&
        strip(header[1]) == "mass") {
        labeled = false;
    } else if (header.size() == 3 && strip(header[0]) == "regret" &&
               strip(header[1]) == "mass" && strip(header[2]) == "label") {
        labeled = true;
    } else {
        throw ConfigError(path + ": expected header regret,mass[,label]");
    }

    std::vector<Atom> atoms;
    std::vector<std::string> labels;
    double total = 0.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cols = split(lines[i], ',');
        if (cols.size() != header.size())
            throw ConfigError(path + ": row " + std::to_string(i) +
                              " has the wrong column count");
        Atom a;
        a.regret = parse_number(strip(cols[0]), path);
        a.mass = parse_number(strip(cols[1]), path);
        if (!(a.mass > 0.0))
            throw ConfigError(path + ": masses must be positive");
        total += a.mass;
        atoms.push_back(a);
        if (labeled) labels.push_back(strip(cols[2]));
    }
    if (atoms.empty()) throw ConfigError(path + ": no atoms");
    if (std::abs(total - 1.0) > kMassTolerance)
        throw ConfigError(path + ": masses must sum to 1 (within 1e-12)");
    return labeled ? RegretState::from_labeled(std::move(atoms), std::move(labels))
                   : RegretState::from_atoms(std::move(atoms));
}

void save_state_csv(const RegretState& state, const std::string& path) {
    std::string out = state.labeled() ? "regret,mass,label\n" : "regret,mass\n";
    for (std::size_t i = 0; i < state.size(); ++i) {
        const Atom& a = state.atoms()[i];
        out += format_double(a.regret) + "," + format_double(a.mass);
        if (state.labeled()) out += "," + state.labels()[i];
        out += "\n";
    }
    write_text_file(path, out);
}

// ---------------------------------------------------------------------------
// expert losses / adversary scripts
// ---------------------------------------------------------------------------

std::vector<std::vector<double>> load_expert_losses_csv(
    const std::string& path) {
    const auto lines = read_lines(path);
    std::vector<std::vector<double>> rows;
    for (const auto& line : lines) {
        const auto cols = split(line, ',');
        std::vector<double> row;
        row.reserve(cols.size());
        for (const auto& c : cols) {
            const double v = parse_number(strip(c), path);
            if (std::abs(v) > 1.0)
                throw ConfigError(path + ": expert losses must lie in [-1, 1]");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ConfigError(path + ": ragged loss rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError(path + ": empty loss file");
    return rows;
}

std::vector<AdversaryMove> load_adversary_script_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || strip(lines[0]) != "iter,kind,param1,param2")
        throw ConfigError(path + ": expected header iter,kind,param1,param2");
    std::vector<AdversaryMove> moves;
    long prev_iter = -1;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cols = split(lines[i], ',');
        if (cols.size() != 4)
            throw ConfigError(path + ": row " + std::to_string(i) +
                              " has the wrong column count");
        const long iter = static_cast<long>(parse_number(strip(cols[0]), path));
        if (iter <= prev_iter)
            throw ConfigError(path + ": iterations must be increasing");
        prev_iter = iter;
        const std::string kind = strip(cols[1]);
        const double p1 = parse_number(strip(cols[2]), path);
        const double p2 = parse_number(strip(cols[3]), path);
        if (kind == "random_walk" || kind == "random-walk") {
            moves.push_back(AdversaryMove::random_walk(p1));
        } else if (kind == "biased") {
            moves.push_back(AdversaryMove::biased(p1, p2));
        } else if (kind == "constant") {
            moves.push_back(AdversaryMove::constant(p1, p2));
        } else {
            throw ConfigError(path + ": unknown adversary kind '" + kind + "'");
        }
    }
    if (moves.empty()) throw ConfigError(path + ": empty script");
    return moves;
}

// ---------------------------------------------------------------------------
// traces / tables
// ---------------------------------------------------------------------------

std::string trace_csv(const GameTrace& trace) {
    std::string out = "iter,t,s,ell,dt,score" + eps_header(trace.eps_list) + "\n";
    for (const TraceRow& row : trace.rows) {
        out += std::to_string(row.iter) + "," + format_double(row.t) + "," +
               format_double(row.s) + "," + format_double(row.ell) + "," +
               format_double(row.dt) + "," + format_double(row.score);
        for (double e : row.eps_regrets) out += "," + format_double(e);
        out += "\n";
    }
    return out;
}

void save_trace_csv(const GameTrace& trace, const std::string& path) {
    write_text_file(path, trace_csv(trace));
}

std::string expert_trace_csv(const ExpertTrace& trace) {
    std::string out =
        "iter,t,ell,dt,var,score" + eps_header(trace.eps_list) + "\n";
    for (const ExpertTraceRow& row : trace.rows) {
        out += std::to_string(row.iter) + "," + format_double(row.t) + "," +
               format_double(row.ell) + "," + format_double(row.dt) + "," +
               format_double(row.var_i) + "," + format_double(row.score);
        for (double e : row.eps_regrets) out += "," + format_double(e);
        out += "\n";
    }
    return out;
}

void save_expert_trace_csv(const ExpertTrace& trace, const std::string& path) {
    write_text_file(path, expert_trace_csv(trace));
}

std::string table_csv(const LatticeTable& table) {
    std::string out = "i,j,t,R,value\n";
    for (int i = 0; i <= table.steps(); ++i) {
        for (int j = 0; j <= i; ++j) {
            out += std::to_string(i) + "," + std::to_string(j) + "," +
                   format_double(table.t_of(i)) + "," +
                   format_double(table.r_of(i, j)) + "," +
                   format_double(table.value(i, j)) + "\n";
        }
    }
    return out;
}

void save_table_csv(const LatticeTable& table, const std::string& path) {
    write_text_file(path, table_csv(table));
}

// ---------------------------------------------------------------------------
// study report JSON
// ---------------------------------------------------------------------------

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    return out;
}

namespace {

std::string json_number(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    return format_double(v);
}

}  // namespace

std::string study_report_json(const StudyReport& report) {
    std::string out = "{\n";
    out += "  \"study\": \"" + json_escape(report.study) + "\",\n";

    out += "  \"params\": {";
    for (std::size_t i = 0; i < report.params.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + json_escape(report.params[i].first) + "\": \"" +
               json_escape(report.params[i].second) + "\"";
    }
    out += "},\n";

    out += "  \"probes\": [";
    for (std::size_t i = 0; i < report.probes.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + json_escape(report.probes[i]) + "\"";
    }
    out += "],\n";

    out += "  \"values\": {\n";
    for (std::size_t i = 0; i < report.values.size(); ++i) {
        out += "    \"" + json_escape(report.values[i].first) + "\": [";
        const auto& v = report.values[i].second;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (j) out += ", ";
            out += json_number(v[j]);
        }
        out += i + 1 < report.values.size() ? "],\n" : "]\n";
    }
    out += "  },\n";

    out += "  \"verdicts\": {\n";
    for (std::size_t i = 0; i < report.verdicts.size(); ++i) {
        out += "    \"" + json_escape(report.verdicts[i].first) + "\": ";
        out += report.verdicts[i].second ? "true" : "false";
        out += i + 1 < report.verdicts.size() ? ",\n" : "\n";
    }
    out += "  },\n";

    out += "  \"tolerances\": {";
    for (std::size_t i = 0; i < report.tolerances.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + json_escape(report.tolerances[i].first) +
               "\": " + json_number(report.tolerances[i].second);
    }
    out += "},\n";

    out += "  \"seed\": " + std::to_string(report.seed) + "\n";
    out += "}\n";
    return out;
}

void save_study_report_json(const StudyReport& report,
                            const std::string& path) {
    write_text_file(path, study_report_json(report));
}

}  // namespace potgames
