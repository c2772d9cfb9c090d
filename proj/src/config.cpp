#include "potgames/config.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "potgames/errors.hpp"
#include "potgames/io.hpp"

namespace potgames {

namespace {

/// Typed scalar/array value shared by the TOML and JSON front ends.
struct Value {
    enum class Kind { String, Number, NumberArray, StringArray };
    Kind kind = Kind::String;
    std::string s;
    double num = 0.0;
    std::vector<double> nums;
    std::vector<std::string> strs;
};

long to_integer(const Value& v, const std::string& key) {
    if (v.kind != Value::Kind::Number)
        throw ConfigError("config key '" + key + "' must be a number");
    if (v.num != std::floor(v.num))
        throw ConfigError("config key '" + key + "' must be an integer");
    return static_cast<long>(v.num);
}

double to_float(const Value& v, const std::string& key) {
    if (v.kind != Value::Kind::Number)
        throw ConfigError("config key '" + key + "' must be a number");
    return v.num;
}

std::string to_string_value(const Value& v, const std::string& key) {
    if (v.kind != Value::Kind::String)
        throw ConfigError("config key '" + key + "' must be a string");
    return v.s;
}

void assign(ExperimentConfig& cfg, const std::string& key, const Value& v) {
    if (key == "subcommand") cfg.subcommand = to_string_value(v, key);
    else if (key == "T") cfg.T = to_integer(v, key);
    else if (key == "horizon") cfg.horizon = to_float(v, key);
    else if (key == "k") cfg.k = static_cast<int>(to_integer(v, key));
    else if (key == "kmax") cfg.kmax = static_cast<int>(to_integer(v, key));
    else if (key == "max_step") cfg.max_step = to_float(v, key);
    else if (key == "c") cfg.c = to_float(v, key);
    else if (key == "iters") cfg.iters = to_integer(v, key);
    else if (key == "t") cfg.t = to_float(v, key);
    else if (key == "final") cfg.final_spec = to_string_value(v, key);
    else if (key == "potential") cfg.potential = to_string_value(v, key);
    else if (key == "adversary") cfg.adversary = to_string_value(v, key);
    else if (key == "learner") cfg.learner = to_string_value(v, key);
    else if (key == "kind") cfg.kind = to_string_value(v, key);
    else if (key == "eps") {
        if (v.kind == Value::Kind::NumberArray) cfg.eps = v.nums;
        else if (v.kind == Value::Kind::Number) cfg.eps = {v.num};
        else throw ConfigError("config key 'eps' must be a number list");
    } else if (key == "nu") cfg.nu = to_float(v, key);
    else if (key == "experts") cfg.experts = static_cast<int>(to_integer(v, key));
    else if (key == "seeds") cfg.seeds = static_cast<int>(to_integer(v, key));
    else if (key == "losses") cfg.losses = to_string_value(v, key);
    else if (key == "probes") {
        if (v.kind == Value::Kind::StringArray) cfg.probes = v.strs;
        else if (v.kind == Value::Kind::String) cfg.probes = {v.s};
        else throw ConfigError("config key 'probes' must be a string list");
    } else if (key == "seed") cfg.seed = to_integer(v, key);
    else if (key == "out") cfg.out = to_string_value(v, key);
    else if (key == "jobs") cfg.jobs = static_cast<int>(to_integer(v, key));
    else throw ConfigError("unknown config key '" + key + "'");
}

// --- TOML subset ----------------------------------------------------------

std::string toml_strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

Value parse_toml_scalar(const std::string& raw) {
    Value v;
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
        v.kind = Value::Kind::String;
        v.s = raw.substr(1, raw.size() - 2);
        return v;
    }
    try {
        std::size_t pos = 0;
        v.num = std::stod(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument(raw);
        v.kind = Value::Kind::Number;
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: cannot parse value '" + raw + "'");
    }
}

Value parse_toml_value(const std::string& raw) {
    if (raw.empty()) throw ConfigError("config: empty value");
    if (raw.front() != '[') return parse_toml_scalar(raw);
    if (raw.back() != ']') throw ConfigError("config: unterminated array");

    Value v;
    const std::string body = toml_strip(raw.substr(1, raw.size() - 2));
    if (body.empty()) {
        v.kind = Value::Kind::NumberArray;
        return v;
    }
    std::vector<std::string> items;
    std::string cur;
    bool quoted = false;
    for (char c : body) {
        if (c == '"') quoted = !quoted;
        if (c == ',' && !quoted) {
            items.push_back(toml_strip(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    items.push_back(toml_strip(cur));

    const bool strings = items.front().front() == '"';
    v.kind = strings ? Value::Kind::StringArray : Value::Kind::NumberArray;
    for (const std::string& item : items) {
        const Value elem = parse_toml_scalar(item);
        if (strings) {
            if (elem.kind != Value::Kind::String)
                throw ConfigError("config: mixed array types");
            v.strs.push_back(elem.s);
        } else {
            if (elem.kind != Value::Kind::Number)
                throw ConfigError("config: mixed array types");
            v.nums.push_back(elem.num);
        }
    }
    return v;
}

std::string toml_quote(const std::string& s) { return "\"" + s + "\""; }

// --- serialization --------------------------------------------------------

/// Field emitter shared by to_toml and to_json so that both formats list
/// keys in the same canonical order.
template <typename Emit>
void for_each_field(const ExperimentConfig& c, Emit&& emit) {
    auto num = [](double v) { return format_double(v); };
    auto integer = [](long v) { return std::to_string(v); };

    emit("subcommand", toml_quote(c.subcommand), true);
    if (c.T) emit("T", integer(*c.T), false);
    if (c.horizon) emit("horizon", num(*c.horizon), false);
    if (c.k) emit("k", integer(*c.k), false);
    if (c.kmax) emit("kmax", integer(*c.kmax), false);
    if (c.max_step) emit("max_step", num(*c.max_step), false);
    if (c.c) emit("c", num(*c.c), false);
    if (c.iters) emit("iters", integer(*c.iters), false);
    if (c.t) emit("t", num(*c.t), false);
    if (c.final_spec) emit("final", toml_quote(*c.final_spec), true);
    if (c.potential) emit("potential", toml_quote(*c.potential), true);
    if (c.adversary) emit("adversary", toml_quote(*c.adversary), true);
    if (c.learner) emit("learner", toml_quote(*c.learner), true);
    if (c.kind) emit("kind", toml_quote(*c.kind), true);
    if (!c.eps.empty()) {
        std::string arr = "[";
        for (std::size_t i = 0; i < c.eps.size(); ++i) {
            if (i) arr += ", ";
            arr += num(c.eps[i]);
        }
        emit("eps", arr + "]", false);
    }
    if (c.nu) emit("nu", num(*c.nu), false);
    if (c.experts) emit("experts", integer(*c.experts), false);
    if (c.seeds) emit("seeds", integer(*c.seeds), false);
    if (c.losses) emit("losses", toml_quote(*c.losses), true);
    if (!c.probes.empty()) {
        std::string arr = "[";
        for (std::size_t i = 0; i < c.probes.size(); ++i) {
            if (i) arr += ", ";
            arr += toml_quote(c.probes[i]);
        }
        emit("probes", arr + "]", false);
    }
    if (c.seed) emit("seed", integer(*c.seed), false);
    if (c.out) emit("out", toml_quote(*c.out), true);
    if (c.jobs) emit("jobs", integer(*c.jobs), false);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_toml_text(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        line = toml_strip(strip_comment(line));
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value, got '" + line + "'");
        const std::string key = toml_strip(line.substr(0, eq));
        const std::string raw = toml_strip(line.substr(eq + 1));
        assign(cfg, key, parse_toml_value(raw));
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: JSON root must be an object");

    ExperimentConfig cfg;
    for (const auto& [key, val] : j.items()) {
        Value v;
        if (val.is_string()) {
            v.kind = Value::Kind::String;
            v.s = val.get<std::string>();
        } else if (val.is_number()) {
            v.kind = Value::Kind::Number;
            v.num = val.get<double>();
        } else if (val.is_array()) {
            if (!val.empty() && val.front().is_string()) {
                v.kind = Value::Kind::StringArray;
                for (const auto& e : val) v.strs.push_back(e.get<std::string>());
            } else {
                v.kind = Value::Kind::NumberArray;
                for (const auto& e : val) v.nums.push_back(e.get<double>());
            }
        } else {
            throw ConfigError("config key '" + key + "' has unsupported type");
        }
        assign(cfg, key, v);
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    const std::string text = read_text_file(path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        return from_json_text(text);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml")
        return from_toml_text(text);
    throw ConfigError("config file must end in .toml or .json: " + path);
}

std::string ExperimentConfig::to_toml() const {
    std::string out;
    for_each_field(*this, [&out](const std::string& key, const std::string& v,
                                 bool) { out += key + " = " + v + "\n"; });
    return out;
}

std::string ExperimentConfig::to_json() const {
    std::string out = "{\n";
    bool first = true;
    for_each_field(*this, [&](const std::string& key, const std::string& v,
                              bool is_string) {
        if (!first) out += ",\n";
        first = false;
        if (is_string) {
            // value arrives TOML-quoted; re-escape for JSON
            const std::string raw = v.substr(1, v.size() - 2);
            out += "  \"" + key + "\": \"" + json_escape(raw) + "\"";
        } else {
            out += "  \"" + key + "\": " + v;
        }
    });
    out += "\n}\n";
    return out;
}

void ExperimentConfig::save(const std::string& path) const {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        write_text_file(path, to_json());
    else if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml")
        write_text_file(path, to_toml());
    else
        throw ConfigError("config file must end in .toml or .json: " + path);
}

}  // namespace potgames
