#include "potgames/speclang.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "potgames/errors.hpp"
#include "potgames/io.hpp"

namespace potgames {

namespace {

double parse_float(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(context + ": bad number '" + s + "'");
    }
}

std::vector<double> parse_float_list(const std::string& s,
                                     const std::string& context) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_float(item, context));
    if (out.empty()) throw ConfigError(context + ": empty list");
    return out;
}

/// "key=value" with value running to the end of the segment.
std::pair<std::string, std::string> parse_kv(const std::string& s,
                                             const std::string& context) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
        throw ConfigError(context + ": expected key=value, got '" + s + "'");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

/// Piecewise-linear final potential from tabulated (R, value) points.
struct TableFinal {
    std::vector<double> r;
    std::vector<double> v;

    double operator()(double x) const {
        if (x <= r.front()) {
            const double slope = (v[1] - v[0]) / (r[1] - r[0]);
            return v.front() + slope * (x - r.front());
        }
        if (x >= r.back()) {
            const std::size_t n = r.size();
            const double slope = (v[n - 1] - v[n - 2]) / (r[n - 1] - r[n - 2]);
            return v.back() + slope * (x - r.back());
        }
        const auto it = std::upper_bound(r.begin(), r.end(), x);
        const std::size_t hi = it - r.begin();
        const double w = (x - r[hi - 1]) / (r[hi] - r[hi - 1]);
        return v[hi - 1] * (1.0 - w) + v[hi] * w;
    }
};

FinalPotential load_table_final(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("table final: cannot open " + path);
    TableFinal table;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b)) continue;
        if (a == "r" || a == "R") continue;  // optional header
        table.r.push_back(parse_float(a, path));
        table.v.push_back(parse_float(b, path));
    }
    if (table.r.size() < 2)
        throw ConfigError("table final: need at least two points");
    for (std::size_t i = 1; i < table.r.size(); ++i) {
        if (!(table.r[i] > table.r[i - 1]))
            throw ConfigError("table final: R column must be strictly increasing");
        if (table.v[i] + 1e-12 < table.v[i - 1])
            throw ConfigError("table final: values must be nondecreasing");
    }
    for (const double val : table.v)
        if (!(val > 0.0))
            throw ConfigError("table final: values must be strictly positive");
    // discrete convexity: successive slopes must not decrease
    for (std::size_t i = 2; i < table.r.size(); ++i) {
        const double s0 =
            (table.v[i - 1] - table.v[i - 2]) / (table.r[i - 1] - table.r[i - 2]);
        const double s1 =
            (table.v[i] - table.v[i - 1]) / (table.r[i] - table.r[i - 1]);
        if (s1 + 1e-12 < s0)
            throw ConfigError("table final: values must be convex in R");
    }
    return FinalPotential(table, 2);
}

}  // namespace

FinalPotential parse_final_spec(const std::string& spec) {
    if (spec == "expfinal")
        return FinalPotential([](double r) { return std::exp(r); }, 4);

    if (spec.rfind("polyfinal:", 0) == 0) {
        const auto [key, value] = parse_kv(spec.substr(10), spec);
        if (key != "coeffs")
            throw ConfigError("polyfinal: expected coeffs=..., got " + key);
        const std::vector<double> coeffs = parse_float_list(value, spec);
        auto poly = [coeffs](double r) {
            double acc = 0.0;
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
                acc = acc * r + *it;
            return acc;
        };
        const auto report =
            strict_positivity_report(poly, 0, default_sp_grid());
        if (!report.passed)
            throw PositivityError(
                "polyfinal: polynomial is not strictly positive on the "
                "default grid");
        return FinalPotential(poly, 2);
    }

    if (spec.rfind("table:", 0) == 0) return load_table_final(spec.substr(6));

    throw ConfigError("unknown final-potential spec '" + spec + "'");
}

Potential parse_potential_spec(const std::string& spec) {
    if (spec == "normalhedge") return Potential::normal_hedge();

    if (spec.rfind("exp:", 0) == 0) {
        const auto [key, value] = parse_kv(spec.substr(4), spec);
        if (key != "eta")
            throw ConfigError("exp potential: expected eta=..., got " + key);
        return Potential::exponential(parse_float(value, spec));
    }

    if (spec.rfind("gaussfinal:", 0) == 0) {
        // final=<spec> may itself contain commas; later keys are found by
        // scanning for their ",key=" markers.
        std::string body = spec.substr(11);
        if (body.rfind("final=", 0) != 0)
            throw ConfigError("gaussfinal: expected final=<spec> first");
        body = body.substr(6);

        double horizon = 0.0;
        bool have_horizon = false;
        int order = 64;
        for (const char* key : {",horizon=", ",order="}) {
            const std::size_t pos = body.find(key);
            if (pos == std::string::npos) continue;
            std::size_t end = body.find(",horizon=", pos + 1);
            const std::size_t end2 = body.find(",order=", pos + 1);
            end = std::min(end, end2);
            const std::string value = body.substr(
                pos + std::string(key).size(),
                (end == std::string::npos ? body.size() : end) - pos -
                    std::string(key).size());
            if (std::string(key) == ",horizon=") {
                horizon = parse_float(value, spec);
                have_horizon = true;
            } else {
                order = static_cast<int>(parse_float(value, spec));
            }
        }
        const std::size_t cut = std::min(body.find(",horizon="),
                                         body.find(",order="));
        const std::string final_spec =
            cut == std::string::npos ? body : body.substr(0, cut);
        if (!have_horizon)
            throw ConfigError("gaussfinal: missing horizon=<float>");
        return Potential::gaussian_final(parse_final_spec(final_spec), horizon,
                                         order);
    }

    throw ConfigError("unknown potential spec '" + spec + "'");
}

AdversaryMove parse_adversary_spec(const std::string& spec) {
    if (spec == "random-walk" || spec == "random_walk")
        return AdversaryMove::random_walk(1.0);

    const std::size_t colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    std::vector<std::pair<std::string, std::string>> kvs;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) kvs.push_back(parse_kv(item, spec));
    }
    auto get = [&](const std::string& key, double fallback,
                   bool required) -> double {
        for (const auto& [k, v] : kvs)
            if (k == key) return parse_float(v, spec);
        if (required)
            throw ConfigError("adversary '" + spec + "': missing " + key + "=");
        return fallback;
    };
    for (const auto& [k, v] : kvs) {
        if (k != "s" && k != "p" && k != "l")
            throw ConfigError("adversary '" + spec + "': unknown key " + k);
    }

    if (kind == "random-walk" || kind == "random_walk")
        return AdversaryMove::random_walk(get("s", 1.0, false));
    if (kind == "biased")
        return AdversaryMove::biased(get("s", 0.0, true), get("p", 0.0, true));
    if (kind == "constant")
        return AdversaryMove::constant(get("l", 0.0, true), get("s", 1.0, false));
    throw ConfigError("unknown adversary spec '" + spec + "'");
}

AdversaryFn parse_adversary(const std::string& spec) {
    if (spec.rfind("script:", 0) == 0)
        return scripted_adversary(load_adversary_script_csv(spec.substr(7)));
    return fixed_adversary(parse_adversary_spec(spec));
}

LearnerKind parse_learner_spec(const std::string& spec) {
    if (spec == "potential") return LearnerKind::Potential;
    if (spec == "uniform") return LearnerKind::Uniform;
    throw ConfigError("unknown learner '" + spec + "' (potential|uniform)");
}

}  // namespace potgames
