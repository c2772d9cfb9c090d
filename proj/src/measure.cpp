#include "potgames/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace potgames {

namespace {

// Neumaier-compensated sum: keeps the mass invariant at 1e-12 even for
// states near the 2^20 atom cap.
double compensated_mass_sum(const std::vector<Atom>& atoms) {
    double sum = 0.0, comp = 0.0;
    for (const Atom& a : atoms) {
        const double t = sum + a.mass;
        comp += std::abs(sum) >= std::abs(a.mass) ? (sum - t) + a.mass
                                                  : (a.mass - t) + sum;
        sum = t;
    }
    return sum + comp;
}

void validate_masses(const std::vector<Atom>& atoms) {
    if (atoms.empty())
        throw std::invalid_argument("RegretState: at least one atom required");
    if (atoms.size() > kMaxAtoms)
        throw std::length_error("RegretState: atom cap (2^20) exceeded");
    for (const Atom& a : atoms) {
        if (!(a.mass > 0.0))
            throw std::invalid_argument("RegretState: masses must be > 0");
        if (!std::isfinite(a.regret))
            throw std::invalid_argument("RegretState: regrets must be finite");
    }
    if (std::abs(compensated_mass_sum(atoms) - 1.0) > 1e-9)
        throw std::invalid_argument("RegretState: masses must sum to 1");
}

void renormalize(std::vector<Atom>& atoms) {
    const double total = compensated_mass_sum(atoms);
    for (Atom& a : atoms) a.mass /= total;
}

// Sorted input; merges runs of atoms within kMergeTolerance at their
// mass-weighted mean regret.
std::vector<Atom> merge_sorted(std::vector<Atom> atoms) {
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const Atom& a : atoms) {
        if (!out.empty() && a.regret - out.back().regret < kMergeTolerance) {
            Atom& b = out.back();
            const double m = b.mass + a.mass;
            b.regret = (b.regret * b.mass + a.regret * a.mass) / m;
            b.mass = m;
        } else {
            out.push_back(a);
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// RegretState
// ---------------------------------------------------------------------------

RegretState RegretState::point_mass(double regret) {
    return from_atoms({{regret, 1.0}});
}

RegretState RegretState::from_atoms(std::vector<Atom> atoms) {
    validate_masses(atoms);
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.regret < b.regret; });
    atoms = merge_sorted(std::move(atoms));
    renormalize(atoms);
    RegretState s;
    s.atoms_ = std::move(atoms);
    return s;
}

RegretState RegretState::from_labeled(std::vector<Atom> atoms,
                                      std::vector<std::string> labels) {
    if (labels.size() != atoms.size())
        throw std::invalid_argument("RegretState: one label per atom required");
    validate_masses(atoms);
    std::vector<std::size_t> idx(atoms.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return atoms[a].regret < atoms[b].regret;
    });
    RegretState s;
    s.atoms_.reserve(atoms.size());
    s.labels_.reserve(atoms.size());
    for (std::size_t i : idx) {
        s.atoms_.push_back(atoms[i]);
        s.labels_.push_back(std::move(labels[i]));
    }
    renormalize(s.atoms_);
    return s;
}

RegretState RegretState::uniform_experts(int n) {
    if (n < 1)
        throw std::invalid_argument("uniform_experts: need at least 1 expert");
    std::vector<Atom> atoms(n, Atom{0.0, 1.0 / n});
    std::vector<std::string> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = std::to_string(i);
    return from_labeled(std::move(atoms), std::move(labels));
}

double RegretState::mean() const {
    double m = 0.0;
    for (const Atom& a : atoms_) m += a.mass * a.regret;
    return m;
}

double RegretState::variance() const {
    const double mu = mean();
    double v = 0.0;
    for (const Atom& a : atoms_) {
        const double d = a.regret - mu;
        v += a.mass * d * d;
    }
    return v;
}

double RegretState::tail_mass(double r) const {
    double tail = 0.0;
    for (auto it = atoms_.rbegin(); it != atoms_.rend(); ++it) {
        if (it->regret < r) break;
        tail += it->mass;
    }
    return tail;
}

// ---------------------------------------------------------------------------
// LossDist / LossMap
// ---------------------------------------------------------------------------

double LossDist::mean() const {
    double m = 0.0;
    for (auto [y, q] : points) m += q * y;
    return m;
}

double LossDist::second_moment() const {
    double m = 0.0;
    for (auto [y, q] : points) m += q * y * y;
    return m;
}

LossMap::LossMap(double step_size, std::vector<LossDist> per_atom)
    : step_size_(step_size), per_atom_(std::move(per_atom)) {
    if (!(step_size_ > 0.0) || step_size_ > 1.0)
        throw std::invalid_argument("LossMap: step size must be in (0, 1]");
    if (per_atom_.empty())
        throw std::invalid_argument("LossMap: no per-atom distributions");
    for (const LossDist& d : per_atom_) {
        if (d.points.empty())
            throw std::invalid_argument("LossMap: empty loss distribution");
        double total = 0.0;
        for (auto [y, q] : d.points) {
            if (q < 0.0)
                throw std::invalid_argument("LossMap: negative probability");
            if (std::abs(y) > step_size_ + 1e-15)
                throw std::invalid_argument(
                    "LossMap: loss outside [-s, +s] support bound");
            total += q;
        }
        if (std::abs(total - 1.0) > kMassTolerance)
            throw std::invalid_argument(
                "LossMap: per-atom probabilities must sum to 1");
    }
}

LossMap LossMap::uniform(double step_size, LossDist dist, std::size_t n) {
    return LossMap(step_size, std::vector<LossDist>(n, std::move(dist)));
}

// ---------------------------------------------------------------------------
// operations
// ---------------------------------------------------------------------------

double score(const RegretState& state, const Potential& p, double t) {
    double acc = 0.0;
    for (const Atom& a : state.atoms()) acc += a.mass * p.eval(t, a.regret);
    return acc;
}

double score(const RegretState& state,
             const std::function<double(double)>& phi) {
    double acc = 0.0;
    for (const Atom& a : state.atoms()) acc += a.mass * phi(a.regret);
    return acc;
}

double epsilon_regret(const RegretState& state, double eps) {
    if (!(eps > 0.0) || eps > 1.0)
        throw std::invalid_argument("epsilon_regret: eps must be in (0, 1]");
    double cum = 0.0;
    const auto& atoms = state.atoms();
    for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
        cum += it->mass;
        if (cum + kMassTolerance >= eps) return it->regret;
    }
    return state.min_regret();
}

RegretState binomial_dist(int n, double s) {
    if (n < 0) throw std::invalid_argument("binomial_dist: n must be >= 0");
    if (!(s > 0.0)) throw std::invalid_argument("binomial_dist: s must be > 0");

    std::vector<double> mass(n + 1, 0.0);
    if (n <= 60) {
        mass[0] = std::ldexp(1.0, -n);
        for (int j = 0; j < n; ++j)
            mass[j + 1] = mass[j] * (n - j) / (j + 1.0);
    } else {
        // log-space binomial coefficients; mirrored for exact symmetry
        const double ln2 = std::log(2.0);
        for (int j = 0; j <= n / 2; ++j) {
            const double lw = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                              std::lgamma(n - j + 1.0) - n * ln2;
            mass[j] = std::exp(lw);
            mass[n - j] = mass[j];
        }
    }

    std::vector<Atom> atoms;
    atoms.reserve(n + 1);
    for (int j = 0; j <= n; ++j) {
        if (mass[j] > 0.0) atoms.push_back({(2.0 * j - n) * s, mass[j]});
    }
    return RegretState::from_atoms(std::move(atoms));
}

RegretState convolve_step(const RegretState& state, const LossMap& losses,
                          double ell) {
    if (losses.per_atom().size() != state.size())
        throw std::invalid_argument(
            "convolve_step: per-atom distributions misaligned with state");

    const auto& atoms = state.atoms();
    if (state.labeled()) {
        // Expert atoms carry identity: each must move deterministically.
        std::vector<Atom> out;
        out.reserve(atoms.size());
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const LossDist& d = losses.per_atom()[i];
            if (d.points.size() != 1)
                throw std::invalid_argument(
                    "convolve_step: labeled states require point-mass losses");
            out.push_back(
                {atoms[i].regret + (ell - d.points[0].first), atoms[i].mass});
        }
        return RegretState::from_labeled(std::move(out), state.labels());
    }

    std::size_t count = 0;
    for (const LossDist& d : losses.per_atom()) count += d.points.size();
    if (count > kMaxAtoms)
        throw std::length_error("convolve_step: atom cap (2^20) exceeded");

    std::vector<Atom> out;
    out.reserve(count);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        for (auto [y, q] : losses.per_atom()[i].points) {
            if (q > 0.0)
                out.push_back({atoms[i].regret + (ell - y), atoms[i].mass * q});
        }
    }
    return RegretState::from_atoms(std::move(out));
}

bool srb_check(const RegretState& state, const BoundFunction& bound,
               std::span<const double> grid, double slack) {
    if (!bound.g) throw std::invalid_argument("srb_check: empty bound");
    if (grid.empty()) throw std::invalid_argument("srb_check: empty grid");

    std::vector<double> g_values;
    g_values.reserve(grid.size());
    double prev_g = 0.0, prev_r = 0.0;
    bool have_prev = false;
    for (double r : grid) {
        const double g = bound.g(r);
        if (g < -kMassTolerance || g > 1.0 + kMassTolerance)
            throw std::invalid_argument("srb_check: bound leaves [0, 1]");
        if (have_prev && r > prev_r && g > prev_g + kMassTolerance)
            throw std::invalid_argument("srb_check: bound is not nonincreasing");
        g_values.push_back(g);
        prev_g = g;
        prev_r = r;
        have_prev = true;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (state.tail_mass(grid[i]) > g_values[i] + slack) return false;
    }
    return true;
}

double apb_score(const RegretState& state,
                 const std::function<double(double)>& phi) {
    double acc = 0.0;
    for (const Atom& a : state.atoms()) {
        const double v = phi(a.regret);
        if (!(v > 0.0))
            throw std::domain_error("apb_score: nonpositive potential value");
        acc += a.mass * v;
    }
    return acc;
}

}  // namespace potgames
