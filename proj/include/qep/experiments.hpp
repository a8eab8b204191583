// Switch-off and free-fall protocols, Monte-Carlo shot
// sampling and violation-parameter bounds from shot counts.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "qep/hamiltonian.hpp"
#include "qep/perturbation.hpp"

namespace qep {

/// Transition table plus the probability of staying in |0,-1/2>.
inline TransitionTable switch_off_protocol(const DimensionlessParams& p, const ViolationModel& model,
                                           const TruncatedBasis& basis = TruncatedBasis{}) {
    auto table = transition_probabilities(p, model, basis);
    double total = 0.0;
    for (const auto& r : table.rows) total += r.probability;
    table.survival = 1.0 - total;
    return table;
}

// ---------------------------------------------------------------------------
// Free fall
// ---------------------------------------------------------------------------

struct FreeFallResult {
    PhysicalConfig config;
    double alpha{0.0};
    double energy_J{0.0};                // hbar omega0/2 + m nu^2 g^2 / (2 omega0^2)
    double energy_hw{0.0};               // same, in hbar*omega0
    double energy_numeric_hw{0.0};       // <0|D(alpha) H0 D(-alpha)|0> in the truncated basis
    double relative_deviation{0.0};      // |numeric - analytic| / analytic
    std::optional<double> nu_hat;        // from the analytic energy; empty when g = 0
    std::optional<double> nu_hat_numeric;
    bool truncation_warning{false};
};

/// nu = (omega0/g) sqrt(2 (<H_f> - hbar omega0/2) / m_I).
inline std::optional<double> infer_nu(const PhysicalConfig& cfg, double energy_J) {
    if (cfg.g == 0.0) return std::nullopt;
    const double excess = energy_J - 0.5 * cfg.hbar_omega0();
    return (cfg.omega0 / cfg.g) * std::sqrt(2.0 * std::max(excess, 0.0) / cfg.m_I());
}

inline FreeFallResult free_fall_expectation(const PhysicalConfig& cfg, const TruncatedBasis& basis = TruncatedBasis{}) {
    const auto p = derive_dimensionless(cfg);
    const double hw = cfg.hbar_omega0();

    FreeFallResult r;
    r.config = cfg;
    r.alpha = p.alpha;
    r.energy_J = 0.5 * hw + cfg.m_I() * cfg.nu * cfg.nu * cfg.g * cfg.g / (2.0 * cfg.omega0 * cfg.omega0);
    r.energy_hw = r.energy_J / hw;

    // D(-alpha)|0,-1/2>; the spin is irrelevant with the field off
    const auto d = build_displacement(-p.alpha, basis);
    const Eigen::VectorXcd psi = d.data.col(0);
    const auto h0 = build_H0(p, basis);
    r.energy_numeric_hw = psi.dot(h0.data * psi).real();
    r.relative_deviation = std::abs(r.energy_numeric_hw - r.energy_hw) / r.energy_hw;

    r.nu_hat = infer_nu(cfg, r.energy_J);
    r.nu_hat_numeric = infer_nu(cfg, r.energy_numeric_hw * hw);
    r.truncation_warning = displacement_leaks(p.alpha, basis);
    return r;
}

// ---------------------------------------------------------------------------
// Shot sampling
// ---------------------------------------------------------------------------

struct ShotRecord {
    StateLabel label;
    std::uint64_t count{0};
    std::uint64_t total{0};
    std::uint64_t seed{0};
};

inline constexpr std::uint64_t max_shots = 1'000'000'000'000'000'000ULL;

/// Below this probability a row is drawn as Poisson(n p) instead of binomial.
inline constexpr double poisson_threshold = 1e-15;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent engine for stream `stream` of `seed`.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

}  // namespace detail

/// One record per table row followed by the survival outcome |0,-1/2>.
/// Rows are drawn as conditional binomials so the counts always sum to n_shots.
inline std::vector<ShotRecord> sample_shots(const TransitionTable& table, std::uint64_t n_shots, std::uint64_t seed) {
    if (n_shots < 1) throw ConfigError("n_shots must be at least 1");
    if (n_shots > max_shots) throw ConfigError("n_shots exceeds 1e18");

    std::vector<ShotRecord> out;
    std::uint64_t remaining = n_shots;
    double mass_left = 1.0;
    std::uint64_t stream = 0;
    for (const auto& row : table.rows) {
        if (!(row.probability >= 0.0) || row.probability > 1.0) throw ConfigError("invalid row probability");
        auto eng = detail::stream_engine(seed, stream++);
        std::uint64_t k = 0;
        if (remaining > 0 && std::isfinite(row.log10_probability)) {
            if (row.probability < poisson_threshold) {
                const double mean = std::pow(10.0, std::log10(static_cast<double>(n_shots)) + row.log10_probability);
                if (mean > 0.0) {
                    std::poisson_distribution<long long> dist(mean);
                    k = std::min<std::uint64_t>(static_cast<std::uint64_t>(dist(eng)), remaining);
                }
            } else {
                const double q = std::min(1.0, row.probability / mass_left);
                std::binomial_distribution<long long> dist(static_cast<long long>(remaining), q);
                k = static_cast<std::uint64_t>(dist(eng));
            }
        }
        mass_left = std::max(0.0, mass_left - row.probability);
        remaining -= k;
        out.push_back({row.label, k, n_shots, seed});
    }
    out.push_back({{0, Spin::down}, remaining, n_shots, seed});
    return out;
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

struct ParameterBound {
    std::string parameter;
    Principle principle;
    std::uint64_t count{0};
    double p_lower{0.0};
    double p_upper{0.0};
    double lower{0.0};
    double upper{0.0};
    bool rule_of_three{false};   // zero events: upper = 3 / n
};

struct ViolationBounds {
    std::uint64_t n_shots{0};
    std::vector<ParameterBound> bounds;

    [[nodiscard]] const ParameterBound& get(Principle p) const {
        for (const auto& b : bounds) {
            if (b.principle == p) return b;
        }
        throw std::out_of_range("principle not bounded");
    }
};

namespace detail {

/// |first-order amplitude| per unit of the single parameter a row is sensitive to.
inline double unit_coefficient(const DimensionlessParams& p, Principle pr, const StateLabel& label) {
    ViolationModel m;
    switch (pr) {
        case Principle::QWEP_star: return 1.0;   // bounded on the combined amplitude itself
        case Principle::LPI: m.xi_G.a = 1.0; break;
        case Principle::QLPI: m.xi_G.b = 1.0; break;
        case Principle::LLI: m.xi_I.a = 1.0; break;
        case Principle::QLLI: m.xi_I.b = 1.0; break;
    }
    return std::abs(ground_state(p, m).amplitude(label));
}

inline const char* parameter_name(Principle pr) {
    switch (pr) {
        case Principle::QWEP_star: return "|b_I/(4 eta) + 2 nu gtilde^2 b_G/eta|";
        case Principle::LPI: return "a_G";
        case Principle::QLPI: return "|b_G|";
        case Principle::LLI: return "a_I";
        case Principle::QLLI: return "|b_I|";
    }
    return "?";
}

}  // namespace detail

inline constexpr double bound_confidence = 0.95;

/// Zero counts give the rule-of-three upper bound 3/n; non-zero counts give a
/// two-sided Clopper-Pearson interval. Both are mapped through
/// P = lambda^2 coef^2 x^2 onto the violation parameter x.
inline ViolationBounds bound_violations(const std::vector<ShotRecord>& records, const PhysicalConfig& cfg) {
    if (records.empty()) throw ConfigError("no shot records");
    const std::uint64_t n = records.front().total;
    if (n == 0) throw ConfigError("n_shots must be positive");
    std::uint64_t sum = 0;
    std::map<StateLabel, std::uint64_t> counts;
    for (const auto& r : records) {
        if (r.total != n) throw ConfigError("shot records disagree on the total");
        if (r.count > n) throw ConfigError("count exceeds total shots");
        sum += r.count;
        counts[r.label] += r.count;
    }
    if (sum != n) throw ConfigError("shot counts do not sum to the total");

    const auto p = derive_dimensionless(cfg);
    const double alpha = 1.0 - bound_confidence;
    ViolationBounds out{n, {}};
    for (const auto& [label, principle] : transition_rows) {
        ParameterBound b;
        b.parameter = detail::parameter_name(principle);
        b.principle = principle;
        b.count = counts.count(label) ? counts.at(label) : 0;
        const double nd = static_cast<double>(n);
        if (b.count == 0) {
            b.rule_of_three = true;
            b.p_lower = 0.0;
            b.p_upper = std::min(1.0, 3.0 / nd);
        } else {
            using boost::math::binomial_distribution;
            const double k = static_cast<double>(b.count);
            b.p_lower = binomial_distribution<>::find_lower_bound_on_p(nd, k, alpha / 2.0);
            b.p_upper = binomial_distribution<>::find_upper_bound_on_p(nd, k, alpha / 2.0);
        }
        const double scale = p.lambda * detail::unit_coefficient(p, principle, label);
        b.lower = std::sqrt(b.p_lower) / scale;
        b.upper = std::sqrt(b.p_upper) / scale;
        out.bounds.push_back(b);
    }
    return out;
}

}  // namespace qep
