// First-order corrected energies, partition function and thermal
// occupations, all carried in log domain.
//
// Each spin branch has levels E = offset + spacing (n + 1/2), so
//   sum_n exp(-b E) = exp(-b (offset + spacing/2)) / (1 - exp(-b spacing)).

#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "qep/perturbation.hpp"

namespace qep {

/// Which expression is used for the spin-up gravitational energy shift.
///   first_order: lambda <n,+|V|n,+>, shift proportional to (1 + c_G)
///   printed:     shift proportional to (1 + c_I)
enum class EnergyForm { first_order, printed };

struct EnergyBranch {
    double offset;    // hbar*omega0
    double spacing;   // hbar*omega0
};

inline EnergyBranch energy_branch(const DimensionlessParams& p, const ViolationModel& model, Spin s,
                                  EnergyForm form = EnergyForm::first_order) {
    const double grav = 2.0 * p.nu * p.gtilde * p.gtilde;
    if (s == Spin::down) {
        return {-p.lambda * grav * model.xi_G.a, 1.0 - 0.5 * p.lambda * model.xi_I.a};
    }
    const double c_shift = form == EnergyForm::first_order ? model.xi_G.c : model.xi_I.c;
    return {p.eta - p.lambda * grav * (1.0 + c_shift), 1.0 - 0.5 * p.lambda * (1.0 + model.xi_I.c)};
}

inline double corrected_energy_hw(const DimensionlessParams& p, const ViolationModel& model, const StateLabel& l,
                                  EnergyForm form = EnergyForm::first_order) {
    const auto b = energy_branch(p, model, l.s, form);
    return b.offset + b.spacing * (l.n + 0.5);
}

/// Corrected energy of |n,s> in joules.
inline double corrected_energies(const PhysicalConfig& cfg, const ViolationModel& model, int n, Spin s,
                                 EnergyForm form = EnergyForm::first_order) {
    return cfg.hbar_omega0() * corrected_energy_hw(derive_dimensionless(cfg), model, {n, s}, form);
}

namespace detail {

inline double log_sum_exp(double a, double b) {
    const double m = std::max(a, b);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// log sum_{n >= n0} exp(-b (offset + spacing (n + 1/2)))
inline double log_branch_sum(double b, const EnergyBranch& br, int n0 = 0) {
    if (!(br.spacing > 0.0)) {
        throw ConfigError("partition function diverges: corrected level spacing is not positive");
    }
    return -b * (br.offset + br.spacing * (n0 + 0.5)) - std::log(-std::expm1(-b * br.spacing));
}

inline double reduced_beta(const PhysicalConfig& cfg, double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("temperature must be positive and finite");
    return cfg.hbar_omega0() / (cfg.constants.k_B * T);
}

}  // namespace detail

/// Natural log of the partition function.
inline double partition_function(const PhysicalConfig& cfg, const ViolationModel& model, double T,
                                 EnergyForm form = EnergyForm::first_order) {
    const auto p = derive_dimensionless(cfg);
    const double b = detail::reduced_beta(cfg, T);
    return detail::log_sum_exp(detail::log_branch_sum(b, energy_branch(p, model, Spin::down, form)),
                               detail::log_branch_sum(b, energy_branch(p, model, Spin::up, form)));
}

struct ThermalState {
    double T{0.0};
    double beta{0.0};                             // 1/(k_B T), 1/J
    double log_Z{0.0};                            // natural log
    std::map<StateLabel, double> log10_occupation;
    double log10_excited{0.0};                    // log10 P(any state other than |0,-1/2>)
};

inline ThermalState thermal_state(const PhysicalConfig& cfg, const ViolationModel& model, double T,
                                  int n_report = 5, EnergyForm form = EnergyForm::first_order) {
    const auto p = derive_dimensionless(cfg);
    const double b = detail::reduced_beta(cfg, T);
    const auto down = energy_branch(p, model, Spin::down, form);
    const auto up = energy_branch(p, model, Spin::up, form);

    ThermalState st;
    st.T = T;
    st.beta = 1.0 / (cfg.constants.k_B * T);
    st.log_Z = detail::log_sum_exp(detail::log_branch_sum(b, down), detail::log_branch_sum(b, up));
    for (int n = 0; n <= n_report; ++n) {
        for (Spin s : {Spin::down, Spin::up}) {
            const double e = corrected_energy_hw(p, model, {n, s}, form);
            st.log10_occupation[{n, s}] = (-b * e - st.log_Z) / std::numbers::ln10;
        }
    }
    const double log_excited = detail::log_sum_exp(detail::log_branch_sum(b, down, 1), detail::log_branch_sum(b, up));
    st.log10_excited = (log_excited - st.log_Z) / std::numbers::ln10;
    return st;
}

struct ThermalSignalReport {
    StateLabel first_excited;
    double log10_occupation{0.0};   // thermal population of the first excited state
    double log10_signal{0.0};       // LPI switch-off probability per unit violation
    double ratio{0.0};              // log10_occupation - log10_signal
    bool flagged{false};            // thermal population exceeds the signal
};

/// Thermal background against the LPI transition, which is evaluated for unit
/// violation (a = b = c = 1) regardless of `model`; `model` only shifts the levels.
inline ThermalSignalReport thermal_vs_signal(const PhysicalConfig& cfg, const ViolationModel& model, double T,
                                             EnergyForm form = EnergyForm::first_order) {
    const auto p = derive_dimensionless(cfg);
    const auto st = thermal_state(cfg, model, T, 1, form);
    ThermalSignalReport r;
    const StateLabel phonon{1, Spin::down}, flip{0, Spin::up};
    r.first_excited = corrected_energy_hw(p, model, phonon, form) < corrected_energy_hw(p, model, flip, form) ? phonon : flip;
    r.log10_occupation = st.log10_occupation.at(r.first_excited);
    r.log10_signal = transition_probabilities(p, ViolationModel::unit()).row(Principle::LPI).log10_probability;
    r.ratio = r.log10_occupation - r.log10_signal;
    r.flagged = r.ratio > 0.0;
    return r;
}

}  // namespace qep
