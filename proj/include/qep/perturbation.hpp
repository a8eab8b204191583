// First-order corrected eigenstates of H = H0 + lambda V and
// the switch-off transition probabilities out of the corrected ground state.
//
// Amplitudes come from Rayleigh-Schrodinger first order evaluated term by term
// with closed-form matrix elements of V, never from a pre-simplified formula:
//
//   |psi1_{n,s}> = sum_{(l,r) != (n,s)} <l,r|V|n,s> / (E0_{n,s} - E0_{l,r}) |l,r>

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qep/basis.hpp"
#include "qep/core_model.hpp"

namespace qep {

inline constexpr double default_resonance_tol = 1e-6;

/// Unperturbed energy (n + 1/2) + eta [s = +1/2] in hbar*omega0.
inline double unperturbed_energy(const DimensionlessParams& p, const StateLabel& l) {
    return (l.n + 0.5) + (l.s == Spin::up ? p.eta : 0.0);
}

/// <k,r|V|n,s> from the ladder-operator matrix elements of P^2 and x.
inline cplx v_element(const DimensionlessParams& p, const ViolationModel& model,
                      const StateLabel& bra, const StateLabel& ket) {
    const int k = bra.n;
    const int n = ket.n;
    const cplx s_inertial = model.xi_I.spin_operator()(spin_index(bra.s), spin_index(ket.s));
    const cplx s_grav = model.xi_G.spin_operator()(spin_index(bra.s), spin_index(ket.s));

    double p2 = 0.0;
    if (k == n) p2 = 2.0 * n + 1.0;
    else if (k == n + 2) p2 = -std::sqrt((n + 1.0) * (n + 2.0));
    else if (k == n - 2) p2 = -std::sqrt(n * (n - 1.0));

    double x = 0.0;
    if (k == n + 1) x = p.gtilde * std::sqrt(n + 1.0);
    else if (k == n - 1) x = p.gtilde * std::sqrt(static_cast<double>(n));
    else if (k == n) x = -2.0 * p.nu * p.gtilde * p.gtilde;

    return -0.25 * p2 * s_inertial + x * s_grav;
}

/// Throws unless every spin-flip denominator 1 +- eta/m (m = 1, 2) and the
/// bare Zeeman splitting stay away from zero.
inline void check_resonance(double eta, double tol = default_resonance_tol) {
    if (eta <= tol) {
        throw ResonanceError("spin levels are degenerate (eta = " + std::to_string(eta) + ")");
    }
    for (double r : {eta, eta / 2.0}) {
        const double m = std::round(r);
        if (m >= 1.0 && std::abs(r - m) <= tol) {
            throw ResonanceError("eta = " + std::to_string(eta) + " is resonant with the trap");
        }
    }
}

/// First-order corrected state: zeroth-order label plus amplitudes in units of lambda.
struct PerturbedState {
    StateLabel label;
    std::map<StateLabel, cplx> first_order;   // every label with |dn| <= 2, both spins
    bool norm_order{true};                    // amplitudes are unnormalized first-order terms

    [[nodiscard]] double zeroth(const StateLabel& l) const { return l == label ? 1.0 : 0.0; }

    [[nodiscard]] cplx amplitude(const StateLabel& l) const {
        auto it = first_order.find(l);
        return it == first_order.end() ? cplx{} : it->second;
    }

    /// zeroth + lambda * first order.
    [[nodiscard]] cplx total(const StateLabel& l, double lambda) const {
        return zeroth(l) + lambda * amplitude(l);
    }
};

inline PerturbedState corrected_eigenstate(const DimensionlessParams& p, const ViolationModel& model,
                                           const StateLabel& target, const TruncatedBasis& basis = TruncatedBasis{},
                                           double resonance_tol = default_resonance_tol) {
    if (target.n < 0) throw ConfigError("oscillator level must be non-negative");
    if (target.n + 2 > basis.n_max()) {
        throw TruncationError("state " + to_string(target) + " is within 2 levels of n_max = " +
                              std::to_string(basis.n_max()));
    }
    check_resonance(p.eta, resonance_tol);

    PerturbedState state{target, {}, true};
    const double e_target = unperturbed_energy(p, target);
    for (int dn = -2; dn <= 2; ++dn) {
        const int l = target.n + dn;
        if (l < 0) continue;
        for (Spin r : {Spin::down, Spin::up}) {
            const StateLabel other{l, r};
            if (other == target) continue;
            const double gap = e_target - unperturbed_energy(p, other);
            state.first_order[other] = v_element(p, model, other, target) / gap;
        }
    }
    return state;
}

inline PerturbedState ground_state(const DimensionlessParams& p, const ViolationModel& model,
                                   const TruncatedBasis& basis = TruncatedBasis{}) {
    return corrected_eigenstate(p, model, {0, Spin::down}, basis);
}

/// Corrected |0,+1/2>; the only state that exposes c_I, c_G and unconjugated b_k.
inline PerturbedState spin_up_state(const DimensionlessParams& p, const ViolationModel& model,
                                    const TruncatedBasis& basis = TruncatedBasis{}) {
    return corrected_eigenstate(p, model, {0, Spin::up}, basis);
}

/// E0 + lambda <n,s|V|n,s>, in hbar*omega0.
inline double first_order_energy(const DimensionlessParams& p, const ViolationModel& model,
                                  const StateLabel& l) {
    return unperturbed_energy(p, l) + p.lambda * v_element(p, model, l, l).real();
}

enum class Principle { QWEP_star, LPI, QLPI, LLI, QLLI };
enum class Provenance { analytic, oracle };

inline const char* to_string(Principle p) {
    switch (p) {
        case Principle::QWEP_star: return "QWEP*";
        case Principle::LPI: return "LPI";
        case Principle::QLPI: return "QLPI";
        case Principle::LLI: return "LLI";
        case Principle::QLLI: return "QLLI";
    }
    return "?";
}

inline const char* to_string(Provenance p) { return p == Provenance::analytic ? "analytic" : "oracle"; }

/// Outcomes of the switch-off measurement other than |0,-1/2>, in table order.
inline constexpr std::array<std::pair<StateLabel, Principle>, 5> transition_rows{{
    {{0, Spin::up}, Principle::QWEP_star},
    {{1, Spin::down}, Principle::LPI},
    {{1, Spin::up}, Principle::QLPI},
    {{2, Spin::down}, Principle::LLI},
    {{2, Spin::up}, Principle::QLLI},
}};

struct TransitionRow {
    StateLabel label;
    Principle principle;
    double probability;         // may underflow to 0; log10_probability stays finite
    double log10_probability;   // -inf when the amplitude vanishes
    Provenance provenance;
};

struct TransitionTable {
    std::vector<TransitionRow> rows;
    std::optional<double> survival;   // P(0,-1/2), set by the switch-off protocol

    [[nodiscard]] const TransitionRow& row(Principle p) const {
        for (const auto& r : rows) {
            if (r.principle == p) return r;
        }
        throw std::out_of_range("principle not in table");
    }
};

/// lambda^2 |amplitude|^2, with its base-10 log evaluated without underflow.
inline TransitionRow make_row(const StateLabel& l, Principle pr, double lambda, cplx amp, Provenance prov) {
    const double mag = std::abs(amp);
    double lg = -std::numeric_limits<double>::infinity();
    if (mag > 0.0 && lambda > 0.0) lg = 2.0 * (std::log10(lambda) + std::log10(mag));
    return {l, pr, lambda * lambda * mag * mag, lg, prov};
}

inline TransitionTable transition_probabilities(const DimensionlessParams& p, const ViolationModel& model,
                                                const TruncatedBasis& basis = TruncatedBasis{}) {
    const auto gs = ground_state(p, model, basis);
    TransitionTable table;
    for (const auto& [label, principle] : transition_rows) {
        table.rows.push_back(make_row(label, principle, p.lambda, gs.amplitude(label), Provenance::analytic));
    }
    return table;
}

namespace detail {

inline std::string csv_double(double v) {
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_table_csv(std::ostream& os, const TransitionTable& t) {
    os << "n,s,principle,probability,log10_probability,provenance\n";
    for (const auto& r : t.rows) {
        os << r.label.n << ',' << spin_name(r.label.s) << ',' << to_string(r.principle) << ','
           << detail::csv_double(r.probability) << ',' << detail::csv_double(r.log10_probability) << ','
           << to_string(r.provenance) << '\n';
    }
}

}  // namespace qep
