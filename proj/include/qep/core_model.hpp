// Physical configuration, isotope presets, violation operators
// and the dimensionless parameters every other module works in.
//
// Internal unit system: energies in units of hbar*omega0, positions in units of
// the oscillator length sqrt(hbar / (m_I omega0)).

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "qep/constants.hpp"
#include "qep/errors.hpp"

namespace qep {

using cplx = std::complex<double>;

/// Largest mu*B / (m_I c^2) for which the first-order mass expansion is trusted.
inline constexpr double max_expansion_parameter = 1e-3;

/// Experimental setup. Mass and moment are stored in atomic units so that a
/// serialized configuration reproduces every derived quantity bit for bit.
struct PhysicalConfig {
    double mass_u{3.016};          // inertial ground mass, atomic mass units
    double moment_nm{2.128};       // magnetic moment, nuclear magnetons
    double B{1.0};                 // field magnitude, T
    double omega0{1e4};            // trap angular frequency, rad / s
    double g{standard_gravity};    // m / s^2
    double nu{1.0};                // m_G / m_I
    Constants constants{};
    bool include_rest_offset{false};

    [[nodiscard]] double m_I() const { return mass_u * atomic_mass_unit; }
    [[nodiscard]] double mu() const { return moment_nm * nuclear_magneton; }
    [[nodiscard]] double hbar_omega0() const { return constants.hbar * omega0; }
};

/// One 2x2 Hermitian violation operator xi_k in the (-1/2, +1/2) spin basis.
/// b is the lower-left element <+1/2|xi|-1/2>.
struct ViolationOperator {
    double a{0.0};
    cplx b{0.0, 0.0};
    double c{0.0};

    [[nodiscard]] Eigen::Matrix2cd matrix() const {
        Eigen::Matrix2cd m;
        m << cplx(a, 0.0), std::conj(b),
             b,            cplx(c, 0.0);
        return m;
    }

    /// Spin part of the perturbation: S_k = xi_k + |+1/2><+1/2|.
    [[nodiscard]] Eigen::Matrix2cd spin_operator() const {
        Eigen::Matrix2cd m = matrix();
        m(1, 1) += 1.0;
        return m;
    }

    [[nodiscard]] ViolationOperator scaled(double t) const { return {t * a, t * b, t * c}; }

    [[nodiscard]] bool is_zero() const { return a == 0.0 && b == cplx{} && c == 0.0; }

    static ViolationOperator from_matrix(const Eigen::Matrix2cd& m, double tol = 1e-12) {
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol * scale) {
            throw ConfigError("violation operator is not Hermitian");
        }
        return {m(0, 0).real(), m(1, 0), m(1, 1).real()};
    }

    bool operator==(const ViolationOperator&) const = default;
};

/// Inertial (LLI) and gravitational (LPI) violation operators.
struct ViolationModel {
    ViolationOperator xi_I{};
    ViolationOperator xi_G{};

    static ViolationModel zero() { return {}; }

    /// a_k = b_k = c_k = 1 for both operators ("per unit violation").
    static ViolationModel unit() { return {{1.0, {1.0, 0.0}, 1.0}, {1.0, {1.0, 0.0}, 1.0}}; }

    [[nodiscard]] ViolationModel scaled(double t) const { return {xi_I.scaled(t), xi_G.scaled(t)}; }
    [[nodiscard]] bool is_zero() const { return xi_I.is_zero() && xi_G.is_zero(); }

    bool operator==(const ViolationModel&) const = default;
};

/// Dimensionless ratios that fully determine the truncated Hamiltonian.
struct DimensionlessParams {
    double lambda{0.0};   // mu B / (m_I c^2)
    double eta{0.0};      // mu B / (hbar omega0)
    double gtilde{0.0};   // g sqrt(m_I / (2 hbar omega0^3))
    double nu{1.0};       // m_G / m_I
    double alpha{0.0};    // nu * gtilde, free-fall displacement

    /// Same physics with an inflated (or deflated) expansion parameter.
    [[nodiscard]] DimensionlessParams with_lambda(double l) const {
        DimensionlessParams p = *this;
        p.lambda = l;
        return p;
    }

    static DimensionlessParams make(double lambda, double eta, double gtilde, double nu = 1.0) {
        return {lambda, eta, gtilde, nu, nu * gtilde};
    }

    bool operator==(const DimensionlessParams&) const = default;
};

inline void validate(const PhysicalConfig& cfg) {
    const std::array<double, 9> values{cfg.mass_u, cfg.moment_nm, cfg.B, cfg.omega0, cfg.g, cfg.nu,
                                       cfg.constants.hbar, cfg.constants.c, cfg.constants.k_B};
    for (double v : values) {
        if (!std::isfinite(v)) throw ConfigError("configuration contains a non-finite value");
    }
    if (cfg.mass_u <= 0.0) throw ConfigError("mass must be positive");
    if (cfg.omega0 <= 0.0) throw ConfigError("trap frequency must be positive");
    if (cfg.B < 0.0) throw ConfigError("field magnitude must be non-negative");
    if (cfg.moment_nm < 0.0) throw ConfigError("magnetic moment must be non-negative");
    if (cfg.g < 0.0) throw ConfigError("gravitational acceleration must be non-negative");
    if (cfg.nu <= 0.0) throw ConfigError("nu = m_G/m_I must be positive");
    if (cfg.constants.hbar <= 0.0 || cfg.constants.c <= 0.0 || cfg.constants.k_B <= 0.0) {
        throw ConfigError("fundamental constants must be positive");
    }
}

inline void validate(const ViolationModel& model) {
    for (const auto* xi : {&model.xi_I, &model.xi_G}) {
        if (!std::isfinite(xi->a) || !std::isfinite(xi->c) || !std::isfinite(xi->b.real()) ||
            !std::isfinite(xi->b.imag())) {
            throw ConfigError("violation operator contains a non-finite entry");
        }
    }
}

inline DimensionlessParams derive_dimensionless(const PhysicalConfig& cfg) {
    validate(cfg);
    const double m = cfg.m_I();
    const double zeeman = cfg.mu() * cfg.B;
    const double hw = cfg.hbar_omega0();
    const double c2 = cfg.constants.c * cfg.constants.c;

    DimensionlessParams p;
    p.lambda = zeeman / (m * c2);
    p.eta = zeeman / hw;
    p.gtilde = cfg.g * std::sqrt(m / (2.0 * cfg.constants.hbar * cfg.omega0 * cfg.omega0 * cfg.omega0));
    p.nu = cfg.nu;
    p.alpha = cfg.nu * p.gtilde;

    if (!std::isfinite(p.lambda) || !std::isfinite(p.eta) || !std::isfinite(p.gtilde)) {
        throw ConfigError("derived parameters are not finite");
    }
    if (p.lambda >= max_expansion_parameter) {
        throw ConfigError("mu*B/(m_I c^2) = " + std::to_string(p.lambda) +
                          " is outside the validity range of the mass expansion");
    }
    return p;
}

/// Rest energy plus the constant left over from completing the square, in hbar*omega0.
/// Only a global phase; excluded from matrices unless requested.
inline double rest_offset(const PhysicalConfig& cfg) {
    const double hw = cfg.hbar_omega0();
    const double m = cfg.m_I();
    const double rest = m * cfg.constants.c * cfg.constants.c / hw;
    const double shift = 0.5 * m * cfg.nu * cfg.nu * cfg.g * cfg.g / (cfg.omega0 * cfg.omega0) / hw;
    return rest - shift;
}

struct AtomPreset {
    std::string_view name;
    double mass_u;
    double moment_nm;
};

inline constexpr std::array<AtomPreset, 2> atom_presets{{
    {"3He", 3.016, 2.128},
    {"171Yb", 170.936, 0.492},
}};

/// Isotope preset in a 1 T field with a 10^4 rad/s trap and nu = 1.
inline PhysicalConfig preset(std::string_view name) {
    for (const auto& p : atom_presets) {
        if (p.name == name) {
            PhysicalConfig cfg;
            cfg.mass_u = p.mass_u;
            cfg.moment_nm = p.moment_nm;
            cfg.B = 1.0;
            cfg.omega0 = 1e4;
            cfg.g = standard_gravity;
            cfg.nu = 1.0;
            return cfg;
        }
    }
    throw ConfigError("unknown isotope preset '" + std::string(name) + "'");
}

}  // namespace qep
