// H0, the mass-operator perturbation V, the full H and the
// free-fall displacement operator over a truncated oscillator ⊗ spin basis.
//
// Matrices are dense and in units of hbar*omega0. With p, X the oscillator
// momentum and position in natural units (P = sqrt(m hbar omega0) p,
// X = sqrt(hbar/(m omega0)) X):
//
//   H0 = (p^2 + X^2)/2 ⊗ 1 + eta |+><+|
//   V  = -(p^2/2) ⊗ S_I + sqrt(2) gtilde x ⊗ S_G,    x = X - sqrt(2) nu gtilde
//   H  = H0 + lambda V

#pragma once

#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qep/basis.hpp"
#include "qep/core_model.hpp"

namespace qep {

enum class OperatorLabel { H0, V, H_full, P2, X, x, D_alpha, N };

inline const char* to_string(OperatorLabel l) {
    switch (l) {
        case OperatorLabel::H0: return "H0";
        case OperatorLabel::V: return "V";
        case OperatorLabel::H_full: return "H_full";
        case OperatorLabel::P2: return "P2";
        case OperatorLabel::X: return "X";
        case OperatorLabel::x: return "x";
        case OperatorLabel::D_alpha: return "D_alpha";
        case OperatorLabel::N: return "N";
    }
    return "?";
}

struct OperatorMatrix {
    Eigen::MatrixXcd data;
    OperatorLabel label;
    TruncatedBasis basis;

    /// max |A - A^dagger|, relative to max |A| (absolute when A = 0).
    [[nodiscard]] double hermiticity_residual() const {
        const double scale = data.cwiseAbs().maxCoeff();
        const double r = (data - data.adjoint()).cwiseAbs().maxCoeff();
        return scale > 0.0 ? r / scale : r;
    }

    [[nodiscard]] double unitarity_residual() const {
        const auto id = Eigen::MatrixXcd::Identity(data.rows(), data.cols());
        return (data * data.adjoint() - id).cwiseAbs().maxCoeff();
    }

    [[nodiscard]] cplx operator()(const StateLabel& row, const StateLabel& col) const {
        return data(basis.index(row), basis.index(col));
    }
};

namespace detail {

/// <k|p^2|n> = ((2n+1) d_kn - sqrt((n+1)(n+2)) d_k,n+2 - sqrt(n(n-1)) d_k,n-2) / 2
inline Eigen::MatrixXd oscillator_p2(int dim) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) {
        m(n, n) = 0.5 * (2.0 * n + 1.0);
        if (n + 2 < dim) {
            const double off = -0.5 * std::sqrt((n + 1.0) * (n + 2.0));
            m(n + 2, n) = off;
            m(n, n + 2) = off;
        }
    }
    return m;
}

/// <k|X|n> = (sqrt(n+1) d_k,n+1 + sqrt(n) d_k,n-1) / sqrt(2)
inline Eigen::MatrixXd oscillator_X(int dim) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n + 1 < dim; ++n) {
        const double off = std::sqrt((n + 1.0) / 2.0);
        m(n + 1, n) = off;
        m(n, n + 1) = off;
    }
    return m;
}

inline Eigen::MatrixXcd lift(const Eigen::MatrixXd& osc, const Eigen::Matrix2cd& spin) {
    Eigen::MatrixXcd o = osc.cast<cplx>();
    return Eigen::kroneckerProduct(o, spin).eval();
}

inline Eigen::MatrixXcd lift(const Eigen::MatrixXd& osc) {
    return lift(osc, Eigen::Matrix2cd::Identity());
}

}  // namespace detail

inline OperatorMatrix build_H0(const DimensionlessParams& p, const TruncatedBasis& basis) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
    for (int i = 0; i < basis.dim(); ++i) {
        const auto l = basis.label(i);
        h(i, i) = (l.n + 0.5) + (l.s == Spin::up ? p.eta : 0.0);
    }
    return {std::move(h), OperatorLabel::H0, basis};
}

/// Dimensionless p^2 (so P^2/2m = p^2/2 in hbar*omega0).
inline OperatorMatrix build_matrix_P2(const TruncatedBasis& basis) {
    return {detail::lift(detail::oscillator_p2(basis.oscillator_dim())), OperatorLabel::P2, basis};
}

/// Trap-centred position X in oscillator lengths.
inline OperatorMatrix build_matrix_X(const TruncatedBasis& basis) {
    return {detail::lift(detail::oscillator_X(basis.oscillator_dim())), OperatorLabel::X, basis};
}

/// Lab-frame position x = X - nu g / omega0^2 in oscillator lengths.
inline OperatorMatrix build_matrix_x(const DimensionlessParams& p, const TruncatedBasis& basis) {
    Eigen::MatrixXd x = detail::oscillator_X(basis.oscillator_dim());
    x.diagonal().array() -= std::sqrt(2.0) * p.nu * p.gtilde;
    return {detail::lift(x), OperatorLabel::x, basis};
}

inline OperatorMatrix build_number(const TruncatedBasis& basis) {
    Eigen::MatrixXd n = Eigen::VectorXd::LinSpaced(basis.oscillator_dim(), 0.0, basis.n_max()).asDiagonal();
    return {detail::lift(n), OperatorLabel::N, basis};
}

inline OperatorMatrix build_V(const DimensionlessParams& p, const ViolationModel& model,
                              const TruncatedBasis& basis) {
    const int dim = basis.oscillator_dim();
    Eigen::MatrixXd x = detail::oscillator_X(dim);
    x.diagonal().array() -= std::sqrt(2.0) * p.nu * p.gtilde;

    Eigen::MatrixXcd v = detail::lift(-0.5 * detail::oscillator_p2(dim), model.xi_I.spin_operator());
    v += detail::lift(std::sqrt(2.0) * p.gtilde * x, model.xi_G.spin_operator());
    return {std::move(v), OperatorLabel::V, basis};
}

/// H = H0 + lambda V, plus rest_offset * 1 when requested.
inline OperatorMatrix build_full_H(const DimensionlessParams& p, const ViolationModel& model,
                                   const TruncatedBasis& basis, double rest_offset = 0.0) {
    Eigen::MatrixXcd h = build_H0(p, basis).data;
    if (p.lambda != 0.0) h += p.lambda * build_V(p, model, basis).data;
    if (rest_offset != 0.0) h.diagonal().array() += rest_offset;
    return {std::move(h), OperatorLabel::H_full, basis};
}

inline OperatorMatrix build_full_H(const PhysicalConfig& cfg, const ViolationModel& model,
                                   const TruncatedBasis& basis) {
    const auto p = derive_dimensionless(cfg);
    return build_full_H(p, model, basis, cfg.include_rest_offset ? rest_offset(cfg) : 0.0);
}

/// A coherent displacement of size alpha leaks past the basis edge.
inline bool displacement_leaks(double alpha, const TruncatedBasis& basis) {
    return alpha * alpha > basis.n_max() / 4.0;
}

/// D(alpha) = exp(i sqrt(2) alpha p) = exp(alpha (a - a^dagger)), by
/// scaling-and-squaring Pade on the real antisymmetric generator.
inline OperatorMatrix build_displacement(double alpha, const TruncatedBasis& basis) {
    if (!std::isfinite(alpha)) throw ConfigError("displacement amplitude must be finite");
    const int dim = basis.oscillator_dim();
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n + 1 < dim; ++n) {
        const double s = alpha * std::sqrt(n + 1.0);
        gen(n, n + 1) = s;    // alpha a
        gen(n + 1, n) = -s;   // -alpha a^dagger
    }
    Eigen::MatrixXd d = gen.exp();
    return {detail::lift(d), OperatorLabel::D_alpha, basis};
}

/// Debug dump: one "row,col,re,im" line per entry with magnitude above threshold.
inline void write_matrix_csv(std::ostream& os, const OperatorMatrix& m, double threshold = 0.0) {
    os << "row,col,re,im\n";
    os.precision(17);
    for (Eigen::Index j = 0; j < m.data.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.data.rows(); ++i) {
            const cplx z = m.data(i, j);
            if (std::abs(z) > threshold) os << i << ',' << j << ',' << z.real() << ',' << z.imag() << '\n';
        }
    }
}

}  // namespace qep
