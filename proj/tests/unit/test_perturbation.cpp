#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "reference.hpp"

using namespace qep;

namespace {
const StateLabel d0{0, Spin::down}, u0{0, Spin::up}, d1{1, Spin::down}, u1{1, Spin::up}, d2{2, Spin::down},
    u2{2, Spin::up};
const double rt2 = std::sqrt(2.0);
}  // namespace

TEST(CorrectedState, ZeroModelLeavesSpinDownUntouched) {
    const auto p = reference::generic_params();
    for (int n = 0; n < 10; ++n) {
        const auto s = corrected_eigenstate(p, ViolationModel::zero(), {n, Spin::down}, TruncatedBasis{20});
        for (const auto& [l, a] : s.first_order) EXPECT_EQ(a, cplx{}) << "n " << n << " at " << l;
    }
}

TEST(CorrectedState, ZeroModelSpinUpGroundState) {
    const auto p = reference::generic_params();
    const auto s = spin_up_state(p, ViolationModel::zero());
    for (const auto& [l, a] : s.first_order) {
        if (l == u1) {
            EXPECT_NEAR(a.real(), -p.gtilde, 1e-15);
        } else if (l == u2) {
            EXPECT_NEAR(a.real(), -1.0 / (4.0 * rt2), 1e-15);
        } else {
            EXPECT_EQ(a, cplx{}) << l;
        }
    }
}

TEST(CorrectedState, GroundStateAmplitudes) {
    const auto p = reference::generic_params();
    const auto m = reference::generic_model();
    const auto s = ground_state(p, m);
    const double gt2 = p.gtilde * p.gtilde;
    EXPECT_LT(std::abs(s.amplitude(u0) - (m.xi_I.b / 4.0 + 2.0 * p.nu * gt2 * m.xi_G.b) / p.eta), 1e-15);
    EXPECT_LT(std::abs(s.amplitude(d1) - (-p.gtilde * m.xi_G.a)), 1e-15);
    EXPECT_LT(std::abs(s.amplitude(u1) - (-p.gtilde * m.xi_G.b / (1.0 + p.eta))), 1e-15);
    EXPECT_LT(std::abs(s.amplitude(d2) - (-m.xi_I.a / (4.0 * rt2))), 1e-15);
    EXPECT_LT(std::abs(s.amplitude(u2) - (-m.xi_I.b / (4.0 * rt2 * (1.0 + p.eta / 2.0)))), 1e-15);
    EXPECT_EQ(s.zeroth(d0), 1.0);
    EXPECT_EQ(s.total(d0, p.lambda), cplx(1.0));
}

TEST(CorrectedState, SpinUpVanishingGravityCoupling) {
    const auto p = reference::generic_params();
    ViolationModel m;
    m.xi_G.c = -1.0;
    const auto s = spin_up_state(p, m);
    EXPECT_EQ(s.amplitude(u1), cplx{});
    EXPECT_NE(s.amplitude(u2), cplx{});
}

TEST(CorrectedState, SpinUpCouplesThroughConjugateB) {
    const auto p = reference::generic_params();
    ViolationModel m;
    m.xi_I.b = {0.3, 1.0};
    const auto up = spin_up_state(p, m);
    EXPECT_LT(std::abs(up.amplitude(d0) - (-std::conj(m.xi_I.b) / (4.0 * p.eta))), 1e-15);
    EXPECT_LT(std::abs(ground_state(p, m).amplitude(u0) - m.xi_I.b / (4.0 * p.eta)), 1e-15);
}

TEST(CorrectedState, ResonanceGuard) {
    const auto m = reference::generic_model();
    for (double eta : {0.0, 1e-7, 1.0, 2.0, 1.0 + 5e-7, 4.0}) {
        EXPECT_THROW(ground_state(DimensionlessParams::make(1e-5, eta, 0.3), m), ResonanceError) << eta;
    }
    for (double eta : {0.5, 1.0 + 2e-6, 2.37, 1e4 + 0.5}) {
        EXPECT_NO_THROW(ground_state(DimensionlessParams::make(1e-5, eta, 0.3), m)) << eta;
    }
}

TEST(CorrectedState, TruncationGuard) {
    const auto p = reference::generic_params();
    EXPECT_THROW(corrected_eigenstate(p, ViolationModel::unit(), {3, Spin::down}, TruncatedBasis{4}),
                 TruncationError);
    EXPECT_NO_THROW(corrected_eigenstate(p, ViolationModel::unit(), {2, Spin::down}, TruncatedBasis{4}));
    EXPECT_THROW(corrected_eigenstate(p, ViolationModel::unit(), {-1, Spin::down}), ConfigError);
}

TEST(FirstOrderEnergy, DiagonalOfV) {
    const auto p = reference::generic_params();
    const auto m = reference::generic_model();
    const double gt2 = p.gtilde * p.gtilde;
    EXPECT_NEAR(first_order_energy(p, m, d0), 0.5 + p.lambda * (-m.xi_I.a / 4.0 - 2.0 * p.nu * gt2 * m.xi_G.a),
                1e-15);
    EXPECT_NEAR(first_order_energy(p, m, u0),
                0.5 + p.eta + p.lambda * (-(1.0 + m.xi_I.c) / 4.0 - 2.0 * p.nu * gt2 * (1.0 + m.xi_G.c)), 1e-15);
}

TEST(Transitions, SingleParameterProbabilities) {
    const auto p = DimensionlessParams::make(1e-5, 2.37, 0.38, 1.0);
    ViolationModel lpi;
    lpi.xi_G.a = 1.0;
    EXPECT_NEAR(transition_probabilities(p, lpi).row(Principle::LPI).probability / (p.lambda * p.lambda),
                p.gtilde * p.gtilde, 1e-15);
    ViolationModel lli;
    lli.xi_I.a = 1.0;
    EXPECT_NEAR(transition_probabilities(p, lli).row(Principle::LLI).probability / (p.lambda * p.lambda),
                1.0 / 32.0, 1e-15);
}

TEST(Transitions, ZeroModelIsExactlyZero) {
    const auto t = transition_probabilities(derive_dimensionless(preset("3He")), ViolationModel::zero());
    ASSERT_EQ(t.rows.size(), 5u);
    for (const auto& r : t.rows) {
        EXPECT_EQ(r.probability, 0.0);
        EXPECT_TRUE(std::isinf(r.log10_probability) && r.log10_probability < 0);
    }
}

TEST(Transitions, TableOrderAndLabels) {
    const auto t = transition_probabilities(reference::generic_params(), ViolationModel::unit());
    const StateLabel expected[] = {u0, d1, u1, d2, u2};
    const Principle principles[] = {Principle::QWEP_star, Principle::LPI, Principle::QLPI, Principle::LLI,
                                    Principle::QLLI};
    for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(t.rows[i].label, expected[i]);
        EXPECT_EQ(t.rows[i].principle, principles[i]);
        EXPECT_EQ(t.rows[i].provenance, Provenance::analytic);
    }
}

TEST(Transitions, LogProbabilitySurvivesUnderflow) {
    const auto r = make_row(d1, Principle::LPI, 1e-170, {1e-5, 0.0}, Provenance::analytic);
    EXPECT_EQ(r.probability, 0.0);
    EXPECT_NEAR(r.log10_probability, -350.0, 1e-12);
}

TEST(Transitions, CsvHasHeaderAndFiveRows) {
    std::ostringstream os;
    write_table_csv(os, transition_probabilities(reference::generic_params(), ViolationModel::unit()));
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "n,s,principle,probability,log10_probability,provenance");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 5);
}

TEST(Transitions, QuadraticInViolationScale) {
    const auto p = reference::generic_params(1e-6);
    const auto m = reference::generic_model();
    const auto base = transition_probabilities(p, m);
    for (double t : {0.1, 3.0, 17.0}) {
        const auto scaled = transition_probabilities(p, m.scaled(t));
        for (std::size_t i = 0; i < base.rows.size(); ++i) {
            EXPECT_NEAR(scaled.rows[i].probability / (t * t * base.rows[i].probability), 1.0, 1e-12);
        }
    }
}
