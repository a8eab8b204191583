// Prints the switch-off transition table for both isotope presets and checks
// the ground-state amplitudes against exact diagonalization.

#include <cstdio>

#include "qep/qep.hpp"

int main() {
    using namespace qep;
    for (const auto& atom : atom_presets) {
        const auto cfg = preset(atom.name);
        const auto p = derive_dimensionless(cfg);
        std::printf("%s: lambda = %.4e, eta = %.2f, gtilde = %.4f\n", atom.name.data(), p.lambda, p.eta, p.gtilde);
        const auto table = switch_off_protocol(p, ViolationModel::unit());
        for (const auto& r : table.rows) {
            std::printf("  %-10s %-6s log10 P = %8.3f\n", to_string(r.label).c_str(), to_string(r.principle),
                        r.log10_probability);
        }
    }

    // exact check at an inflated lambda with order-one eta
    const auto p = DimensionlessParams::make(1e-4, 2.37, 0.38, 1.3);
    const auto model = ViolationModel::unit();
    const TruncatedBasis basis{60};
    const auto exact = oracle_amplitudes(diagonalize(build_full_H(p, model, basis)), {0, Spin::down});
    const auto approx = ground_state(p, model, basis);
    std::printf("residual at lambda = 1e-4: %.3e\n", analytic_residual(exact, approx, p.lambda));
}
