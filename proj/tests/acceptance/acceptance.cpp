// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "../unit/reference.hpp"

using namespace qep;

namespace {

namespace tol {
constexpr double table_orders = 1.0;             // |log10 P - reference| allowed
constexpr double slope_target = 2.0;
constexpr double slope_band = 0.2;
constexpr double sweep_seconds = 30.0;
constexpr double freefall_relative = 1e-8;
constexpr double nu_inversion = 1e-10;
constexpr double freefall_seconds = 5.0;
constexpr double residual_coefficient = 10.0;   // residual < C lambda^2
constexpr double thermal_ratio_low = -3.0;
constexpr double thermal_ratio_high = -1.0;
constexpr double excited_log10_max = -300.0;
constexpr double log_z_relative = 1e-12;
constexpr int spectator_max_dim = 1200;
constexpr double hermiticity = 1e-10;
constexpr double unitarity = 1e-10;
constexpr double scaling_relative = 1e-12;
}  // namespace tol

struct Outcome {
    bool pass{true};
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> sweep_lambdas() {
    std::vector<double> out;
    for (int k = 0; k <= 6; ++k) out.push_back(std::pow(10.0, -6.0 + 0.5 * k));
    return out;
}

Outcome table_reproduction() {
    struct Ref {
        const char* atom;
        double log10[5];
    };
    const Ref refs[] = {{"3He", {-40, -36, -44, -35, -43}}, {"171Yb", {-42, -39, -46, -40, -46}}};
    Outcome o;
    for (const auto& r : refs) {
        const auto t = transition_probabilities(derive_dimensionless(preset(r.atom)), ViolationModel::unit());
        for (int i = 0; i < 5; ++i) {
            const auto& row = t.rows[i];
            const bool ok = std::abs(row.log10_probability - r.log10[i]) <= tol::table_orders;
            std::printf("    %-6s %-6s log10 P = %8.3f  reference %4.0f  %s\n", r.atom, to_string(row.principle),
                        row.log10_probability, r.log10[i], ok ? "ok" : "off");
            o.check(ok, std::string(r.atom) + " " + to_string(row.principle) +
                            fmt(" %.2f vs %.0f", row.log10_probability, r.log10[i]));
        }
    }
    return o;
}

Outcome null_test() {
    Outcome o;
    for (const char* atom : {"3He", "171Yb"}) {
        auto cfg = preset(atom);
        cfg.nu = 1.0;
        const auto p = derive_dimensionless(cfg);
        for (const auto& r : transition_probabilities(p, ViolationModel::zero()).rows) {
            o.check(r.probability == 0.0, std::string(atom) + " " + to_string(r.principle) + " non-zero");
        }
        for (int n = 0; n < 50; ++n) {
            const auto s = corrected_eigenstate(p, ViolationModel::zero(), {n, Spin::down});
            for (const auto& [l, a] : s.first_order) {
                o.check(a == cplx{}, std::string(atom) + " amplitude " + to_string(l) + " of n=" + std::to_string(n));
            }
        }
    }
    return o;
}

Outcome convergence_order() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = convergence_sweep(reference::generic_params(), reference::generic_model(), sweep_lambdas(),
                                     {0, Spin::down}, TruncatedBasis{200});
    const double dt = seconds_since(t0);
    o.check(r.status == SweepStatus::ok, "sweep returned null residual");
    o.check(std::abs(r.slope - tol::slope_target) <= tol::slope_band, fmt("slope %.4f", r.slope));
    o.check(dt < tol::sweep_seconds, fmt("took %.1f s", dt));
    o.detail += (o.detail.empty() ? "" : "; ") + fmt("slope %.4f in %.1f s", r.slope, dt);
    return o;
}

Outcome free_fall_identity() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    double worst_dev = 0.0, worst_nu = 0.0;
    for (const char* atom : {"3He", "171Yb"}) {
        for (double nu = 0.5; nu <= 2.0 + 1e-12; nu += 0.25) {
            auto cfg = preset(atom);
            cfg.nu = nu;
            const auto r = free_fall_expectation(cfg, TruncatedBasis{200});
            worst_dev = std::max(worst_dev, r.relative_deviation);
            worst_nu = std::max(worst_nu, std::abs(*r.nu_hat - nu));
        }
    }
    const double dt = seconds_since(t0);
    o.check(worst_dev < tol::freefall_relative, fmt("energy deviation %.2e", worst_dev));
    o.check(worst_nu < tol::nu_inversion, fmt("nu inversion error %.2e", worst_nu));
    o.check(dt < tol::freefall_seconds, fmt("took %.1f s", dt));
    if (o.pass) o.detail = fmt("max deviation %.2e, nu error %.2e", worst_dev, worst_nu);
    return o;
}

Outcome spin_up_structure() {
    Outcome o;
    const double lambda = 1e-4;
    const auto p = derive_dimensionless(preset("3He")).with_lambda(lambda);
    const TruncatedBasis b{200};
    const auto s = spin_up_state(p, ViolationModel::zero(), b);
    const StateLabel u1{1, Spin::up}, u2{2, Spin::up};
    for (const auto& [l, a] : s.first_order) {
        if (l == u1 || l == u2) {
            o.check(a != cplx{}, to_string(l) + " vanishes");
        } else {
            o.check(a == cplx{}, "spurious amplitude on " + to_string(l));
        }
    }
    o.check(std::abs(s.amplitude(u2) - cplx(-1.0 / (4.0 * std::sqrt(2.0)))) < 1e-15, "(2,+1/2) coefficient");
    o.check(std::abs(s.amplitude(u1) - cplx(-p.gtilde)) < 1e-15, "(1,+1/2) coefficient");
    const auto exact = oracle_amplitudes(diagonalize(build_full_H(p, ViolationModel::zero(), b)), {0, Spin::up});
    const double res = analytic_residual(exact, s, lambda);
    o.check(res < tol::residual_coefficient * lambda * lambda, fmt("residual %.3e", res));
    if (o.pass) o.detail = fmt("residual %.3e < %.1e", res, tol::residual_coefficient * lambda * lambda);
    return o;
}

Outcome thermal_claims() {
    Outcome o;
    const auto cfg = preset("3He");
    const auto m = ViolationModel::unit();
    const auto sig = thermal_vs_signal(cfg, m, 890e-12);
    o.check(sig.ratio >= tol::thermal_ratio_low && sig.ratio <= tol::thermal_ratio_high,
            fmt("890 pK ratio %.3f", sig.ratio));
    const auto cold = thermal_state(cfg, m, 100e-12);
    o.check(cold.log10_excited < tol::excited_log10_max, fmt("100 pK log10 excited %.1f", cold.log10_excited));
    double worst = 0.0;
    for (double T : {1e-11, 1e-10, 8.9e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3}) {
        const double closed = partition_function(cfg, m, T);
        const double series = reference::series_log_Z(cfg, m, T);
        worst = std::max(worst, std::abs(closed - series) / std::abs(series));
    }
    o.check(worst < tol::log_z_relative, fmt("log Z deviation %.2e", worst));
    if (o.pass) {
        o.detail = fmt("ratio %.3f, log10 excited %.1f, log Z deviation %.1e", sig.ratio, cold.log10_excited, worst);
    }
    return o;
}

Outcome spectator_invariance() {
    Outcome o;
    const double lambda = 1e-4;
    const TruncatedBasis b{100};
    const int dim = b.dim() * 2;
    o.check(dim <= tol::spectator_max_dim, "dimension " + std::to_string(dim));
    const ViolationOperator xs{0.6, {0.2, -0.3}, 0.4};
    double worst = 0.0;
    for (const auto& p : {derive_dimensionless(preset("3He")).with_lambda(lambda), reference::generic_params(lambda)}) {
        const auto aug = AugmentedModel::two_level(3.41, lambda, xs, xs);
        const auto r = spectator_check(p, reference::generic_model(), aug, b, tol::residual_coefficient);
        worst = std::max(worst, r.max_deviation);
        o.check(!r.flagged, fmt("deviation %.3e", r.max_deviation));
    }
    if (o.pass) o.detail = fmt("max deviation %.3e < %.1e", worst, tol::residual_coefficient * lambda * lambda);
    return o;
}

Outcome property_suite() {
    Outcome o;
    const auto p = reference::generic_params(1e-3);
    const auto m = reference::generic_model();
    const TruncatedBasis b{200};
    for (const auto& op : {build_full_H(p, m, b), build_V(p, m, b), build_matrix_P2(b), build_matrix_X(b),
                           build_matrix_x(p, b)}) {
        o.check(op.hermiticity_residual() < tol::hermiticity, std::string(to_string(op.label)) + " not Hermitian");
    }
    for (double alpha : {0.05, 0.36, 1.0, 3.0}) {
        const double u = build_displacement(alpha, b).unitarity_residual();
        o.check(u < tol::unitarity, fmt("D(%.2f) unitarity %.2e", alpha, u));
    }
    const auto base = transition_probabilities(p, m);
    for (double t : {1e-3, 0.5, 2.0, 1e3}) {
        const auto sc = transition_probabilities(p, m.scaled(t));
        for (std::size_t i = 0; i < base.rows.size(); ++i) {
            const double rel = std::abs(sc.rows[i].probability / (t * t * base.rows[i].probability) - 1.0);
            o.check(rel < tol::scaling_relative, fmt("t=%.0e scaling error %.2e", t, rel));
        }
    }
    const auto table = switch_off_protocol(p, m);
    const auto a = sample_shots(table, 100000000, 42), c = sample_shots(table, 100000000, 42);
    for (std::size_t i = 0; i < a.size(); ++i) o.check(a[i].count == c[i].count, "shots differ for equal seeds");
    const auto cfg = preset("3He");
    const auto zero = switch_off_protocol(derive_dimensionless(cfg), ViolationModel::zero());
    double prev = INFINITY;
    for (std::uint64_t n = 1; n <= max_shots; n *= 10) {
        for (const auto& bd : bound_violations(sample_shots(zero, n, 1), cfg).bounds) {
            if (bd.principle != Principle::LLI) continue;
            o.check(bd.upper < prev, "zero-count bound not monotone at n=" + std::to_string(n));
            prev = bd.upper;
        }
    }
    return o;
}

Outcome adjudication() {
    Outcome o;
    const auto verdicts = adjudicate_closed_forms(reference::generic_params(0.0));
    const auto& bg = verdicts.at(0);
    std::printf("    %s\n      oracle %.10f | %s: %.10f (dev %.1e) | %s: %.10f (dev %.1e) -> %s\n", bg.question.c_str(),
                bg.oracle, bg.form_a.c_str(), bg.candidate_a, bg.deviation_a, bg.form_b.c_str(), bg.candidate_b,
                bg.deviation_b, bg.supported.c_str());
    o.check(bg.definitive, "b_G verdict not definitive");
    const auto p = reference::generic_params();
    ViolationModel m;
    m.xi_G.b = 1.0;
    const double shipped = std::abs(ground_state(p, m).amplitude({0, Spin::up}));
    o.check(bg.supported == bg.form_a && std::abs(shipped - bg.candidate_a) < 1e-15 * shipped,
            "shipped formula is not the supported form");
    const auto r = convergence_sweep(p, m, sweep_lambdas(), {0, Spin::down}, TruncatedBasis{60});
    o.check(r.status == SweepStatus::ok && std::abs(r.slope - tol::slope_target) <= tol::slope_band,
            fmt("b_G-only sweep slope %.3f", r.slope));
    if (o.pass) o.detail = "supported: " + bg.supported + fmt(", sweep slope %.4f", r.slope);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"1 transition table orders of magnitude", table_reproduction},
        {"2 null model gives exactly zero", null_test},
        {"3 quadratic convergence against exact diagonalization", convergence_order},
        {"4 free-fall energy identity and nu inversion", free_fall_identity},
        {"5 spin-up structure with all principles holding", spin_up_structure},
        {"6 thermal population claims", thermal_claims},
        {"7 spectator level invariance", spectator_invariance},
        {"8 property suite", property_suite},
        {"9 closed-form adjudication", adjudication},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s criterion %s%s%s\n", o.pass ? "PASS" : "FAIL", name, o.detail.empty() ? "" : ": ",
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
