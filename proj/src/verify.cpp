#include "kaonsim/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "kaonsim/analytic.hpp"
#include "kaonsim/config.hpp"
#include "kaonsim/protocols.hpp"

namespace kaonsim {

namespace {

struct Rng {
    std::mt19937_64 engine{0xC0FFEE};
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine);
    }
    Complex amplitude() { return Complex{uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }
    SingleKaon kaon() {
        SingleKaon k{amplitude(), amplitude()};
        const double n = std::sqrt(k.survival());
        if (n < 1e-6) return SingleKaon{Complex{1.0}, Complex{0.0}};
        return SingleKaon{k.f / n, k.g / n};
    }
};

CheckResult residual_check(const std::string& name, double worst, double tol) {
    CheckResult r;
    r.name = name;
    r.passed = worst < tol;
    r.detail = "max residual " + format_double_exact(worst) + " (tolerance " +
               format_double_exact(tol) + ")";
    return r;
}

Mat2 eigendecomposition_evolution(double tau, const Constants& c) {
    const Complex p = c.p();
    const Complex q = c.q();
    const Mat2 basis{p, p, q, -q};
    const Mat2 diag{decay_factor_s(tau, c), Complex{0.0}, Complex{0.0},
                    decay_factor_l(tau, c)};
    return basis * diag * basis.inverse();
}

CheckResult check_constants() {
    const Constants c = constants_paper();
    const double gl_err = std::abs(c.gamma_l - 1.7507e-3) / 1.7507e-3;
    const double dm_err = std::abs(c.delta_m - 0.4738) / 0.4738;
    CheckResult r;
    r.name = "constants_widths_and_mass_splitting";
    r.passed = gl_err < 1e-3 && dm_err < 5e-3;
    r.detail = "gamma_l = " + format_double_exact(c.gamma_l) + " (rel err " +
               format_double_csv(gl_err) + "), delta_m = " +
               format_double_exact(c.delta_m) + " (rel err " +
               format_double_csv(dm_err) + ")";
    return r;
}

CheckResult check_evolution_oracle() {
    Rng rng;
    double worst = 0.0;
    for (int it = 0; it < 1000; ++it) {
        Constants c = constants_paper();
        c.epsilon = Complex{rng.uniform(0.0, 0.01), 0.0};
        const double tau = rng.uniform(0.0, 10.0);
        const SingleKaon in = rng.kaon();
        const SingleKaon closed = evolve(in, tau, c);
        SingleKaon oracle = in;
        eigendecomposition_evolution(tau, c).apply(oracle.f, oracle.g);
        worst = std::max({worst, std::abs(closed.f - oracle.f),
                          std::abs(closed.g - oracle.g)});
    }
    return residual_check("evolution_closed_form_vs_eigendecomposition", worst, 1e-10);
}

CheckResult check_singlet_r_identity() {
    double worst = 0.0;
    for (double eps : {0.0, 0.002, 0.01}) {
        Constants c = constants_paper();
        c.epsilon = Complex{eps, 0.0};
        auto [ks, kl] = mass_eigenstates(c);
        const MultiKaonState singlet = epr_singlet('a', 'b');
        const MultiKaonState ls = tensor(to_state(kl, 'a'), to_state(ks, 'b'));
        const MultiKaonState sl = tensor(to_state(ks, 'a'), to_state(kl, 'b'));
        for (std::size_t i = 0; i < 4; ++i) {
            const Complex mass_side =
                c.r() * (ls.amp(i) - sl.amp(i)) / std::sqrt(2.0);
            worst = std::max(worst, std::abs(mass_side - singlet.amp(i)));
        }
    }
    return residual_check("singlet_r_identity_mass_basis", worst, 1e-12);
}

ProtocolSetup random_teleport_setup(Rng& rng, double max_eps = 0.01) {
    const SingleKaon in = rng.kaon();
    ProtocolSetup setup{TeleportMode{in.f, in.g}, Kinematics{}, constants_paper()};
    setup.constants.epsilon = Complex{rng.uniform(0.0, max_eps), 0.0};
    setup.kin.t_z = rng.uniform(0.0, 0.3);
    setup.kin.t_x = setup.kin.t_z + rng.uniform(0.0, 3.0);
    setup.kin.gamma_a = setup.kin.gamma_b = rng.uniform(1.0, 5.0);
    setup.kin.gamma_c = rng.uniform(1.0, 10.0);
    return setup;
}

CheckResult check_projection_probs() {
    Rng rng;
    double worst = 0.0;
    for (int it = 0; it < 1000; ++it) {
        const ProtocolSetup setup = random_teleport_setup(rng);
        const MultiKaonState state = build_state_at_collision(setup);
        const auto closed = analytic_outcome_probs(setup);
        double total = 0.0;
        for (PairBasis v : kAllPairBases) {
            const double exact = project_pair(state, 'c', 'a', v).prob;
            worst = std::max(worst, std::abs(exact - closed[static_cast<int>(v)]));
            total += exact;
        }
        worst = std::max(worst, std::abs(total - norm2(state)));
    }
    return residual_check("projection_probs_vs_state_vector", worst, 1e-12);
}

CheckResult check_fidelity_identity() {
    Rng rng;
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        ProtocolSetup setup = random_teleport_setup(rng, 0.0);
        setup.kin.t_z = 0.0;
        setup.kin.t_x = rng.uniform(0.0, 5.0);
        worst = std::max(worst,
                         std::abs(teleport_fidelity(setup, PairBasis::Phi4) - 1.0));
    }
    return residual_check("teleport_fidelity_phi4_identity", worst, 1e-12);
}

CheckResult check_swap_coefficients() {
    Rng rng;
    double worst = 0.0;

    // tau = 0: the phi4 outcome leaves the d-b singlet.
    ProtocolSetup setup{SwapMode{}, Kinematics{}, constants_paper()};
    setup.kin.t_x = 1.0;
    setup.kin.t_z = 0.3;
    const MultiKaonState state0 = build_state_at_collision(setup);
    const CollisionProjection swap4 = collide_project(state0, PairBasis::Phi4);
    if (swap4.partner) {
        worst = std::max(worst, std::abs(phase_overlap(epr_singlet('d', 'b'),
                                                       *swap4.partner) - 1.0));
    }

    for (int it = 0; it < 200; ++it) {
        Constants c = constants_paper();
        c.epsilon = Complex{rng.uniform(0.0, 0.01), 0.0};
        ProtocolSetup s{SwapMode{}, Kinematics{}, c};
        s.kin.t_z = rng.uniform(0.0, 0.3);
        s.kin.t_x = s.kin.t_z + rng.uniform(0.1, 2.0);
        s.kin.gamma_a = s.kin.gamma_b = rng.uniform(1.0, 4.0);
        s.kin.gamma_c = s.kin.gamma_d = rng.uniform(1.0, 4.0);

        const MultiKaonState state = build_state_at_collision(s);
        const double lab_dt = rng.uniform(0.0, 3.0);
        const double tau_d = s.kin.proper_time(lab_dt, s.kin.gamma_d);
        const double tau_b = s.kin.proper_time(lab_dt, s.kin.gamma_b);
        for (PairBasis v : kAllPairBases) {
            const CollisionProjection cp = collide_project(state, v);
            if (!cp.partner) continue;
            MultiKaonState evolved =
                apply_single(*cp.partner, 'd', evolution_matrix(tau_d, c));
            evolved = apply_single(evolved, 'b', evolution_matrix(tau_b, c));
            const PairAmplitudes pa = swap_pair_amplitudes(v, tau_d, tau_b, c);
            const MultiKaonState closed({'d', 'b'}, {pa.a00, pa.a10, pa.a01, pa.a11});
            worst = std::max(worst, phase_aligned_residual(closed, evolved));
            if (v == PairBasis::Phi4) {
                worst = std::max(worst, std::abs(std::abs(pa.a10) - std::abs(pa.a01)));
            }
        }
    }
    return residual_check("swap_coefficients_match_protocol_evolution", worst, 1e-12);
}

CheckResult check_paper_approximations() {
    Constants no_osc = constants_paper();
    no_osc.delta_m = 0.0;
    const Constants physical = constants_paper();

    double worst_no_osc = 0.0;
    double worst_cosine = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double tau = 0.05 + 0.25 * static_cast<double>(i);
        const double tau_other = 0.05 + 0.18 * static_cast<double>(19 - i);

        // xi with the oscillation dropped equals the printed real form.
        const SingleKaon probe{Complex{0.8}, Complex{0.6}};
        worst_no_osc = std::max(
            worst_no_osc, std::abs(xi_exact(probe.f, probe.g, tau, no_osc).value() -
                                   xi_paper(probe.f, probe.g, tau, no_osc).value()));

        for (PairBasis v : kAllPairBases) {
            worst_no_osc = std::max(
                worst_no_osc,
                std::abs(asym_exact(swap_pair_amplitudes(v, tau, tau_other, no_osc))
                             .value() -
                         asym_paper(v, tau, tau_other, no_osc)));
        }

        // With the physical mass splitting, the phi3 branch drops exactly
        // a cos(delta_m (tau_d + tau_b)) factor.
        const double exact =
            asym_exact(swap_pair_amplitudes(PairBasis::Phi3, tau, tau_other, physical))
                .value();
        const double reconstructed =
            asym_paper(PairBasis::Phi3, tau, tau_other, physical) *
            std::cos(physical.delta_m * (tau + tau_other));
        worst_cosine = std::max(worst_cosine, std::abs(exact - reconstructed));
    }

    CheckResult r;
    r.name = "paper_approximation_reconciliation";
    r.passed = worst_no_osc < 1e-12 && worst_cosine < 1e-10;
    r.detail = "delta_m->0 residual " + format_double_exact(worst_no_osc) +
               " (tol 1e-12), cosine-factor residual " +
               format_double_exact(worst_cosine) + " (tol 1e-10)";
    return r;
}

CheckResult check_limiting_values() {
    const Constants c = constants_paper();
    double worst = 0.0;

    Kinematics kin;
    kin.t_x = 0.7;
    kin.gamma_a = kin.gamma_b = 2.0;
    const TeleportCoeffs tc = teleport_coeffs(Complex{0.8}, Complex{0.6}, kin.t_x,
                                              kin, c);
    for (double tau : {0.0, 0.5, 2.0, 6.0}) {
        worst = std::max(worst, std::abs(xi_unconditioned(tc, tau, c).value() - 1.0));
        worst = std::max(worst, std::abs(asym_unconditioned(tau, tau, c).value()));
    }

    worst = std::max(worst, std::abs(asym_exact(swap_pair_amplitudes(
                                                    PairBasis::Phi4, 0.0, 0.0, c))
                                         .value() - 1.0));
    for (PairBasis v : {PairBasis::Phi1, PairBasis::Phi2}) {
        worst = std::max(worst, std::abs(asym_exact(swap_pair_amplitudes(v, 0.0, 0.0, c))
                                             .value() + 1.0));
        worst = std::max(worst, std::abs(asym_paper(v, 0.0, 0.0, c) + 1.0));
    }
    return residual_check("limiting_values_analytic", worst, 1e-12);
}

CheckResult check_general_reductions() {
    Rng rng;
    double worst = 0.0;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    for (int it = 0; it < 50; ++it) {
        // w1 = w2 reduces to pure-state teleportation of (c1, c2).
        const SingleKaon w = rng.kaon();
        const SingleKaon coeffs = rng.kaon();
        ProtocolSetup general{GeneralMode{coeffs.f, w, coeffs.g, w}, Kinematics{},
                              constants_paper()};
        general.kin.t_x = rng.uniform(0.2, 3.0);
        general.kin.gamma_a = general.kin.gamma_b = rng.uniform(1.0, 4.0);

        ProtocolSetup pure{TeleportMode{coeffs.f, coeffs.g}, general.kin,
                           general.constants};
        pure.kin.t_z = pure.kin.t_x;

        const MultiKaonState gstate = build_state_at_collision(general);
        const MultiKaonState pstate = build_state_at_collision(pure);
        for (PairBasis v : kAllPairBases) {
            const CollisionProjection gp = collide_project(gstate, v);
            const CollisionProjection pp = collide_project(pstate, v);
            worst = std::max(worst, std::abs(gp.prob - pp.prob));
            if (!gp.partner || !pp.partner) continue;
            const MultiKaonState expected = tensor(to_state(w, 'd'), *pp.partner);
            worst = std::max(worst, std::abs(phase_overlap(expected, *gp.partner) - 1.0));
        }

        // A singlet input reduces to entanglement swapping.
        ProtocolSetup entangled{
            GeneralMode{Complex{-inv_sqrt2}, SingleKaon{Complex{0.0}, Complex{1.0}},
                        Complex{inv_sqrt2}, SingleKaon{Complex{1.0}, Complex{0.0}}},
            general.kin, general.constants};
        ProtocolSetup swap{SwapMode{}, general.kin, general.constants};
        swap.kin.t_z = swap.kin.t_x;

        const MultiKaonState estate = build_state_at_collision(entangled);
        const MultiKaonState sstate = build_state_at_collision(swap);
        worst = std::max(worst, phase_aligned_residual(sstate, estate));
        for (PairBasis v : kAllPairBases) {
            const CollisionProjection ep = collide_project(estate, v);
            const CollisionProjection sp = collide_project(sstate, v);
            worst = std::max(worst, std::abs(ep.prob - sp.prob));
            if (ep.partner && sp.partner) {
                worst = std::max(worst,
                                 std::abs(phase_overlap(*ep.partner, *sp.partner) - 1.0));
            }
        }
    }
    return residual_check("general_teleportation_reductions", worst, 1e-12);
}

CheckResult check_projection_completeness() {
    Rng rng;
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        std::vector<Complex> amps(16);
        double n2 = 0.0;
        for (Complex& a : amps) {
            a = rng.amplitude();
            n2 += std::norm(a);
        }
        for (Complex& a : amps) a /= std::sqrt(n2);
        const MultiKaonState s({'d', 'c', 'a', 'b'}, amps);
        double total = 0.0;
        for (PairBasis v : kAllPairBases) total += project_pair(s, 'c', 'a', v).prob;
        worst = std::max(worst, std::abs(total - norm2(s)));
    }
    return residual_check("projection_completeness", worst, 1e-12);
}

}  // namespace

std::vector<CheckResult> run_verification() {
    return {
        check_constants(),
        check_evolution_oracle(),
        check_singlet_r_identity(),
        check_projection_probs(),
        check_fidelity_identity(),
        check_swap_coefficients(),
        check_paper_approximations(),
        check_limiting_values(),
        check_general_reductions(),
        check_projection_completeness(),
    };
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const CheckResult& r : results) {
        if (!r.passed) return false;
    }
    return true;
}

std::string render_check_table(const std::vector<CheckResult>& results) {
    std::size_t width = 0;
    for (const CheckResult& r : results) width = std::max(width, r.name.size());
    std::ostringstream os;
    for (const CheckResult& r : results) {
        os << (r.passed ? "[PASS] " : "[FAIL] ") << r.name;
        os << std::string(width - r.name.size() + 2, ' ') << r.detail << '\n';
    }
    return os.str();
}

}  // namespace kaonsim
