#include <cmath>
#include <tuple>

#include "doctest.h"
#include "kaonsim/protocols.hpp"
#include "test_util.hpp"

using namespace kaonsim;

namespace {

ProtocolSetup teleport_setup(Complex alpha, Complex beta, double t_x = 1.0,
                             double t_z = 0.0) {
    ProtocolSetup setup{TeleportMode{alpha, beta}, Kinematics{}, constants_paper()};
    setup.kin.t_x = t_x;
    setup.kin.t_z = t_z;
    return setup;
}

ProtocolSetup swap_setup(double t_x = 1.0, double t_z = 0.0) {
    ProtocolSetup setup{SwapMode{}, Kinematics{}, constants_paper()};
    setup.kin.t_x = t_x;
    setup.kin.t_z = t_z;
    return setup;
}

// Builds a 4-kaon state on labels (d, c, a, b) as a sum of
// coef * |ca_pair> (x) |db_pair> terms, with db_pair amplitudes indexed
// d_bit + 2 * b_bit.
MultiKaonState build_dcab(
    const std::vector<std::tuple<Complex, PairBasis, std::array<Complex, 4>>>& terms) {
    std::vector<Complex> amps(16, Complex{0.0});
    for (const auto& [coef, ca, db] : terms) {
        for (int sd = 0; sd < 2; ++sd) {
            for (int sc = 0; sc < 2; ++sc) {
                for (int sa = 0; sa < 2; ++sa) {
                    for (int sb = 0; sb < 2; ++sb) {
                        const std::size_t idx = static_cast<std::size_t>(
                            sd | (sc << 1) | (sa << 2) | (sb << 3));
                        amps[idx] += coef * pair_basis_amp(ca, sc, sa) *
                                     db[static_cast<std::size_t>(sd + 2 * sb)];
                    }
                }
            }
        }
    }
    return MultiKaonState({'d', 'c', 'a', 'b'}, std::move(amps));
}

double max_amp_diff(const MultiKaonState& x, const MultiKaonState& y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        m = std::max(m, std::abs(x.amp(i) - y.amp(i)));
    }
    return m;
}

}  // namespace

TEST_CASE("teleport state at t_x = t_z = 0 is the raw product") {
    const ProtocolSetup setup = teleport_setup(Complex{1.0}, Complex{0.0}, 0.0, 0.0);
    const MultiKaonState state = build_state_at_collision(setup);
    const MultiKaonState expected =
        tensor(MultiKaonState::basis_state({'c'}, 0), epr_singlet('a', 'b'));
    CHECK(max_amp_diff(state, expected) < 1e-15);
}

TEST_CASE("teleport state norm matches |m|^2 (|f|^2 + |g|^2)") {
    auto rng = test::make_rng(41);
    for (int it = 0; it < 100; ++it) {
        const SingleKaon in = test::random_kaon(rng);
        ProtocolSetup setup = teleport_setup(in.f, in.g, test::uniform(rng, 0.2, 4.0),
                                             test::uniform(rng, 0.0, 0.2));
        setup.kin.gamma_a = setup.kin.gamma_b = test::uniform(rng, 1.0, 5.0);
        setup.kin.gamma_c = test::uniform(rng, 1.0, 5.0);
        const MultiKaonState state = build_state_at_collision(setup);
        const TeleportCoeffs tc =
            teleport_coeffs(in.f, in.g, setup.kin.t_x, setup.kin, setup.constants);
        const double expected =
            std::norm(tc.m) * (std::norm(tc.f) + std::norm(tc.g));
        CHECK(norm2(state) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("teleport state decomposes exactly as the three-kaon expansion") {
    // m/2 { sqrt2 f phi1 |K0bar>_b, -sqrt2 g phi2 |K0>_b,
    //       -phi3 (f |K0>_b - g |K0bar>_b), -phi4 (f |K0>_b + g |K0bar>_b) }
    auto rng = test::make_rng(42);
    for (int it = 0; it < 100; ++it) {
        const SingleKaon in = test::random_kaon(rng);
        ProtocolSetup setup = teleport_setup(in.f, in.g, test::uniform(rng, 0.2, 4.0));
        setup.kin.gamma_c = test::uniform(rng, 1.0, 5.0);
        setup.constants.epsilon = Complex{test::uniform(rng, 0.0, 0.01), 0.0};
        const MultiKaonState state = build_state_at_collision(setup);
        const TeleportCoeffs tc =
            teleport_coeffs(in.f, in.g, setup.kin.t_x, setup.kin, setup.constants);

        const double sqrt2 = std::sqrt(2.0);
        for (PairBasis v : kAllPairBases) {
            const PairProjection pp = project_pair(state, 'c', 'a', v);
            Complex coef;  // expected amplitude onto v (x) normalized partner
            SingleKaon partner;
            switch (v) {
                case PairBasis::Phi1:
                    coef = 0.5 * tc.m * sqrt2 * tc.f;
                    partner = SingleKaon{Complex{0.0}, Complex{1.0}};
                    break;
                case PairBasis::Phi2:
                    coef = -0.5 * tc.m * sqrt2 * tc.g;
                    partner = SingleKaon{Complex{1.0}, Complex{0.0}};
                    break;
                case PairBasis::Phi3:
                    coef = -0.5 * tc.m;
                    partner = SingleKaon{tc.f, -tc.g};
                    break;
                case PairBasis::Phi4:
                    coef = -0.5 * tc.m;
                    partner = SingleKaon{tc.f, tc.g};
                    break;
            }
            const double expected_prob = std::norm(coef) * partner.survival();
            CHECK(std::abs(pp.prob - expected_prob) < 1e-12);
            if (pp.post) {
                CHECK(phase_overlap(to_state(partner.normalized(), 'b'), *pp.post) ==
                      doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("projection probabilities match the closed forms") {
    auto rng = test::make_rng(43);
    for (int it = 0; it < 200; ++it) {
        const SingleKaon in = test::random_kaon(rng);
        ProtocolSetup setup = teleport_setup(in.f, in.g, test::uniform(rng, 0.2, 4.0),
                                             test::uniform(rng, 0.0, 0.2));
        setup.kin.gamma_a = setup.kin.gamma_b = test::uniform(rng, 1.0, 5.0);
        setup.kin.gamma_c = test::uniform(rng, 1.0, 5.0);
        setup.constants.epsilon = Complex{test::uniform(rng, 0.0, 0.01), 0.0};

        const MultiKaonState state = build_state_at_collision(setup);
        const auto closed = analytic_outcome_probs(setup);
        double total = 0.0;
        for (PairBasis v : kAllPairBases) {
            const double exact = project_pair(state, 'c', 'a', v).prob;
            CHECK(std::abs(exact - closed[static_cast<int>(v)]) < 1e-12);
            total += exact;
        }
        CHECK(total == doctest::Approx(norm2(state)).epsilon(1e-12));
    }
}

TEST_CASE("swap state at t_x = t_z = 0 carries the four-term expansion") {
    const ProtocolSetup setup = swap_setup(0.0, 0.0);
    const MultiKaonState state = build_state_at_collision(setup);

    const MultiKaonState direct =
        tensor(epr_singlet('d', 'c'), epr_singlet('a', 'b'));
    CHECK(max_amp_diff(state, direct) < 1e-15);

    const double h = 0.5;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const std::array<Complex, 4> psi_plus_db{Complex{0.0}, Complex{inv_sqrt2},
                                             Complex{inv_sqrt2}, Complex{0.0}};
    const std::array<Complex, 4> psi_minus_db{Complex{0.0}, Complex{-inv_sqrt2},
                                              Complex{inv_sqrt2}, Complex{0.0}};
    const std::array<Complex, 4> k0k0_db{Complex{1.0}, Complex{0.0}, Complex{0.0},
                                         Complex{0.0}};
    const std::array<Complex, 4> k0bark0bar_db{Complex{0.0}, Complex{0.0},
                                               Complex{0.0}, Complex{1.0}};
    const MultiKaonState expansion = build_dcab({
        {Complex{+h}, PairBasis::Phi3, psi_plus_db},
        {Complex{-h}, PairBasis::Phi4, psi_minus_db},
        {Complex{-h}, PairBasis::Phi1, k0bark0bar_db},
        {Complex{-h}, PairBasis::Phi2, k0k0_db},
    });
    CHECK(max_amp_diff(state, expansion) < 1e-15);
}

TEST_CASE("swap outcomes are equiprobable and phi4 leaves the d-b singlet") {
    auto rng = test::make_rng(44);
    for (int it = 0; it < 50; ++it) {
        ProtocolSetup setup = swap_setup(test::uniform(rng, 0.3, 3.0),
                                         test::uniform(rng, 0.0, 0.3));
        setup.kin.gamma_a = setup.kin.gamma_b = test::uniform(rng, 1.0, 5.0);
        setup.kin.gamma_c = setup.kin.gamma_d = test::uniform(rng, 1.0, 5.0);
        const MultiKaonState state = build_state_at_collision(setup);
        const auto closed = analytic_outcome_probs(setup);
        for (PairBasis v : kAllPairBases) {
            const CollisionProjection cp = collide_project(state, v);
            CHECK(std::abs(cp.prob - closed[static_cast<int>(v)]) < 1e-12);
            CHECK(std::abs(cp.prob - closed[0]) < 1e-14);  // all four equal
        }
        const CollisionProjection swap4 = collide_project(state, PairBasis::Phi4);
        REQUIRE(swap4.partner.has_value());
        CHECK(phase_overlap(epr_singlet('d', 'b'), *swap4.partner) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("swap partner evolution matches the closed-form pair amplitudes") {
    auto rng = test::make_rng(45);
    for (int it = 0; it < 100; ++it) {
        ProtocolSetup setup = swap_setup(test::uniform(rng, 0.3, 2.0),
                                         test::uniform(rng, 0.0, 0.3));
        setup.constants.epsilon = Complex{test::uniform(rng, 0.0, 0.01), 0.0};
        const double gamma_db = test::uniform(rng, 1.0, 4.0);
        setup.kin.gamma_a = setup.kin.gamma_b = gamma_db;
        setup.kin.gamma_c = setup.kin.gamma_d = test::uniform(rng, 1.0, 4.0);
        const Constants& c = setup.constants;

        const MultiKaonState state = build_state_at_collision(setup);
        const double lab_dt = test::uniform(rng, 0.0, 4.0);
        const double tau_d = setup.kin.proper_time(lab_dt, setup.kin.gamma_d);
        const double tau_b = setup.kin.proper_time(lab_dt, setup.kin.gamma_b);

        for (PairBasis v : kAllPairBases) {
            const CollisionProjection cp = collide_project(state, v);
            REQUIRE(cp.partner.has_value());
            MultiKaonState evolved =
                apply_single(*cp.partner, 'd', evolution_matrix(tau_d, c));
            evolved = apply_single(evolved, 'b', evolution_matrix(tau_b, c));

            const PairAmplitudes pa = swap_pair_amplitudes(v, tau_d, tau_b, c);
            const MultiKaonState closed(
                {'d', 'b'}, {pa.a00, pa.a10, pa.a01, pa.a11});
            CHECK(phase_aligned_residual(closed, evolved) < 1e-12);
        }
    }
}

TEST_CASE("general mode: phi4 partner carries the entangled input over to (d, b)") {
    auto rng = test::make_rng(46);
    for (int it = 0; it < 50; ++it) {
        GeneralMode gm;
        gm.w1 = test::random_kaon(rng);
        gm.w2 = test::random_kaon(rng);
        const double mix = test::uniform(rng, 0.05, 0.95);
        gm.c1 = std::polar(std::sqrt(mix), test::uniform(rng, 0.0, 6.28));
        gm.c2 = std::polar(std::sqrt(1.0 - mix), test::uniform(rng, 0.0, 6.28));

        ProtocolSetup setup{gm, Kinematics{}, constants_paper()};
        setup.kin.t_x = test::uniform(rng, 0.2, 3.0);
        setup.kin.gamma_a = setup.kin.gamma_b = test::uniform(rng, 1.0, 5.0);

        const MultiKaonState state = build_state_at_collision(setup);
        const CollisionProjection cp = collide_project(state, PairBasis::Phi4);
        REQUIRE(cp.partner.has_value());
        CHECK(phase_overlap(protocol_target(setup), *cp.partner) ==
              doctest::Approx(1.0).epsilon(1e-12));

        const auto closed = analytic_outcome_probs(setup);
        for (PairBasis v : kAllPairBases) {
            CHECK(std::abs(collide_project(state, v).prob -
                           closed[static_cast<int>(v)]) < 1e-12);
        }
    }
}

TEST_CASE("bob_retain: default policy keeps exactly phi4") {
    const RetainPolicy policy = RetainPolicy::default_policy();
    CHECK(bob_retain(ProjectionOutcome::projected(PairBasis::Phi4), policy));
    CHECK(!bob_retain(ProjectionOutcome::projected(PairBasis::Phi1), policy));
    CHECK(!bob_retain(ProjectionOutcome::projected(PairBasis::Phi3), policy));
    CHECK(!bob_retain(ProjectionOutcome::spoiled(SpoiledSource::PairAB), policy));
    CHECK(!bob_retain(ProjectionOutcome::spoiled(SpoiledSource::KaonC),
                      RetainPolicy::keep_all()));
    RetainPolicy pair34;
    pair34.keep = {false, false, true, true};
    CHECK(bob_retain(ProjectionOutcome::projected(PairBasis::Phi3), pair34));
}

TEST_CASE("teleport fidelity: phi4 is exact at epsilon = 0") {
    auto rng = test::make_rng(47);
    for (int it = 0; it < 100; ++it) {
        const SingleKaon in = test::random_kaon(rng);
        ProtocolSetup setup = teleport_setup(in.f, in.g, test::uniform(rng, 0.0, 5.0));
        setup.kin.gamma_c = test::uniform(rng, 1.0, 10.0);
        setup.kin.gamma_a = setup.kin.gamma_b = test::uniform(rng, 1.0, 5.0);
        CHECK(teleport_fidelity(setup, PairBasis::Phi4) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("teleport fidelity: phi1 projects onto |K0bar> against the target") {
    auto rng = test::make_rng(48);
    for (int it = 0; it < 50; ++it) {
        const SingleKaon in = test::random_kaon(rng);
        ProtocolSetup setup = teleport_setup(in.f, in.g, test::uniform(rng, 0.1, 3.0));
        const TeleportCoeffs tc =
            teleport_coeffs(in.f, in.g, setup.kin.t_x, setup.kin, setup.constants);
        const double expected =
            std::norm(tc.g) / (std::norm(tc.f) + std::norm(tc.g));
        if (std::norm(tc.f) < 1e-20) continue;
        CHECK(teleport_fidelity(setup, PairBasis::Phi1) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("swap fidelity: phi4 outcome is the singlet") {
    const ProtocolSetup setup = swap_setup(1.3, 0.4);
    CHECK(teleport_fidelity(setup, PairBasis::Phi4) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a collision unitary diagonal in the projection basis changes nothing") {
    auto rng = test::make_rng(49);
    const ProtocolSetup setup = swap_setup(1.0, 0.2);
    const MultiKaonState state = build_state_at_collision(setup);

    Mat4 u{};
    for (int i = 0; i < 4; ++i) {
        const Complex phase = std::polar(1.0, test::uniform(rng, 0.0, 6.28));
        const auto v = static_cast<PairBasis>(i);
        for (int r = 0; r < 4; ++r) {
            for (int col = 0; col < 4; ++col) {
                u[r][col] += phase * pair_basis_amp(v, r & 1, r >> 1) *
                             pair_basis_amp(v, col & 1, col >> 1);
            }
        }
    }
    for (PairBasis v : kAllPairBases) {
        const CollisionProjection plain = collide_project(state, v);
        const CollisionProjection rotated = collide_project(state, v, &u);
        CHECK(std::abs(plain.prob - rotated.prob) < 1e-12);
        REQUIRE(plain.partner.has_value());
        REQUIRE(rotated.partner.has_value());
        CHECK(phase_overlap(*plain.partner, *rotated.partner) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("general teleportation reduces to pure-state teleportation for w1 = w2") {
    auto rng = test::make_rng(50);
    for (int it = 0; it < 30; ++it) {
        const SingleKaon w = test::random_kaon(rng);
        const SingleKaon coeffs = test::random_kaon(rng);  // (c1, c2) normalized

        GeneralMode gm{coeffs.f, w, coeffs.g, w};
        ProtocolSetup general{gm, Kinematics{}, constants_paper()};
        general.kin.t_x = test::uniform(rng, 0.2, 3.0);
        general.kin.gamma_a = general.kin.gamma_b = test::uniform(rng, 1.0, 4.0);

        // Pure teleportation of (c1, c2), with c created at the collision.
        ProtocolSetup pure = teleport_setup(coeffs.f, coeffs.g, general.kin.t_x,
                                            general.kin.t_x);
        pure.kin.gamma_a = general.kin.gamma_a;
        pure.kin.gamma_b = general.kin.gamma_b;

        const MultiKaonState gstate = build_state_at_collision(general);
        const MultiKaonState pstate = build_state_at_collision(pure);
        for (PairBasis v : kAllPairBases) {
            const CollisionProjection gp = collide_project(gstate, v);
            const CollisionProjection ppj = collide_project(pstate, v);
            CHECK(std::abs(gp.prob - ppj.prob) < 1e-12);
            if (!gp.partner || !ppj.partner) continue;
            // The d factor carries w in the general partner.
            const MultiKaonState expected = tensor(to_state(w, 'd'), *ppj.partner);
            CHECK(phase_overlap(expected, *gp.partner) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("general teleportation reduces to entanglement swapping for a singlet input") {
    auto rng = test::make_rng(51);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int it = 0; it < 30; ++it) {
        // |Psi->_dc written as c1 |w1>_d |K0>_c + c2 |w2>_d |K0bar>_c:
        // c1 = -1/sqrt2 with w1 = |K0bar>, c2 = +1/sqrt2 with w2 = |K0>.
        GeneralMode gm{Complex{-inv_sqrt2}, SingleKaon{Complex{0.0}, Complex{1.0}},
                       Complex{+inv_sqrt2}, SingleKaon{Complex{1.0}, Complex{0.0}}};
        ProtocolSetup general{gm, Kinematics{}, constants_paper()};
        general.kin.t_x = test::uniform(rng, 0.2, 3.0);
        general.kin.gamma_a = general.kin.gamma_b = test::uniform(rng, 1.0, 4.0);

        // Swap with the d-c pair created at t_x, so it has not decayed yet.
        ProtocolSetup swap = swap_setup(general.kin.t_x, general.kin.t_x);
        swap.kin.gamma_a = general.kin.gamma_a;
        swap.kin.gamma_b = general.kin.gamma_b;

        const MultiKaonState gstate = build_state_at_collision(general);
        const MultiKaonState sstate = build_state_at_collision(swap);
        CHECK(phase_aligned_residual(sstate, gstate) < 1e-12);
        for (PairBasis v : kAllPairBases) {
            const CollisionProjection gp = collide_project(gstate, v);
            const CollisionProjection sp = collide_project(sstate, v);
            CHECK(std::abs(gp.prob - sp.prob) < 1e-12);
            REQUIRE(gp.partner.has_value());
            REQUIRE(sp.partner.has_value());
            CHECK(phase_overlap(*gp.partner, *sp.partner) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("setup validation rejects inconsistent inputs") {
    ProtocolSetup bad = teleport_setup(Complex{1.0}, Complex{0.5});
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    ProtocolSetup swap = swap_setup();
    swap.kin.gamma_c = 2.0;  // breaks gamma_c == gamma_d in swap mode
    CHECK_THROWS_AS(swap.validate(), std::invalid_argument);

    GeneralMode gm{Complex{1.0}, SingleKaon{Complex{2.0}, Complex{0.0}},
                   Complex{0.0}, SingleKaon{Complex{1.0}, Complex{0.0}}};
    ProtocolSetup general{gm, Kinematics{}, constants_paper()};
    general.kin.t_x = 1.0;
    CHECK_THROWS_AS(general.validate(), std::invalid_argument);
}
