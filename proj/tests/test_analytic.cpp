#include <cmath>

#include "doctest.h"
#include "kaonsim/analytic.hpp"
#include "test_util.hpp"

using namespace kaonsim;

namespace {

Kinematics default_kin(double t_x = 1.0, double t_z = 0.0) {
    Kinematics kin;
    kin.t_x = t_x;
    kin.t_z = t_z;
    return kin;
}

}  // namespace

TEST_CASE("teleport_coeffs: initial values and time-ordering guard") {
    const Constants c = constants_paper();
    const Kinematics kin = default_kin(0.0, 0.0);
    const TeleportCoeffs tc = teleport_coeffs(Complex{1.0}, Complex{0.0}, 0.0, kin, c);
    CHECK(std::abs(tc.f - Complex{1.0}) < 1e-15);
    CHECK(std::abs(tc.g) < 1e-15);
    CHECK(std::abs(tc.m - Complex{1.0}) < 1e-15);

    CHECK_THROWS_AS(
        (void)teleport_coeffs(Complex{1.0}, Complex{0.0}, 0.5, default_kin(1.0, 0.8), c),
        std::invalid_argument);
    CHECK_THROWS_AS(
        (void)teleport_coeffs(Complex{1.0}, Complex{1.0}, 1.0, default_kin(), c),
        std::invalid_argument);
}

TEST_CASE("teleport_coeffs agrees with the evolution operator") {
    auto rng = test::make_rng(31);
    for (int it = 0; it < 1000; ++it) {
        Constants c = constants_paper();
        c.epsilon = Complex{test::uniform(rng, 0.0, 0.01),
                            test::uniform(rng, 0.0, 0.005)};
        Kinematics kin = default_kin(test::uniform(rng, 0.5, 5.0),
                                     test::uniform(rng, 0.0, 0.5));
        kin.gamma_c = test::uniform(rng, 1.0, 10.0);
        const SingleKaon in = test::random_kaon(rng);
        const double t = test::uniform(rng, kin.t_z, kin.t_x);

        const TeleportCoeffs tc = teleport_coeffs(in.f, in.g, t, kin, c);
        const SingleKaon ref =
            evolve(in, kin.proper_time(t - kin.t_z, kin.gamma_c), c);
        CHECK(std::abs(tc.f - ref.f) < 1e-12);
        CHECK(std::abs(tc.g - ref.g) < 1e-12);
        CHECK(std::abs(tc.m) <= 1.0 + 1e-12);
    }
}

TEST_CASE("teleport_coeffs carries the CP-violation weights as printed") {
    Constants c = constants_paper();
    c.epsilon = Complex{0.01, 0.002};
    Kinematics kin = default_kin(2.0);
    const Complex alpha{0.6, 0.1};
    const Complex beta = std::sqrt(Complex{1.0} - alpha * std::conj(alpha)) *
                         Complex{1.0};  // real remainder
    const double n = std::sqrt(std::norm(alpha) + std::norm(beta));
    const Complex a = alpha / n;
    const Complex b = beta / n;

    const double tau = kin.proper_time(2.0, kin.gamma_c);
    const Complex es = decay_factor_s(tau, c);
    const Complex el = decay_factor_l(tau, c);
    const Complex pq = c.p() / c.q();
    const Complex qp = c.q() / c.p();
    const TeleportCoeffs tc = teleport_coeffs(a, b, 2.0, kin, c);
    CHECK(std::abs(tc.f - 0.5 * ((a + b * pq) * es + (a - b * pq) * el)) < 1e-15);
    CHECK(std::abs(tc.g - 0.5 * ((a * qp + b) * es - (a * qp - b) * el)) < 1e-15);
}

TEST_CASE("projection_probs: direct substitution values") {
    TeleportCoeffs tc;
    tc.f = Complex{std::sqrt(0.3)};
    tc.g = Complex{std::sqrt(0.1)};
    tc.m = Complex{std::sqrt(0.5)};
    const auto probs = projection_probs(tc);
    CHECK(probs[0] == doctest::Approx(0.075).epsilon(1e-14));
    CHECK(probs[1] == doctest::Approx(0.025).epsilon(1e-14));
    CHECK(probs[2] == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(probs[3] == doctest::Approx(0.05).epsilon(1e-14));

    tc.f = Complex{1.0};
    tc.g = Complex{0.0};
    tc.m = Complex{1.0};
    const auto pure = projection_probs(tc);
    CHECK(pure[0] == doctest::Approx(0.5));
    CHECK(pure[1] == doctest::Approx(0.0));
    CHECK(pure[2] == doctest::Approx(0.25));
    CHECK(pure[3] == doctest::Approx(0.25));

    const double sum = pure[0] + pure[1] + pure[2] + pure[3];
    CHECK(sum == doctest::Approx(std::norm(tc.m) *
                                 (std::norm(tc.f) + std::norm(tc.g))));
}

TEST_CASE("post_projection_b: the four conditional states") {
    TeleportCoeffs tc;
    tc.f = Complex{0.6, 0.2};
    tc.g = Complex{-0.3, 0.5};
    tc.m = Complex{0.9};

    const SingleKaon b1 = post_projection_b(tc, PairBasis::Phi1);
    CHECK(std::abs(b1.f) < 1e-15);
    CHECK(std::abs(b1.g - Complex{1.0}) < 1e-15);

    const SingleKaon b2 = post_projection_b(tc, PairBasis::Phi2);
    CHECK(std::abs(b2.f - Complex{1.0}) < 1e-15);

    const double inv = 1.0 / std::sqrt(std::norm(tc.f) + std::norm(tc.g));
    const SingleKaon b3 = post_projection_b(tc, PairBasis::Phi3);
    CHECK(std::abs(b3.f - tc.f * inv) < 1e-15);
    CHECK(std::abs(b3.g + tc.g * inv) < 1e-15);

    const SingleKaon b4 = post_projection_b(tc, PairBasis::Phi4);
    CHECK(std::abs(b4.f - tc.f * inv) < 1e-15);
    CHECK(std::abs(b4.g - tc.g * inv) < 1e-15);
    CHECK(b4.survival() == doctest::Approx(1.0).epsilon(1e-14));

    SingleKaon equal{Complex{1.0 / std::sqrt(2.0)}, Complex{1.0 / std::sqrt(2.0)}};
    TeleportCoeffs teq{equal.f, equal.g, Complex{1.0}};
    const SingleKaon beq = post_projection_b(teq, PairBasis::Phi4);
    CHECK(std::abs(beq.f - Complex{1.0 / std::sqrt(2.0)}) < 1e-15);
    CHECK(std::abs(beq.g - Complex{1.0 / std::sqrt(2.0)}) < 1e-15);

    TeleportCoeffs dead{Complex{0.0}, Complex{1.0}, Complex{1.0}};
    CHECK_THROWS_AS((void)post_projection_b(dead, PairBasis::Phi1), std::domain_error);
}

TEST_CASE("xi at tau = 0: pure states give the infinite and zero markers") {
    const Constants c = constants_paper();
    const ObsValue k0 = xi_exact(Complex{1.0}, Complex{0.0}, 0.0, c);
    CHECK(k0.is_infinite());
    const ObsValue k0bar = xi_exact(Complex{0.0}, Complex{1.0}, 0.0, c);
    CHECK(k0bar.value() == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)k0.value(), std::domain_error);
}

TEST_CASE("xi_exact vs xi_paper: equal only when the mass splitting is dropped") {
    auto rng = test::make_rng(32);
    Constants physical = constants_paper();
    Constants no_osc = constants_paper();
    no_osc.delta_m = 0.0;

    double max_diff_no_osc = 0.0;
    bool physical_differs = false;
    for (int it = 0; it < 200; ++it) {
        const SingleKaon in = test::random_kaon(rng);
        const double tau = test::uniform(rng, 0.05, 8.0);
        const double exact0 = xi_exact(in.f, in.g, tau, no_osc).value();
        const double paper0 = xi_paper(in.f, in.g, tau, no_osc).value();
        max_diff_no_osc = std::max(max_diff_no_osc, std::abs(exact0 - paper0));

        const double exact1 = xi_exact(in.f, in.g, tau, physical).value();
        const double paper1 = xi_paper(in.f, in.g, tau, physical).value();
        if (std::abs(exact1 - paper1) > 1e-6) physical_differs = true;
    }
    CHECK(max_diff_no_osc < 1e-12);
    CHECK(physical_differs);

    // An equal-weight CP eigenstate is the exception: its interference
    // term vanishes, so both forms stay pinned at 1 for every tau.
    const Complex h{1.0 / std::sqrt(2.0)};
    CHECK(xi_exact(h, h, 1.0, physical).value() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(xi_paper(h, h, 1.0, physical).value() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("xi is nonnegative and the unconditioned ensemble gives 1") {
    auto rng = test::make_rng(33);
    const Constants c = constants_paper();
    for (int it = 0; it < 100; ++it) {
        const SingleKaon in = test::random_kaon(rng);
        const double tau = test::uniform(rng, 0.0, 6.0);
        const ObsValue xi = xi_exact(in.f, in.g, tau, c);
        if (xi.is_finite()) CHECK(xi.value() >= 0.0);

        Kinematics kin = default_kin(test::uniform(rng, 0.2, 2.0));
        kin.gamma_b = kin.gamma_a = test::uniform(rng, 1.0, 4.0);
        const TeleportCoeffs tc = teleport_coeffs(in.f, in.g, kin.t_x, kin, c);
        const ObsValue unconditioned = xi_unconditioned(tc, tau, c);
        CHECK(unconditioned.value() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("swap pair amplitudes reduce to the projection states at tau = 0") {
    const Constants c = constants_paper();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    const PairAmplitudes singlet = swap_pair_amplitudes(PairBasis::Phi4, 0.0, 0.0, c);
    CHECK(std::abs(singlet.a00) < 1e-15);
    CHECK(std::abs(singlet.a01 - Complex{inv_sqrt2}) < 1e-15);
    CHECK(std::abs(singlet.a10 + Complex{inv_sqrt2}) < 1e-15);
    CHECK(std::abs(singlet.a11) < 1e-15);

    const PairAmplitudes triplet = swap_pair_amplitudes(PairBasis::Phi3, 0.0, 0.0, c);
    CHECK(std::abs(triplet.a01 - Complex{inv_sqrt2}) < 1e-15);
    CHECK(std::abs(triplet.a10 - Complex{inv_sqrt2}) < 1e-15);

    const PairAmplitudes same1 = swap_pair_amplitudes(PairBasis::Phi1, 0.0, 0.0, c);
    CHECK(std::abs(same1.a11 - Complex{1.0}) < 1e-15);  // d-b pair |K0bar K0bar>
    const PairAmplitudes same2 = swap_pair_amplitudes(PairBasis::Phi2, 0.0, 0.0, c);
    CHECK(std::abs(same2.a00 - Complex{1.0}) < 1e-15);  // d-b pair |K0 K0>
}

TEST_CASE("swap pair amplitudes: the singlet branch keeps a10 = -a01") {
    auto rng = test::make_rng(34);
    for (int it = 0; it < 100; ++it) {
        Constants c = constants_paper();
        c.epsilon = Complex{test::uniform(rng, 0.0, 0.01), 0.0};
        const double td = test::uniform(rng, 0.0, 6.0);
        const double tb = test::uniform(rng, 0.0, 6.0);
        const PairAmplitudes pa = swap_pair_amplitudes(PairBasis::Phi4, td, tb, c);
        CHECK(std::abs(pa.a10 + pa.a01) < 1e-15);
        CHECK(std::abs(std::abs(pa.a10) - std::abs(pa.a01)) < 1e-15);
        const PairAmplitudes ps = swap_pair_amplitudes(PairBasis::Phi3, td, tb, c);
        CHECK(std::abs(ps.a10 - ps.a01) < 1e-15);
    }
}

TEST_CASE("asymmetry limits: singlet 1 at tau 0, same-strangeness pairs -1") {
    const Constants c = constants_paper();
    CHECK(asym_exact(swap_pair_amplitudes(PairBasis::Phi4, 0.0, 0.0, c)).value() ==
          doctest::Approx(1.0));
    CHECK(asym_paper(PairBasis::Phi4, 0.0, 0.0, c) == doctest::Approx(1.0));
    CHECK(asym_exact(swap_pair_amplitudes(PairBasis::Phi1, 0.0, 0.0, c)).value() ==
          doctest::Approx(-1.0));
    // -4 / (1 + 2 + 1) at tau = 0
    CHECK(asym_paper(PairBasis::Phi1, 0.0, 0.0, c) == doctest::Approx(-1.0));
    CHECK(asym_paper(PairBasis::Phi2, 0.0, 0.0, c) == doctest::Approx(-1.0));
}

TEST_CASE("asymmetry stays within [-1, 1] and the unconditioned mixture is 0") {
    auto rng = test::make_rng(35);
    const Constants c = constants_paper();
    for (int it = 0; it < 200; ++it) {
        const double td = test::uniform(rng, 0.0, 8.0);
        const double tb = test::uniform(rng, 0.0, 8.0);
        for (PairBasis v : kAllPairBases) {
            const ObsValue a = asym_exact(swap_pair_amplitudes(v, td, tb, c));
            CHECK(a.value() >= -1.0 - 1e-15);
            CHECK(a.value() <= 1.0 + 1e-15);
        }
        CHECK(std::abs(asym_unconditioned(td, tb, c).value()) < 1e-12);
    }
}

TEST_CASE("paper asymmetry = exact asymmetry with the oscillation dropped") {
    auto rng = test::make_rng(36);
    Constants no_osc = constants_paper();
    no_osc.delta_m = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double td = test::uniform(rng, 0.0, 6.0);
        const double tb = test::uniform(rng, 0.0, 6.0);
        for (PairBasis v : kAllPairBases) {
            const double exact = asym_exact(swap_pair_amplitudes(v, td, tb, no_osc)).value();
            const double paper = asym_paper(v, td, tb, no_osc);
            CHECK(std::abs(exact - paper) < 1e-12);
        }
    }
}

TEST_CASE("with the physical mass splitting the dropped factor is a cosine") {
    auto rng = test::make_rng(37);
    const Constants c = constants_paper();
    for (int it = 0; it < 200; ++it) {
        const double td = test::uniform(rng, 0.0, 6.0);
        const double tb = test::uniform(rng, 0.0, 6.0);

        const double exact3 = asym_exact(swap_pair_amplitudes(PairBasis::Phi3, td, tb, c)).value();
        CHECK(std::abs(exact3 - asym_paper(PairBasis::Phi3, td, tb, c) *
                                    std::cos(c.delta_m * (td + tb))) < 1e-10);

        const double exact4 = asym_exact(swap_pair_amplitudes(PairBasis::Phi4, td, tb, c)).value();
        CHECK(std::abs(exact4 - asym_paper(PairBasis::Phi4, td, tb, c) *
                                    std::cos(c.delta_m * (td - tb))) < 1e-10);

        const double exact1 = asym_exact(swap_pair_amplitudes(PairBasis::Phi1, td, tb, c)).value();
        CHECK(std::abs(exact1 - asym_paper(PairBasis::Phi1, td, tb, c) *
                                    std::cos(c.delta_m * td) * std::cos(c.delta_m * tb)) <
              1e-10);
    }
}
