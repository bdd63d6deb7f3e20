// analytic.hpp
// Closed-form expressions for the teleportation and swapping observables:
// the evolved unknown-kaon amplitudes, pair decay factor, collision
// projection probabilities, post-projection partner states, the
// strangeness ratio xi and the d-b strangeness asymmetry A, each in an
// exact form and in the simplified real-exponential form that drops the
// mass-splitting oscillation.

#pragma once

#include <array>

#include "kaonsim/kaon.hpp"
#include "kaonsim/qstate.hpp"

namespace kaonsim {

// A real observable that may come out infinite (ratio with empty
// denominator) or undefined (no usable statistics at all).
class ObsValue {
  public:
    static ObsValue finite(double v) { return ObsValue{State::Finite, v}; }
    static ObsValue infinite() { return ObsValue{State::Infinite, 0.0}; }
    static ObsValue undefined() { return ObsValue{State::Undefined, 0.0}; }

    bool is_finite() const { return state_ == State::Finite; }
    bool is_infinite() const { return state_ == State::Infinite; }
    bool is_undefined() const { return state_ == State::Undefined; }

    double value() const;  // throws unless finite

  private:
    enum class State { Finite, Infinite, Undefined };
    ObsValue(State s, double v) : state_(s), value_(v) {}
    State state_;
    double value_;
};

// Amplitudes of the unknown kaon c at lab time t (created at t_z as
// alpha |K0> + beta |K0bar>) together with the a-b pair decay factor m.
struct TeleportCoeffs {
    Complex f{};  // K0 amplitude of c
    Complex g{};  // K0bar amplitude of c
    Complex m{};  // pair decay factor of the a-b singlet
};

// Requires t >= t_z. Uses the reduced decay eigenvalues throughout.
TeleportCoeffs teleport_coeffs(Complex alpha, Complex beta, double t,
                               const Kinematics& kin, const Constants& c);

// Collision projection probabilities in phi1..phi4 order:
// |m f|^2/2, |m g|^2/2, |m|^2(|f|^2+|g|^2)/4, |m|^2(|f|^2+|g|^2)/4.
std::array<double, 4> projection_probs(const TeleportCoeffs& tc);

// Normalized state of kaon b conditioned on the projection outcome.
// Throws std::domain_error on a zero-probability outcome.
SingleKaon post_projection_b(const TeleportCoeffs& tc, PairBasis outcome);

// Strangeness ratio |f(tau)|^2 / |g(tau)|^2 of a kaon that starts as
// (alpha_x, beta_x), normalized, and decays for proper time tau.
ObsValue xi_exact(Complex alpha_x, Complex beta_x, double tau, const Constants& c);

// Same ratio with real exponentials only (the mass-splitting phase and
// the CP-violation weights dropped). Coincides with xi_exact when
// delta_m = 0 and epsilon = 0.
ObsValue xi_paper(Complex alpha_x, Complex beta_x, double tau, const Constants& c);

// Strangeness amplitudes of the d-b pair at proper times (tau_d, tau_b)
// after a collision projection: a00 = (K0, K0), a01 = (K0, K0bar),
// a10 = (K0bar, K0), a11 = (K0bar, K0bar), d listed first.
struct PairAmplitudes {
    Complex a00{}, a01{}, a10{}, a11{};

    double p_same() const { return std::norm(a00) + std::norm(a11); }
    double p_diff() const { return std::norm(a01) + std::norm(a10); }
};

// d-b amplitudes for each projection outcome of the swap protocol
// (entangled pairs created in the singlet; the pair-decay prefactors of
// the collision stage are not included, matching a post-state normalized
// at the collision).
PairAmplitudes swap_pair_amplitudes(PairBasis outcome, double tau_d, double tau_b,
                                    const Constants& c);

// A = (p_diff - p_same) / (p_diff + p_same); undefined when both vanish.
ObsValue asym_exact(const PairAmplitudes& pa);

// The simplified asymmetry expressions without the oscillation factor:
//   phi4 (singlet):  2 e^{-(G_S+G_L)(td+tb)/2} / (e^{-(G_L td+G_S tb)} + e^{-(G_S td+G_L tb)})
//   phi3 (triplet):  2 e^{-(G_S+G_L)(td+tb)/2} / (e^{-G_S(td+tb)} + e^{-G_L(td+tb)})
//   phi1/phi2:      -4 e^{-(G_S+G_L)(td+tb)/2} / ((e^{-G_S td}+e^{-G_L td})(e^{-G_S tb}+e^{-G_L tb}))
// The phi4 denominator is symmetrized in (tau_d, tau_b); the phi1/phi2 form
// generalizes the equal-gamma expression as a product over the two kaons.
double asym_paper(PairBasis outcome, double tau_d, double tau_b, const Constants& c);

// Ensemble values with no conditioning on the projection outcome: the
// probability-weighted mixture over the four outcomes. Both are evaluated
// at proper time tau after the collision (equal-gamma d, b for the
// asymmetry case uses tau_d = tau_b = tau).
ObsValue xi_unconditioned(const TeleportCoeffs& tc, double tau, const Constants& c);
ObsValue asym_unconditioned(double tau_d, double tau_b, const Constants& c);

}  // namespace kaonsim
