// kaon.hpp
// Neutral-kaon physics model: decay-width constants, mass/CP basis
// relations, non-unitary weak-decay evolution, EPR pair construction and
// regeneration transforms. Times are in units of the K_S mean lifetime,
// so the short decay width is 1 by construction.

#pragma once

#include <utility>

#include "kaonsim/qstate.hpp"

namespace kaonsim {

// hbar in MeV*s; used only to express the mass splitting in width units.
inline constexpr double kHbarMeVSeconds = 6.58212e-22;

// Measured K_S / K_L mean lifetimes and K_L - K_S mass splitting.
inline constexpr double kTauShortSeconds = 0.8953e-10;
inline constexpr double kTauLongSeconds = 5.114e-8;
inline constexpr double kDeltaMassMeV = 3.483e-12;

struct Constants {
    double gamma_s = 1.0;  // short decay width (fixed by unit choice)
    // Long decay width in gamma_s units: tau_S / tau_L.
    double gamma_l = kTauShortSeconds / kTauLongSeconds;
    // m_L - m_S in gamma_s units: delta_m / (hbar / tau_S).
    double delta_m = kDeltaMassMeV / (kHbarMeVSeconds / kTauShortSeconds);
    Complex epsilon{0.0, 0.0};  // CP-violation parameter

    Complex p() const { return Complex{1.0} + epsilon; }
    Complex q() const { return Complex{1.0} - epsilon; }
    // Normalization relating the strangeness- and mass-basis singlets.
    Complex r() const {
        return (std::norm(p()) + std::norm(q())) / (2.0 * p() * q());
    }

    void validate() const;  // throws std::invalid_argument
};

// Constants recomputed from the measured lifetimes (0.8953e-10 s and
// 5.114e-8 s) and mass splitting (3.483e-12 MeV).
Constants constants_paper();

// Proper-time convention for a kaon moving with Lorentz factor gamma over
// a lab-frame duration dt. Paper: tau = gamma * dt (as used throughout the
// source formulas); Standard: tau = dt / gamma (textbook time dilation).
enum class TimeConvention { Paper, Standard };

struct Kinematics {
    double gamma_a = 1.0, gamma_b = 1.0, gamma_c = 1.0, gamma_d = 1.0;
    double t_y = 0.0;  // creation time of the a-b pair (fixed 0)
    double t_z = 0.0;  // creation time of kaon c (or the d-c pair)
    double t_x = 0.0;  // c-a collision time
    double delta = 0.0;  // collision duration (fixed 0)
    TimeConvention convention = TimeConvention::Paper;

    double gamma_for(char label) const;
    double proper_time(double lab_duration, double gamma) const;

    // require_cd_equal: the d-c pair-decay factor assumes gamma_c == gamma_d.
    void validate(bool require_cd_equal) const;
};

// One kaon in the strangeness basis: f = K0 amplitude, g = K0bar amplitude.
struct SingleKaon {
    Complex f{}, g{};

    double survival() const { return std::norm(f) + std::norm(g); }
    SingleKaon normalized() const;
};

Complex inner(const SingleKaon& a, const SingleKaon& b);

// (K_S, K_L) in strangeness components: (p, +-q)/sqrt(|p|^2+|q|^2).
std::pair<SingleKaon, SingleKaon> mass_eigenstates(const Constants& c);

// Reduced decay eigenvalue factors exp(-i lambda~ tau) with the common
// phase exp(-i m_S tau) dropped: lambda~_S = -i gamma_s/2,
// lambda~_L = delta_m - i gamma_l/2.
Complex decay_factor_s(double tau, const Constants& c);
Complex decay_factor_l(double tau, const Constants& c);

// Strangeness-basis evolution operator for proper time tau >= 0; has
// eigenvectors K_S, K_L with the reduced eigenvalue factors above.
Mat2 evolution_matrix(double tau, const Constants& c);

SingleKaon evolve(const SingleKaon& k, double tau, const Constants& c);

// (|K0 K0bar> - |K0bar K0>)/sqrt2 and (|K0 K0bar> + |K0bar K0>)/sqrt2.
MultiKaonState epr_singlet(char l1, char l2);
MultiKaonState psi_plus(char l1, char l2);

// Evolve every kaon of a state over a lab-frame duration, each with its
// own proper time per the Kinematics. For an equal-gamma singlet this
// reduces to multiplication by the pair decay factor.
MultiKaonState pair_evolve(const MultiKaonState& s, double lab_duration,
                           const Kinematics& kin, const Constants& c);

// Passage through regeneration material: (f, g) <- r_matrix * (f, g).
// Renormalizes only when preparation semantics are requested.
SingleKaon regenerate(const SingleKaon& k, const Mat2& r_matrix,
                      bool renormalize = false);

// Conversions between the one-kaon struct and labeled state vectors.
MultiKaonState to_state(const SingleKaon& k, char label);
SingleKaon to_single(const MultiKaonState& s);

}  // namespace kaonsim
