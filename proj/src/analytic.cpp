#include "kaonsim/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kaonsim {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Denominators below this are reported as infinite/undefined markers.
constexpr double kTinyProb = 1e-300;

void require_normalized(Complex alpha, Complex beta, const char* who) {
    const double n = std::norm(alpha) + std::norm(beta);
    if (std::abs(n - 1.0) > 1e-9) {
        throw std::invalid_argument(std::string(who) +
                                    ": |alpha|^2 + |beta|^2 must equal 1");
    }
}

ObsValue ratio(double num, double den) {
    if (den < kTinyProb) return ObsValue::infinite();
    return ObsValue::finite(num / den);
}

}  // namespace

double ObsValue::value() const {
    if (state_ != State::Finite) {
        throw std::domain_error("ObsValue::value: observable is not finite");
    }
    return value_;
}

TeleportCoeffs teleport_coeffs(Complex alpha, Complex beta, double t,
                               const Kinematics& kin, const Constants& c) {
    require_normalized(alpha, beta, "teleport_coeffs");
    if (t < kin.t_z) {
        throw std::invalid_argument("teleport_coeffs: t must be >= t_z");
    }

    const double tau_c = kin.proper_time(t - kin.t_z, kin.gamma_c);
    const Complex es = decay_factor_s(tau_c, c);
    const Complex el = decay_factor_l(tau_c, c);
    const Complex p = c.p();
    const Complex q = c.q();

    TeleportCoeffs tc;
    tc.f = 0.5 * ((alpha + beta * p / q) * es + (alpha - beta * p / q) * el);
    tc.g = 0.5 * ((alpha * q / p + beta) * es - (alpha * q / p - beta) * el);

    // Pair decay factor: product of the two reduced eigenvalue factors at
    // the common proper time of a and b (created at t_y = 0).
    const double tau_ab = kin.proper_time(t - kin.t_y, kin.gamma_b);
    tc.m = decay_factor_s(tau_ab, c) * decay_factor_l(tau_ab, c);
    return tc;
}

std::array<double, 4> projection_probs(const TeleportCoeffs& tc) {
    const double m2 = std::norm(tc.m);
    const double f2 = std::norm(tc.f);
    const double g2 = std::norm(tc.g);
    return {0.5 * m2 * f2, 0.5 * m2 * g2, 0.25 * m2 * (f2 + g2), 0.25 * m2 * (f2 + g2)};
}

SingleKaon post_projection_b(const TeleportCoeffs& tc, PairBasis outcome) {
    const double fg2 = std::norm(tc.f) + std::norm(tc.g);
    switch (outcome) {
        case PairBasis::Phi1:
            if (std::norm(tc.f) < kTinyProb) {
                throw std::domain_error("post_projection_b: phi1 has zero probability");
            }
            return SingleKaon{Complex{0.0}, Complex{1.0}};
        case PairBasis::Phi2:
            if (std::norm(tc.g) < kTinyProb) {
                throw std::domain_error("post_projection_b: phi2 has zero probability");
            }
            return SingleKaon{Complex{1.0}, Complex{0.0}};
        case PairBasis::Phi3:
        case PairBasis::Phi4: {
            if (fg2 < kTinyProb) {
                throw std::domain_error("post_projection_b: zero-probability outcome");
            }
            const double inv = 1.0 / std::sqrt(fg2);
            const Complex sign = (outcome == PairBasis::Phi3) ? Complex{-1.0} : Complex{1.0};
            return SingleKaon{tc.f * inv, sign * tc.g * inv};
        }
    }
    throw std::invalid_argument("post_projection_b: bad outcome tag");
}

ObsValue xi_exact(Complex alpha_x, Complex beta_x, double tau, const Constants& c) {
    require_normalized(alpha_x, beta_x, "xi_exact");
    const SingleKaon evolved = evolve(SingleKaon{alpha_x, beta_x}, tau, c);
    return ratio(std::norm(evolved.f), std::norm(evolved.g));
}

ObsValue xi_paper(Complex alpha_x, Complex beta_x, double tau, const Constants& c) {
    require_normalized(alpha_x, beta_x, "xi_paper");
    if (tau < 0.0) throw std::invalid_argument("xi_paper: tau must be >= 0");
    const double es = std::exp(-0.5 * c.gamma_s * tau);
    const double el = std::exp(-0.5 * c.gamma_l * tau);
    const Complex num = alpha_x * (es + el) + beta_x * (es - el);
    const Complex den = alpha_x * (es - el) + beta_x * (es + el);
    return ratio(std::norm(num), std::norm(den));
}

PairAmplitudes swap_pair_amplitudes(PairBasis outcome, double tau_d, double tau_b,
                                    const Constants& c) {
    if (tau_d < 0.0 || tau_b < 0.0) {
        throw std::invalid_argument("swap_pair_amplitudes: proper times must be >= 0");
    }
    const Complex sd = decay_factor_s(tau_d, c);
    const Complex ld = decay_factor_l(tau_d, c);
    const Complex sb = decay_factor_s(tau_b, c);
    const Complex lb = decay_factor_l(tau_b, c);
    const Complex p = c.p();
    const Complex q = c.q();

    PairAmplitudes pa;
    switch (outcome) {
        case PairBasis::Phi4: {
            // d-b pair left in the singlet
            const Complex across = ld * sb - sd * lb;
            const Complex along = ld * sb + sd * lb;
            pa.a00 = across * p / q * (0.5 * kInvSqrt2);
            pa.a01 = along * (0.5 * kInvSqrt2);
            pa.a10 = -pa.a01;
            pa.a11 = -across * q / p * (0.5 * kInvSqrt2);
            return pa;
        }
        case PairBasis::Phi3: {
            // d-b pair left in the symmetric strangeness-0 state
            const Complex across = sd * sb - ld * lb;
            const Complex along = sd * sb + ld * lb;
            pa.a00 = across * p / q * (0.5 * kInvSqrt2);
            pa.a01 = along * (0.5 * kInvSqrt2);
            pa.a10 = pa.a01;
            pa.a11 = across * q / p * (0.5 * kInvSqrt2);
            return pa;
        }
        case PairBasis::Phi1:
        case PairBasis::Phi2: {
            // d-b pair left in |K0bar K0bar> (phi1) or |K0 K0> (phi2);
            // the pair evolves as a product, so the amplitudes are the
            // corresponding evolution-matrix column products.
            const Mat2 ud = evolution_matrix(tau_d, c);
            const Mat2 ub = evolution_matrix(tau_b, c);
            const bool from_k0bar = (outcome == PairBasis::Phi1);
            const Complex d0 = from_k0bar ? ud.a01 : ud.a00;
            const Complex d1 = from_k0bar ? ud.a11 : ud.a10;
            const Complex b0 = from_k0bar ? ub.a01 : ub.a00;
            const Complex b1 = from_k0bar ? ub.a11 : ub.a10;
            pa.a00 = d0 * b0;
            pa.a01 = d0 * b1;
            pa.a10 = d1 * b0;
            pa.a11 = d1 * b1;
            return pa;
        }
    }
    throw std::invalid_argument("swap_pair_amplitudes: bad outcome tag");
}

ObsValue asym_exact(const PairAmplitudes& pa) {
    const double diff = pa.p_diff();
    const double same = pa.p_same();
    if (diff + same < kTinyProb) return ObsValue::undefined();
    return ObsValue::finite((diff - same) / (diff + same));
}

double asym_paper(PairBasis outcome, double tau_d, double tau_b, const Constants& c) {
    if (tau_d < 0.0 || tau_b < 0.0) {
        throw std::invalid_argument("asym_paper: proper times must be >= 0");
    }
    const double gs = c.gamma_s;
    const double gl = c.gamma_l;
    const double cross = std::exp(-0.5 * (gs + gl) * (tau_d + tau_b));
    switch (outcome) {
        case PairBasis::Phi4:
            return 2.0 * cross /
                   (std::exp(-(gl * tau_d + gs * tau_b)) +
                    std::exp(-(gs * tau_d + gl * tau_b)));
        case PairBasis::Phi3:
            return 2.0 * cross /
                   (std::exp(-gs * (tau_d + tau_b)) + std::exp(-gl * (tau_d + tau_b)));
        case PairBasis::Phi1:
        case PairBasis::Phi2:
            return -4.0 * cross /
                   ((std::exp(-gs * tau_d) + std::exp(-gl * tau_d)) *
                    (std::exp(-gs * tau_b) + std::exp(-gl * tau_b)));
    }
    throw std::invalid_argument("asym_paper: bad outcome tag");
}

ObsValue xi_unconditioned(const TeleportCoeffs& tc, double tau, const Constants& c) {
    const std::array<double, 4> probs = projection_probs(tc);
    double k0 = 0.0;
    double k0bar = 0.0;
    for (PairBasis v : kAllPairBases) {
        const double pr = probs[static_cast<int>(v)];
        if (pr < kTinyProb) continue;
        const SingleKaon post = post_projection_b(tc, v);
        const SingleKaon evolved = evolve(post, tau, c);
        k0 += pr * std::norm(evolved.f);
        k0bar += pr * std::norm(evolved.g);
    }
    return ratio(k0, k0bar);
}

ObsValue asym_unconditioned(double tau_d, double tau_b, const Constants& c) {
    // The four swap outcomes are equiprobable; weight the per-outcome
    // diff/same survival probabilities equally.
    double diff = 0.0;
    double same = 0.0;
    for (PairBasis v : kAllPairBases) {
        const PairAmplitudes pa = swap_pair_amplitudes(v, tau_d, tau_b, c);
        diff += pa.p_diff();
        same += pa.p_same();
    }
    if (diff + same < kTinyProb) return ObsValue::undefined();
    return ObsValue::finite((diff - same) / (diff + same));
}

}  // namespace kaonsim
