#include "kaonsim/kaon.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kaonsim {

void Constants::validate() const {
    if (gamma_s != 1.0) {
        throw std::invalid_argument("Constants: gamma_s is fixed to 1 by the time unit");
    }
    if (!(gamma_l > 0.0) || !(gamma_l < 1.0)) {
        throw std::invalid_argument("Constants: gamma_l must lie in (0, 1)");
    }
    if (!std::isfinite(delta_m) || delta_m < 0.0) {
        throw std::invalid_argument("Constants: delta_m must be finite and >= 0");
    }
    if (std::abs(epsilon) >= 0.1) {
        throw std::invalid_argument("Constants: |epsilon| must be < 0.1");
    }
}

Constants constants_paper() { return Constants{}; }

double Kinematics::gamma_for(char label) const {
    switch (label) {
        case 'a': return gamma_a;
        case 'b': return gamma_b;
        case 'c': return gamma_c;
        case 'd': return gamma_d;
        default:
            throw std::invalid_argument(std::string("Kinematics: no Lorentz factor for '") +
                                        label + "'");
    }
}

double Kinematics::proper_time(double lab_duration, double gamma) const {
    if (lab_duration < 0.0) {
        throw std::invalid_argument("Kinematics: negative lab duration");
    }
    return convention == TimeConvention::Paper ? gamma * lab_duration
                                               : lab_duration / gamma;
}

void Kinematics::validate(bool require_cd_equal) const {
    for (double g : {gamma_a, gamma_b, gamma_c, gamma_d}) {
        if (!(g >= 1.0) || !std::isfinite(g)) {
            throw std::invalid_argument("Kinematics: Lorentz factors must be >= 1");
        }
    }
    if (t_y != 0.0) {
        throw std::invalid_argument("Kinematics: t_y is fixed to 0");
    }
    if (delta != 0.0) {
        throw std::invalid_argument("Kinematics: collision duration delta is fixed to 0");
    }
    if (t_z < 0.0 || t_x < t_y || t_x < t_z) {
        throw std::invalid_argument("Kinematics: need 0 <= t_z <= t_x");
    }
    if (gamma_a != gamma_b) {
        throw std::invalid_argument("Kinematics: gamma_a must equal gamma_b "
                                    "(a-b pair decay factor assumes it)");
    }
    if (require_cd_equal && gamma_c != gamma_d) {
        throw std::invalid_argument("Kinematics: gamma_c must equal gamma_d in swap mode");
    }
}

SingleKaon SingleKaon::normalized() const {
    const double n = survival();
    if (n < kZeroProjectionProb) {
        throw std::domain_error("SingleKaon::normalized: zero-norm state");
    }
    const double inv = 1.0 / std::sqrt(n);
    return SingleKaon{f * inv, g * inv};
}

Complex inner(const SingleKaon& a, const SingleKaon& b) {
    return std::conj(a.f) * b.f + std::conj(a.g) * b.g;
}

std::pair<SingleKaon, SingleKaon> mass_eigenstates(const Constants& c) {
    const Complex p = c.p();
    const Complex q = c.q();
    const double inv = 1.0 / std::sqrt(std::norm(p) + std::norm(q));
    SingleKaon ks{p * inv, q * inv};
    SingleKaon kl{p * inv, -q * inv};
    return {ks, kl};
}

Complex decay_factor_s(double tau, const Constants& c) {
    return Complex{std::exp(-0.5 * c.gamma_s * tau), 0.0};
}

Complex decay_factor_l(double tau, const Constants& c) {
    return std::polar(std::exp(-0.5 * c.gamma_l * tau), -c.delta_m * tau);
}

Mat2 evolution_matrix(double tau, const Constants& c) {
    if (tau < 0.0) {
        throw std::invalid_argument("evolution_matrix: tau must be >= 0");
    }
    const Complex es = decay_factor_s(tau, c);
    const Complex el = decay_factor_l(tau, c);
    const Complex p = c.p();
    const Complex q = c.q();
    const Complex sum = 0.5 * (es + el);
    const Complex dif = 0.5 * (es - el);
    return Mat2{sum, dif * p / q, dif * q / p, sum};
}

SingleKaon evolve(const SingleKaon& k, double tau, const Constants& c) {
    const Mat2 u = evolution_matrix(tau, c);
    SingleKaon out = k;
    u.apply(out.f, out.g);
    return out;
}

namespace {

MultiKaonState epr_pair(char l1, char l2, double sign) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    // index bit 0 = strangeness of l1, bit 1 = strangeness of l2
    std::vector<Complex> amps(4, Complex{0.0});
    amps[2] = Complex{inv_sqrt2};         // |K0>_1 |K0bar>_2
    amps[1] = Complex{sign * inv_sqrt2};  // |K0bar>_1 |K0>_2
    return MultiKaonState({l1, l2}, std::move(amps));
}

}  // namespace

MultiKaonState epr_singlet(char l1, char l2) { return epr_pair(l1, l2, -1.0); }

MultiKaonState psi_plus(char l1, char l2) { return epr_pair(l1, l2, +1.0); }

MultiKaonState pair_evolve(const MultiKaonState& s, double lab_duration,
                           const Kinematics& kin, const Constants& c) {
    if (lab_duration < 0.0) {
        throw std::invalid_argument("pair_evolve: negative duration");
    }
    MultiKaonState out = s;
    for (char label : s.labels()) {
        const double tau = kin.proper_time(lab_duration, kin.gamma_for(label));
        out = apply_single(out, label, evolution_matrix(tau, c));
    }
    return out;
}

SingleKaon regenerate(const SingleKaon& k, const Mat2& r_matrix, bool renormalize) {
    if (std::abs(r_matrix.det()) < 1e-300) {
        throw std::domain_error("regenerate: singular regeneration matrix");
    }
    SingleKaon out = k;
    r_matrix.apply(out.f, out.g);
    return renormalize ? out.normalized() : out;
}

MultiKaonState to_state(const SingleKaon& k, char label) {
    return MultiKaonState({label}, {k.f, k.g});
}

SingleKaon to_single(const MultiKaonState& s) {
    if (s.num_kaons() != 1) {
        throw std::invalid_argument("to_single: state must hold exactly one kaon");
    }
    return SingleKaon{s.amp(0), s.amp(1)};
}

}  // namespace kaonsim
