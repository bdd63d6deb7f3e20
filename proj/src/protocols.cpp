#include "kaonsim/protocols.hpp"

#include <cmath>
#include <stdexcept>

namespace kaonsim {

namespace {

void require_unit(double n, const char* what) {
    if (std::abs(n - 1.0) > 1e-9) {
        throw std::invalid_argument(std::string(what) + " must be normalized");
    }
}

// Unnormalized d-c state c1 |w1>_d |K0>_c + c2 |w2>_d |K0bar>_c.
MultiKaonState general_dc_state(const GeneralMode& gm) {
    std::vector<Complex> amps(4, Complex{0.0});
    // bit 0 = strangeness of d, bit 1 = strangeness of c
    amps[0] = gm.c1 * gm.w1.f;
    amps[1] = gm.c1 * gm.w1.g;
    amps[2] = gm.c2 * gm.w2.f;
    amps[3] = gm.c2 * gm.w2.g;
    return MultiKaonState({'d', 'c'}, std::move(amps));
}

}  // namespace

void ProtocolSetup::validate() const {
    constants.validate();
    kin.validate(/*require_cd_equal=*/std::holds_alternative<SwapMode>(mode));
    if (const auto* tm = std::get_if<TeleportMode>(&mode)) {
        require_unit(std::norm(tm->alpha) + std::norm(tm->beta),
                     "teleport input (|alpha|^2 + |beta|^2)");
    } else if (const auto* gm = std::get_if<GeneralMode>(&mode)) {
        require_unit(gm->w1.survival(), "general input w1");
        require_unit(gm->w2.survival(), "general input w2");
        require_unit(std::norm(gm->c1) + std::norm(gm->c2),
                     "general input (|c1|^2 + |c2|^2)");
    }
}

PairBasis ProjectionOutcome::basis() const {
    if (spoiled_) throw std::logic_error("ProjectionOutcome: spoiled run has no basis");
    return basis_;
}

SpoiledSource ProjectionOutcome::source() const {
    if (!spoiled_) throw std::logic_error("ProjectionOutcome: projected run has no spoil source");
    return source_;
}

const char* outcome_name(const ProjectionOutcome& o) {
    if (!o.is_spoiled()) return pair_basis_name(o.basis());
    switch (o.source()) {
        case SpoiledSource::KaonC: return "spoiled_c";
        case SpoiledSource::PairDC: return "spoiled_dc";
        case SpoiledSource::PairAB: return "spoiled_ab";
    }
    return "?";
}

std::optional<ProjectionOutcome> outcome_from_name(const std::string& name) {
    for (PairBasis v : kAllPairBases) {
        if (name == pair_basis_name(v)) return ProjectionOutcome::projected(v);
    }
    if (name == "spoiled_c") return ProjectionOutcome::spoiled(SpoiledSource::KaonC);
    if (name == "spoiled_dc") return ProjectionOutcome::spoiled(SpoiledSource::PairDC);
    if (name == "spoiled_ab") return ProjectionOutcome::spoiled(SpoiledSource::PairAB);
    return std::nullopt;
}

MultiKaonState build_state_at_collision(const ProtocolSetup& setup) {
    setup.validate();
    const Kinematics& kin = setup.kin;
    const Constants& c = setup.constants;

    const MultiKaonState ab_pair =
        pair_evolve(epr_singlet('a', 'b'), kin.t_x - kin.t_y, kin, c);

    if (const auto* tm = std::get_if<TeleportMode>(&setup.mode)) {
        const double tau_c = kin.proper_time(kin.t_x - kin.t_z, kin.gamma_c);
        const SingleKaon ck = evolve(SingleKaon{tm->alpha, tm->beta}, tau_c, c);
        return tensor(to_state(ck, 'c'), ab_pair);
    }
    if (std::holds_alternative<SwapMode>(setup.mode)) {
        const MultiKaonState dc_pair =
            pair_evolve(epr_singlet('d', 'c'), kin.t_x - kin.t_z, kin, c);
        return tensor(dc_pair, ab_pair);
    }
    const auto& gm = std::get<GeneralMode>(setup.mode);
    return tensor(general_dc_state(gm), ab_pair);
}

CollisionProjection collide_project(const MultiKaonState& state, PairBasis outcome,
                                    const Mat4* collision_unitary) {
    const MultiKaonState* s = &state;
    std::optional<MultiKaonState> transformed;
    if (collision_unitary != nullptr) {
        transformed = apply_pair(state, 'c', 'a', *collision_unitary);
        s = &*transformed;
    }
    PairProjection pp = project_pair(*s, 'c', 'a', outcome);
    return CollisionProjection{pp.prob, std::move(pp.post)};
}

bool bob_retain(const ProjectionOutcome& outcome, const RetainPolicy& policy) {
    if (outcome.is_spoiled()) return false;
    return policy.keep[static_cast<int>(outcome.basis())];
}

MultiKaonState protocol_target(const ProtocolSetup& setup) {
    if (const auto* tm = std::get_if<TeleportMode>(&setup.mode)) {
        const TeleportCoeffs tc = teleport_coeffs(tm->alpha, tm->beta, setup.kin.t_x,
                                                  setup.kin, setup.constants);
        const SingleKaon target = SingleKaon{tc.f, tc.g}.normalized();
        return to_state(target, 'b');
    }
    if (std::holds_alternative<SwapMode>(setup.mode)) {
        return epr_singlet('d', 'b');
    }
    const auto& gm = std::get<GeneralMode>(setup.mode);
    std::vector<Complex> amps(4, Complex{0.0});
    // bit 0 = strangeness of d, bit 1 = strangeness of b
    amps[0] = gm.c1 * gm.w1.f;
    amps[1] = gm.c1 * gm.w1.g;
    amps[2] = gm.c2 * gm.w2.f;
    amps[3] = gm.c2 * gm.w2.g;
    return normalized(MultiKaonState({'d', 'b'}, std::move(amps)));
}

double teleport_fidelity(const ProtocolSetup& setup, PairBasis outcome) {
    const MultiKaonState state = build_state_at_collision(setup);
    const CollisionProjection proj = collide_project(state, outcome);
    if (!proj.partner) {
        throw std::domain_error("teleport_fidelity: zero-probability outcome");
    }
    return phase_overlap(protocol_target(setup), *proj.partner);
}

std::array<double, 4> analytic_outcome_probs(const ProtocolSetup& setup) {
    setup.validate();
    const Kinematics& kin = setup.kin;
    const Constants& c = setup.constants;

    const double tau_ab = kin.proper_time(kin.t_x - kin.t_y, kin.gamma_b);
    const double m2_ab =
        std::norm(decay_factor_s(tau_ab, c) * decay_factor_l(tau_ab, c));

    if (const auto* tm = std::get_if<TeleportMode>(&setup.mode)) {
        return projection_probs(
            teleport_coeffs(tm->alpha, tm->beta, kin.t_x, kin, c));
    }
    if (std::holds_alternative<SwapMode>(setup.mode)) {
        const double tau_dc = kin.proper_time(kin.t_x - kin.t_z, kin.gamma_d);
        const double m2_dc =
            std::norm(decay_factor_s(tau_dc, c) * decay_factor_l(tau_dc, c));
        const double each = 0.25 * m2_ab * m2_dc;
        return {each, each, each, each};
    }
    const auto& gm = std::get<GeneralMode>(setup.mode);
    return {0.5 * m2_ab * std::norm(gm.c1), 0.5 * m2_ab * std::norm(gm.c2),
            0.25 * m2_ab, 0.25 * m2_ab};
}

}  // namespace kaonsim
