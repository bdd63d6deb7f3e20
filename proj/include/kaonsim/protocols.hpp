// protocols.hpp
// The three protocol pipelines as exact state-vector computations:
// teleportation of a pure kaon state, entanglement swapping, and the
// general teleportation of a kaon entangled with a partner system,
// including the stochastic retain/abandon rule on the receiving side.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>

#include "kaonsim/analytic.hpp"
#include "kaonsim/kaon.hpp"
#include "kaonsim/qstate.hpp"

namespace kaonsim {

// Teleport an unknown pure state alpha |K0> + beta |K0bar> of kaon c.
struct TeleportMode {
    Complex alpha{}, beta{};
};

// Swap entanglement between the d-c and a-b singlets.
struct SwapMode {};

// Teleport kaon c that is entangled with a partner kaon d; the d-c state
// at collision time is c1 |w1>_d |K0>_c + c2 |w2>_d |K0bar>_c with w1, w2
// normalized but not necessarily orthogonal.
struct GeneralMode {
    Complex c1{};
    SingleKaon w1{};
    Complex c2{};
    SingleKaon w2{};
};

using ProtocolMode = std::variant<TeleportMode, SwapMode, GeneralMode>;

struct ProtocolSetup {
    ProtocolMode mode;
    Kinematics kin;
    Constants constants;

    bool has_partner_d() const { return !std::holds_alternative<TeleportMode>(mode); }
    void validate() const;  // throws std::invalid_argument
};

// The collision projection result; Spoiled marks runs where decay removed
// a kaon before the collision could project anything.
enum class SpoiledSource { KaonC, PairDC, PairAB };

struct ProjectionOutcome {
    static ProjectionOutcome projected(PairBasis v) {
        return ProjectionOutcome{false, v, SpoiledSource::KaonC};
    }
    static ProjectionOutcome spoiled(SpoiledSource s) {
        return ProjectionOutcome{true, PairBasis::Phi1, s};
    }

    bool is_spoiled() const { return spoiled_; }
    PairBasis basis() const;          // throws when spoiled
    SpoiledSource source() const;     // throws when not spoiled

    bool operator==(const ProjectionOutcome&) const = default;

  private:
    ProjectionOutcome(bool sp, PairBasis v, SpoiledSource s)
        : spoiled_(sp), basis_(v), source_(s) {}
    bool spoiled_;
    PairBasis basis_;
    SpoiledSource source_;
};

const char* outcome_name(const ProjectionOutcome& o);  // "phi1".."phi4", "spoiled_*"
std::optional<ProjectionOutcome> outcome_from_name(const std::string& name);

// The exact (unnormalized, decay-included) 3- or 4-kaon state at the
// collision time t_x, labels (c, a, b) or (d, c, a, b).
MultiKaonState build_state_at_collision(const ProtocolSetup& setup);

struct CollisionProjection {
    double prob = 0.0;
    std::optional<MultiKaonState> partner;  // normalized; empty on zero prob
};

// Project the c-a pair onto the outcome basis vector. The collision
// unitary conserves the pair quantum numbers, so it is modeled as the
// identity; a block unitary (diagonal in the projection basis) can be
// injected to exercise that independence.
CollisionProjection collide_project(const MultiKaonState& state, PairBasis outcome,
                                    const Mat4* collision_unitary = nullptr);

// Which projection outcomes the receiver keeps. Default: only phi4, the
// branch that reproduces the input state with no correction.
struct RetainPolicy {
    std::array<bool, 4> keep{false, false, false, true};

    static RetainPolicy default_policy() { return RetainPolicy{}; }
    static RetainPolicy keep_all() { return RetainPolicy{{true, true, true, true}}; }
};

bool bob_retain(const ProjectionOutcome& outcome, const RetainPolicy& policy);

// Normalized state the protocol is supposed to deliver: the evolved input
// state on b (teleport), the d-b singlet (swap), or the entangled
// c1 w1 K0 + c2 w2 K0bar on (d, b) (general).
MultiKaonState protocol_target(const ProtocolSetup& setup);

// |<target|partner>|^2 for the given outcome. Throws on zero probability.
double teleport_fidelity(const ProtocolSetup& setup, PairBasis outcome);

// Closed-form projection probabilities for the setup (phi1..phi4 order).
std::array<double, 4> analytic_outcome_probs(const ProtocolSetup& setup);

}  // namespace kaonsim
