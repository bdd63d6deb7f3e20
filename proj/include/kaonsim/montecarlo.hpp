// montecarlo.hpp
// Stochastic event generation for the protocol pipelines, delayed-choice
// subensemble sorting, and statistical estimators for the strangeness
// ratio and asymmetry. Event k of an ensemble is a pure function of
// (master_seed, k): the generated record list is identical for any
// worker count.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kaonsim/analytic.hpp"
#include "kaonsim/protocols.hpp"

namespace kaonsim {

enum class MeasResult : std::uint8_t { K0 = 0, K0bar = 1, Decayed = 2, None = 3 };

const char* meas_result_name(MeasResult r);  // "K0", "K0bar", "decayed", "-"

struct EventRecord {
    std::uint64_t run_index = 0;
    ProjectionOutcome outcome = ProjectionOutcome::spoiled(SpoiledSource::PairAB);
    bool retained = false;
    MeasResult b_result = MeasResult::None;
    MeasResult d_result = MeasResult::None;  // swap/general modes only
    double t_m = 0.0;
};

// Joint (d, b) measurement categories in CDF order; the order is part of
// the reproducibility contract.
inline constexpr std::array<std::pair<MeasResult, MeasResult>, 9> kPairMeasOrder = {{
    {MeasResult::K0, MeasResult::K0},
    {MeasResult::K0, MeasResult::K0bar},
    {MeasResult::K0bar, MeasResult::K0},
    {MeasResult::K0bar, MeasResult::K0bar},
    {MeasResult::K0, MeasResult::Decayed},
    {MeasResult::K0bar, MeasResult::Decayed},
    {MeasResult::Decayed, MeasResult::K0},
    {MeasResult::Decayed, MeasResult::K0bar},
    {MeasResult::Decayed, MeasResult::Decayed},
}};

// Precomputed sampling tables for one (setup, measurement time) pair:
// collision outcome distribution, then per-outcome strangeness
// measurement distributions at t_m.
class EventSampler {
  public:
    EventSampler(const ProtocolSetup& setup, double t_m,
                 RetainPolicy policy = RetainPolicy::default_policy());

    EventRecord sample(std::uint64_t run_index, double u_outcome, double u_meas) const;

    double t_m() const { return t_m_; }
    bool has_partner_d() const { return two_partners_; }
    const std::array<double, 4>& outcome_probs() const { return probs_; }
    double spoiled_prob() const { return spoiled_total_; }

    // Measurement distribution for a projected outcome: 3 entries
    // (K0, K0bar, Decayed) for teleport runs, 9 entries in kPairMeasOrder
    // for swap/general runs.
    std::span<const double> measurement_probs(PairBasis outcome) const;

  private:
    bool two_partners_;
    double t_m_;
    RetainPolicy policy_;
    std::array<double, 4> probs_{};
    double spoiled_total_ = 0.0;
    double spoiled_first_ = 0.0;  // weight of the first spoil source
    SpoiledSource first_source_ = SpoiledSource::KaonC;
    SpoiledSource second_source_ = SpoiledSource::PairAB;
    std::array<double, 6> outcome_cdf_{};             // phi1..4, spoil1, spoil2
    std::array<std::array<double, 9>, 4> meas_{};     // probabilities
    std::array<std::array<double, 9>, 4> meas_cdf_{};
    std::array<std::size_t, 4> meas_len_{};
};

// Convenience wrapper: the uniforms for run_index drawn from the seed.
EventRecord sample_event(const EventSampler& sampler, std::uint64_t run_index,
                         std::uint64_t master_seed);

// Generate n_runs events measured at lab time t_m. n_workers = 0 picks
// the hardware concurrency. The output is ordered by run_index and does
// not depend on the worker count.
std::vector<EventRecord> run_ensemble(const ProtocolSetup& setup, double t_m,
                                      std::uint64_t n_runs, std::uint64_t master_seed,
                                      unsigned n_workers = 0,
                                      RetainPolicy policy = RetainPolicy::default_policy());

// Post-hoc partition of recorded runs by projection outcome.
struct Subensembles {
    std::array<std::vector<EventRecord>, 4> projected;
    std::vector<EventRecord> spoiled;

    const std::vector<EventRecord>& for_basis(PairBasis v) const {
        return projected[static_cast<int>(v)];
    }
    std::size_t total() const;
};

Subensembles sort_subensembles(std::span<const EventRecord> events);

struct ObservableEstimate {
    ObsValue value = ObsValue::undefined();
    double stderr = 0.0;
    std::uint64_t n_used = 0;
    double t_m = 0.0;
};

// N(K0) / N(K0bar) among surviving b kaons; decayed and spoiled runs are
// excluded from both counts.
ObservableEstimate estimate_xi(std::span<const EventRecord> events);

// (N_diff - N_same) / (N_diff + N_same) among runs where both d and b
// survive to the measurement.
ObservableEstimate estimate_asymmetry(std::span<const EventRecord> events);

}  // namespace kaonsim
