#include "kaonsim/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "kaonsim/rng.hpp"

namespace kaonsim {

namespace {

constexpr std::size_t kUniformBatch = 4096;

double clamp_prob(double p) { return p < 0.0 ? 0.0 : p; }

// Squared magnitudes of a 4-amplitude (d, b) state, indexed d_bit + 2*b_bit.
std::array<double, 4> joint_probs(const MultiKaonState& s) {
    return {std::norm(s.amp(0)), std::norm(s.amp(1)), std::norm(s.amp(2)),
            std::norm(s.amp(3))};
}

}  // namespace

const char* meas_result_name(MeasResult r) {
    switch (r) {
        case MeasResult::K0: return "K0";
        case MeasResult::K0bar: return "K0bar";
        case MeasResult::Decayed: return "decayed";
        case MeasResult::None: return "-";
    }
    return "?";
}

EventSampler::EventSampler(const ProtocolSetup& setup, double t_m, RetainPolicy policy)
    : two_partners_(setup.has_partner_d()), t_m_(t_m), policy_(policy) {
    setup.validate();
    if (t_m < setup.kin.t_x) {
        throw std::invalid_argument("EventSampler: t_m must be >= t_x");
    }
    const Kinematics& kin = setup.kin;
    const Constants& c = setup.constants;

    probs_ = analytic_outcome_probs(setup);
    const double projected_total = probs_[0] + probs_[1] + probs_[2] + probs_[3];

    // Split the spoiled branch by which subsystem decayed before t_x.
    const double tau_ab = kin.proper_time(kin.t_x - kin.t_y, kin.gamma_b);
    const double s_ab = std::norm(decay_factor_s(tau_ab, c) * decay_factor_l(tau_ab, c));
    spoiled_total_ = clamp_prob(1.0 - projected_total);
    if (const auto* tm = std::get_if<TeleportMode>(&setup.mode)) {
        const double tau_c = kin.proper_time(kin.t_x - kin.t_z, kin.gamma_c);
        const double s_c = evolve(SingleKaon{tm->alpha, tm->beta}, tau_c, c).survival();
        first_source_ = SpoiledSource::KaonC;
        spoiled_first_ = clamp_prob(1.0 - s_c);
        second_source_ = SpoiledSource::PairAB;
    } else if (std::holds_alternative<SwapMode>(setup.mode)) {
        const double tau_dc = kin.proper_time(kin.t_x - kin.t_z, kin.gamma_d);
        const double s_dc =
            std::norm(decay_factor_s(tau_dc, c) * decay_factor_l(tau_dc, c));
        first_source_ = SpoiledSource::PairDC;
        spoiled_first_ = clamp_prob(1.0 - s_dc);
        second_source_ = SpoiledSource::PairAB;
    } else {
        // General mode: the d-c state is specified at t_x, so only the
        // a-b pair can spoil the run.
        first_source_ = SpoiledSource::PairAB;
        spoiled_first_ = clamp_prob(1.0 - s_ab);
        second_source_ = SpoiledSource::PairAB;
    }
    spoiled_first_ = std::min(spoiled_first_, spoiled_total_);

    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        acc += probs_[i];
        outcome_cdf_[i] = acc;
    }
    outcome_cdf_[4] = std::min(1.0, acc + spoiled_first_);
    outcome_cdf_[5] = 1.0;

    // Per-outcome strangeness measurement distributions at t_m.
    const MultiKaonState state = build_state_at_collision(setup);
    const double lab_dt = t_m - kin.t_x;
    const Mat2 u_b = evolution_matrix(kin.proper_time(lab_dt, kin.gamma_b), c);
    const Mat2 u_d = evolution_matrix(kin.proper_time(lab_dt, kin.gamma_d), c);

    for (PairBasis v : kAllPairBases) {
        const int vi = static_cast<int>(v);
        const CollisionProjection proj = collide_project(state, v);
        if (!proj.partner) {
            // Zero-probability outcome: never drawn, table left empty.
            meas_len_[vi] = two_partners_ ? 9 : 3;
            continue;
        }
        if (!two_partners_) {
            const SingleKaon post = to_single(*proj.partner);
            SingleKaon evolved = post;
            u_b.apply(evolved.f, evolved.g);
            const double pk0 = std::norm(evolved.f);
            const double pk0bar = std::norm(evolved.g);
            meas_[vi] = {pk0, pk0bar, clamp_prob(1.0 - pk0 - pk0bar)};
            meas_len_[vi] = 3;
        } else {
            // Joint (d, b) distribution including single- and double-decay
            // branches, from the survival amplitudes of the three partial
            // evolutions (d only, b only, both).
            const MultiKaonState& post = *proj.partner;
            const MultiKaonState both =
                apply_single(apply_single(post, 'd', u_d), 'b', u_b);
            const MultiKaonState d_only = apply_single(post, 'd', u_d);
            const MultiKaonState b_only = apply_single(post, 'b', u_b);
            const auto pb = joint_probs(both);
            const auto pd = joint_probs(d_only);
            const auto pbo = joint_probs(b_only);

            std::array<double, 9> m{};
            // both survive: (d=i, b=j) = |amp(i + 2j)|^2
            m[0] = pb[0];          // (K0, K0)
            m[1] = pb[2];          // (K0, K0bar)
            m[2] = pb[1];          // (K0bar, K0)
            m[3] = pb[3];          // (K0bar, K0bar)
            // d survives, b decayed: sum_j (|d_only|^2 - |both|^2)
            m[4] = clamp_prob((pd[0] + pd[2]) - (pb[0] + pb[2]));  // (K0, dec)
            m[5] = clamp_prob((pd[1] + pd[3]) - (pb[1] + pb[3]));  // (K0bar, dec)
            // b survives, d decayed
            m[6] = clamp_prob((pbo[0] + pbo[1]) - (pb[0] + pb[1]));  // (dec, K0)
            m[7] = clamp_prob((pbo[2] + pbo[3]) - (pb[2] + pb[3]));  // (dec, K0bar)
            // both decayed
            const double sum_b = pb[0] + pb[1] + pb[2] + pb[3];
            const double sum_d = pd[0] + pd[1] + pd[2] + pd[3];
            const double sum_bo = pbo[0] + pbo[1] + pbo[2] + pbo[3];
            m[8] = clamp_prob(1.0 - sum_d - sum_bo + sum_b);
            meas_[vi] = m;
            meas_len_[vi] = 9;
        }
        double total = 0.0;
        for (std::size_t k = 0; k < meas_len_[vi]; ++k) total += meas_[vi][k];
        if (std::abs(total - 1.0) > 1e-9) {
            throw std::logic_error("EventSampler: measurement probabilities do not sum to 1");
        }
        double cum = 0.0;
        for (std::size_t k = 0; k < meas_len_[vi]; ++k) {
            cum += meas_[vi][k];
            meas_cdf_[vi][k] = cum;
        }
        meas_cdf_[vi][meas_len_[vi] - 1] = 1.0;
    }
}

std::span<const double> EventSampler::measurement_probs(PairBasis outcome) const {
    const int vi = static_cast<int>(outcome);
    return std::span<const double>(meas_[vi].data(), meas_len_[vi]);
}

EventRecord EventSampler::sample(std::uint64_t run_index, double u_outcome,
                                 double u_meas) const {
    EventRecord rec;
    rec.run_index = run_index;
    rec.t_m = t_m_;

    int slot = 0;
    while (slot < 5 && u_outcome >= outcome_cdf_[slot]) ++slot;

    if (slot >= 4) {
        rec.outcome = ProjectionOutcome::spoiled(slot == 4 ? first_source_
                                                           : second_source_);
        rec.retained = false;
        return rec;
    }

    const PairBasis v = static_cast<PairBasis>(slot);
    rec.outcome = ProjectionOutcome::projected(v);
    rec.retained = bob_retain(rec.outcome, policy_);

    const int vi = slot;
    std::size_t mk = 0;
    while (mk + 1 < meas_len_[vi] && u_meas >= meas_cdf_[vi][mk]) ++mk;
    if (!two_partners_) {
        rec.b_result = static_cast<MeasResult>(mk);
    } else {
        rec.d_result = kPairMeasOrder[mk].first;
        rec.b_result = kPairMeasOrder[mk].second;
    }
    return rec;
}

EventRecord sample_event(const EventSampler& sampler, std::uint64_t run_index,
                         std::uint64_t master_seed) {
    double u0 = 0.0;
    double u1 = 0.0;
    rng::event_uniforms(master_seed, run_index, 1, &u0, &u1);
    return sampler.sample(run_index, u0, u1);
}

std::vector<EventRecord> run_ensemble(const ProtocolSetup& setup, double t_m,
                                      std::uint64_t n_runs, std::uint64_t master_seed,
                                      unsigned n_workers, RetainPolicy policy) {
    const EventSampler sampler(setup, t_m, policy);

    if (n_workers == 0) {
        n_workers = std::max(1u, std::thread::hardware_concurrency());
    }
    n_workers = static_cast<unsigned>(
        std::min<std::uint64_t>(n_workers, std::max<std::uint64_t>(1, n_runs)));

    std::vector<EventRecord> records(n_runs);
    auto fill_range = [&](std::uint64_t begin, std::uint64_t end) {
        std::array<double, kUniformBatch> u0;
        std::array<double, kUniformBatch> u1;
        for (std::uint64_t at = begin; at < end;) {
            const std::size_t len =
                static_cast<std::size_t>(std::min<std::uint64_t>(kUniformBatch, end - at));
            rng::event_uniforms(master_seed, at, len, u0.data(), u1.data());
            for (std::size_t i = 0; i < len; ++i) {
                records[at + i] = sampler.sample(at + i, u0[i], u1[i]);
            }
            at += len;
        }
    };

    if (n_workers == 1) {
        fill_range(0, n_runs);
        return records;
    }

    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    const std::uint64_t chunk = (n_runs + n_workers - 1) / n_workers;
    for (unsigned w = 0; w < n_workers; ++w) {
        const std::uint64_t begin = std::min<std::uint64_t>(n_runs, w * chunk);
        const std::uint64_t end = std::min<std::uint64_t>(n_runs, begin + chunk);
        if (begin < end) pool.emplace_back(fill_range, begin, end);
    }
    for (std::thread& t : pool) t.join();
    return records;
}

std::size_t Subensembles::total() const {
    std::size_t n = spoiled.size();
    for (const auto& part : projected) n += part.size();
    return n;
}

Subensembles sort_subensembles(std::span<const EventRecord> events) {
    Subensembles out;
    for (const EventRecord& e : events) {
        if (e.outcome.is_spoiled()) {
            out.spoiled.push_back(e);
        } else {
            out.projected[static_cast<int>(e.outcome.basis())].push_back(e);
        }
    }
    return out;
}

ObservableEstimate estimate_xi(std::span<const EventRecord> events) {
    std::uint64_t n_k0 = 0;
    std::uint64_t n_k0bar = 0;
    double t_m = 0.0;
    for (const EventRecord& e : events) {
        t_m = e.t_m;
        if (e.b_result == MeasResult::K0) ++n_k0;
        else if (e.b_result == MeasResult::K0bar) ++n_k0bar;
    }
    ObservableEstimate est;
    est.n_used = n_k0 + n_k0bar;
    est.t_m = t_m;
    if (est.n_used == 0) {
        est.value = ObsValue::undefined();
        return est;
    }
    if (n_k0bar == 0) {
        est.value = ObsValue::infinite();
        return est;
    }
    const double n = static_cast<double>(est.n_used);
    const double frac = static_cast<double>(n_k0) / n;
    est.value = ObsValue::finite(frac / (1.0 - frac));
    // Binomial propagation of the K0 fraction through xi = f / (1 - f).
    est.stderr = std::sqrt(frac * (1.0 - frac) / n) / ((1.0 - frac) * (1.0 - frac));
    return est;
}

ObservableEstimate estimate_asymmetry(std::span<const EventRecord> events) {
    std::uint64_t n_diff = 0;
    std::uint64_t n_same = 0;
    double t_m = 0.0;
    for (const EventRecord& e : events) {
        t_m = e.t_m;
        const bool b_tagged =
            e.b_result == MeasResult::K0 || e.b_result == MeasResult::K0bar;
        const bool d_tagged =
            e.d_result == MeasResult::K0 || e.d_result == MeasResult::K0bar;
        if (!b_tagged || !d_tagged) continue;
        if (e.b_result == e.d_result) ++n_same;
        else ++n_diff;
    }
    ObservableEstimate est;
    est.n_used = n_diff + n_same;
    est.t_m = t_m;
    if (est.n_used == 0) {
        est.value = ObsValue::undefined();
        return est;
    }
    const double n = static_cast<double>(est.n_used);
    const double frac = static_cast<double>(n_diff) / n;
    est.value = ObsValue::finite(2.0 * frac - 1.0);
    est.stderr = 2.0 * std::sqrt(frac * (1.0 - frac) / n);
    return est;
}

}  // namespace kaonsim
