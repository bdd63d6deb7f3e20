#include "kaonsim/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace kaonsim {

namespace {

std::string obs_value_csv(const ObsValue& v) {
    if (v.is_infinite()) return "inf";
    if (v.is_undefined()) return "-";
    return format_double_csv(v.value());
}

// Exact per-subensemble value of what the estimator measures, from the
// sampler's measurement tables (needed for the general mode, where no
// closed form is printed; used for the mixture rows everywhere).
ObsValue exact_asym_from_tables(const EventSampler& sampler, const double* weights) {
    double diff = 0.0;
    double same = 0.0;
    for (PairBasis v : kAllPairBases) {
        const auto m = sampler.measurement_probs(v);
        const double w = weights == nullptr
                             ? 1.0
                             : weights[static_cast<int>(v)];
        if (m.size() < 9) continue;
        same += w * (m[0] + m[3]);
        diff += w * (m[1] + m[2]);
    }
    if (diff + same < 1e-300) return ObsValue::undefined();
    return ObsValue::finite((diff - same) / (diff + same));
}

ObsValue exact_asym_single(const EventSampler& sampler, PairBasis v) {
    const auto m = sampler.measurement_probs(v);
    if (m.size() < 9) return ObsValue::undefined();
    const double same = m[0] + m[3];
    const double diff = m[1] + m[2];
    if (diff + same < 1e-300) return ObsValue::undefined();
    return ObsValue::finite((diff - same) / (diff + same));
}

// 4-sigma agreement using the exact value to size the fluctuation band,
// so exact boundary values (A = +-1, xi = 0) demand exact agreement.
bool within_band_asym(double exact, const ObservableEstimate& est) {
    if (!est.value.is_finite() || est.n_used == 0) return est.n_used < 100;
    const double p = 0.5 * (1.0 + exact);
    const double sigma =
        2.0 * std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(est.n_used));
    return std::abs(est.value.value() - exact) <= 4.0 * sigma + 1e-12;
}

bool within_band_xi(const ObsValue& exact, const ObservableEstimate& est) {
    if (exact.is_infinite()) {
        return est.value.is_infinite() || est.n_used < 100;
    }
    if (!exact.is_finite()) return true;
    if (!est.value.is_finite() || est.n_used == 0) return est.n_used < 100;
    const double x = exact.value();
    const double f = x / (1.0 + x);
    const double sf = std::sqrt(std::max(0.0, f * (1.0 - f)) /
                                static_cast<double>(est.n_used));
    const double sigma = sf / ((1.0 - f) * (1.0 - f));
    return std::abs(est.value.value() - x) <= 4.0 * sigma + 1e-12;
}

struct ObservableRow {
    double t_m;
    std::string subensemble;
    ObsValue exact = ObsValue::undefined();
    ObsValue paper = ObsValue::undefined();
    ObservableEstimate est;
    bool has_paper = true;
};

}  // namespace

std::string event_csv_row(const EventRecord& e) {
    std::string row;
    row += std::to_string(e.run_index);
    row += ',';
    row += outcome_name(e.outcome);
    row += ',';
    row += e.retained ? '1' : '0';
    row += ',';
    row += meas_result_name(e.b_result);
    row += ',';
    row += meas_result_name(e.d_result);
    row += ',';
    row += format_double_csv(e.t_m);
    return row;
}

RunArtifacts execute_run(const RunConfig& cfg, std::ostream& events_csv) {
    const ProtocolSetup setup = cfg.to_setup();
    const Constants& c = cfg.constants;
    const Kinematics& kin = cfg.kin;
    const bool teleport = cfg.mode == RunMode::Teleport;
    const std::vector<double> grid = cfg.measurement_grid();

    events_csv << kEventsCsvHeader << '\n';

    // The collision outcome depends only on t_x and the per-event uniform,
    // so with a fixed seed every grid point reproduces the same outcome
    // sequence. Count outcomes once, from the first grid point.
    std::array<std::uint64_t, 4> outcome_counts{};
    std::uint64_t spoiled_count = 0;
    std::uint64_t total_events = 0;
    bool first_grid_point = true;

    std::vector<ObservableRow> rows;
    bool freq_check = true;
    bool estimate_check = true;

    TeleportCoeffs tc{};
    if (teleport) {
        tc = teleport_coeffs(cfg.alpha, cfg.beta, kin.t_x, kin, c);
    }

    for (const double t_m : grid) {
        const EventSampler sampler(setup, t_m, cfg.retain);
        const std::vector<EventRecord> events = run_ensemble(
            setup, t_m, cfg.n_runs, cfg.master_seed, cfg.workers, cfg.retain);
        for (const EventRecord& e : events) {
            events_csv << event_csv_row(e) << '\n';
        }
        const Subensembles sorted = sort_subensembles(events);
        if (first_grid_point) {
            for (PairBasis v : kAllPairBases) {
                outcome_counts[static_cast<int>(v)] += sorted.for_basis(v).size();
            }
            spoiled_count += sorted.spoiled.size();
            first_grid_point = false;
        }
        total_events += events.size();

        const double tau_b = kin.proper_time(t_m - kin.t_x, kin.gamma_b);
        const double tau_d = kin.proper_time(t_m - kin.t_x, kin.gamma_d);

        for (PairBasis v : kAllPairBases) {
            ObservableRow row;
            row.t_m = t_m;
            row.subensemble = pair_basis_name(v);
            row.est = teleport ? estimate_xi(sorted.for_basis(v))
                               : estimate_asymmetry(sorted.for_basis(v));
            row.est.t_m = t_m;
            if (teleport) {
                const double prob = projection_probs(tc)[static_cast<int>(v)];
                if (prob > 1e-30) {
                    const SingleKaon post = post_projection_b(tc, v);
                    row.exact = xi_exact(post.f, post.g, tau_b, c);
                    row.paper = xi_paper(post.f, post.g, tau_b, c);
                }
                estimate_check = estimate_check && within_band_xi(row.exact, row.est);
            } else if (cfg.mode == RunMode::Swap) {
                row.exact = asym_exact(swap_pair_amplitudes(v, tau_d, tau_b, c));
                row.paper = ObsValue::finite(asym_paper(v, tau_d, tau_b, c));
                if (row.exact.is_finite()) {
                    estimate_check =
                        estimate_check && within_band_asym(row.exact.value(), row.est);
                }
            } else {
                row.exact = exact_asym_single(sampler, v);
                row.has_paper = false;  // no printed form for the general input
                if (row.exact.is_finite()) {
                    estimate_check =
                        estimate_check && within_band_asym(row.exact.value(), row.est);
                }
            }
            rows.push_back(std::move(row));
        }

        ObservableRow all;
        all.t_m = t_m;
        all.subensemble = "all";
        if (teleport) {
            all.est = estimate_xi(events);
            all.exact = xi_unconditioned(tc, tau_b, c);
            all.paper = ObsValue::finite(1.0);
            estimate_check = estimate_check && within_band_xi(all.exact, all.est);
        } else {
            all.est = estimate_asymmetry(events);
            if (cfg.mode == RunMode::Swap) {
                all.exact = asym_unconditioned(tau_d, tau_b, c);
                all.paper = ObsValue::finite(0.0);
            } else {
                std::array<double, 4> weights = sampler.outcome_probs();
                all.exact = exact_asym_from_tables(sampler, weights.data());
                all.has_paper = false;
            }
            if (all.exact.is_finite()) {
                estimate_check =
                    estimate_check && within_band_asym(all.exact.value(), all.est);
            }
        }
        all.est.t_m = t_m;
        rows.push_back(std::move(all));
    }

    // Frequency self-check against the analytic outcome distribution.
    const EventSampler ref_sampler(setup, grid.front(), cfg.retain);
    const double n_total = static_cast<double>(cfg.n_runs);
    for (PairBasis v : kAllPairBases) {
        const double p = ref_sampler.outcome_probs()[static_cast<int>(v)];
        const double sigma = std::sqrt(n_total * p * (1.0 - p));
        freq_check = freq_check &&
                     std::abs(static_cast<double>(outcome_counts[static_cast<int>(v)]) -
                              n_total * p) <= 4.0 * sigma + 1e-9;
    }
    {
        const double p = ref_sampler.spoiled_prob();
        const double sigma = std::sqrt(n_total * p * (1.0 - p));
        freq_check = freq_check &&
                     std::abs(static_cast<double>(spoiled_count) - n_total * p) <=
                         4.0 * sigma + 1e-9;
    }

    // observables.csv
    std::ostringstream obs;
    obs << "t_m,subensemble," << (teleport ? "xi_exact" : "asym_exact")
        << ",paper_approx,mc_value,mc_stderr,n_used\n";
    for (const ObservableRow& row : rows) {
        obs << format_double_csv(row.t_m) << ',' << row.subensemble << ','
            << obs_value_csv(row.exact) << ','
            << (row.has_paper ? obs_value_csv(row.paper) : std::string("-")) << ','
            << obs_value_csv(row.est.value) << ','
            << (row.est.value.is_finite() ? format_double_csv(row.est.stderr)
                                          : std::string("-"))
            << ',' << row.est.n_used << '\n';
    }

    // summary.txt
    std::ostringstream sum;
    sum << "mode = " << run_mode_name(cfg.mode) << '\n';
    sum << "seed = " << cfg.master_seed << '\n';
    sum << "n_runs = " << cfg.n_runs << '\n';
    sum << "grid_points = " << grid.size() << '\n';
    sum << "events_total = " << total_events << '\n';
    for (PairBasis v : kAllPairBases) {
        const int i = static_cast<int>(v);
        sum << "prob_" << pair_basis_name(v)
            << "_analytic = " << format_double_csv(ref_sampler.outcome_probs()[i])
            << '\n';
        sum << "prob_" << pair_basis_name(v) << "_empirical = "
            << format_double_csv(static_cast<double>(outcome_counts[i]) / n_total)
            << '\n';
    }
    sum << "prob_spoiled_analytic = " << format_double_csv(ref_sampler.spoiled_prob())
        << '\n';
    sum << "prob_spoiled_empirical = "
        << format_double_csv(static_cast<double>(spoiled_count) / n_total) << '\n';
    for (PairBasis v : kAllPairBases) {
        sum << "fidelity_" << pair_basis_name(v) << " = ";
        try {
            sum << format_double_csv(teleport_fidelity(setup, v));
        } catch (const std::domain_error&) {
            sum << "-";
        }
        sum << '\n';
    }
    sum << "check.outcome_frequencies_4sigma = " << (freq_check ? "PASS" : "FAIL")
        << '\n';
    sum << "check.mc_estimates_4sigma = " << (estimate_check ? "PASS" : "FAIL")
        << '\n';
    std::istringstream echo(cfg.echo());
    std::string line;
    while (std::getline(echo, line)) {
        sum << "config." << line << '\n';
    }

    RunArtifacts out;
    out.observables_csv = obs.str();
    out.summary_txt = sum.str();
    out.self_checks_passed = freq_check && estimate_check;
    return out;
}

int run_and_write(const RunConfig& cfg, std::ostream& err) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.out_dir);
    std::error_code ec;
    if (fs::exists(dir, ec)) {
        if (!cfg.force) {
            err << "output directory '" << cfg.out_dir
                << "' already exists; pass --force to write into it\n";
            return kExitIoError;
        }
    } else {
        fs::create_directories(dir, ec);
        if (ec) {
            err << "cannot create output directory '" << cfg.out_dir
                << "': " << ec.message() << '\n';
            return kExitIoError;
        }
    }

    std::ofstream events(dir / "events.csv", std::ios::binary);
    if (!events) {
        err << "cannot open " << (dir / "events.csv").string() << " for writing\n";
        return kExitIoError;
    }
    RunArtifacts artifacts;
    try {
        artifacts = execute_run(cfg, events);
    } catch (const std::exception& e) {
        err << "run failed: " << e.what() << '\n';
        return kExitIoError;
    }
    events.close();
    if (!events) {
        err << "failed writing events.csv\n";
        return kExitIoError;
    }

    const auto write_file = [&](const char* name, const std::string& content) {
        std::ofstream f(dir / name, std::ios::binary);
        f << content;
        f.close();
        return static_cast<bool>(f);
    };
    if (!write_file("observables.csv", artifacts.observables_csv) ||
        !write_file("summary.txt", artifacts.summary_txt)) {
        err << "failed writing output files\n";
        return kExitIoError;
    }
    return kExitOk;
}

}  // namespace kaonsim
