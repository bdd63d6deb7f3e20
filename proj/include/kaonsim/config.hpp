// config.hpp
// Run configuration: flat key = value files with '#' comments, merged with
// command-line overrides. Unknown keys, malformed numbers and physically
// inconsistent inputs are reported as ConfigError with the offending key
// in the message.

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kaonsim/montecarlo.hpp"
#include "kaonsim/protocols.hpp"

namespace kaonsim {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class RunMode { Teleport, Swap, General, Verify };

const char* run_mode_name(RunMode m);
RunMode run_mode_from_name(const std::string& name);  // throws ConfigError

using KeyValues = std::map<std::string, std::string>;

// Parse 'key = value' lines; '#' starts a comment. Duplicate keys are
// rejected. source_name is used in error messages.
KeyValues parse_key_values(const std::string& text, const std::string& source_name);

struct RunConfig {
    RunMode mode = RunMode::Verify;

    Constants constants;
    Kinematics kin;

    Complex alpha{1.0, 0.0};  // teleport input
    Complex beta{0.0, 0.0};

    Complex c1{1.0, 0.0};  // general input
    Complex c2{0.0, 0.0};
    SingleKaon w1{Complex{1.0}, Complex{0.0}};
    SingleKaon w2{Complex{1.0}, Complex{0.0}};

    double t_m_start = 0.0;
    double t_m_stop = 0.0;
    std::uint64_t t_m_steps = 5;

    std::uint64_t n_runs = 0;
    std::uint64_t master_seed = 0;
    unsigned workers = 0;  // 0 = hardware concurrency

    RetainPolicy retain = RetainPolicy::default_policy();
    std::string retain_policy_text = "phi4";

    std::string out_dir = "out";
    bool force = false;

    // Lab-frame measurement times of the configured grid.
    std::vector<double> measurement_grid() const;

    ProtocolSetup to_setup() const;  // throws ConfigError for verify mode

    // Canonical 'key = value' text that re-parses to this configuration.
    std::string echo() const;
};

// Build and validate a RunConfig for the given mode. file_values come from
// the config file (may be empty), overrides from command-line flags; an
// override wins over the file value for the same key.
RunConfig build_run_config(RunMode mode, const KeyValues& file_values,
                           const KeyValues& overrides);

// Convenience: parse + merge + build from raw config-file text.
RunConfig run_config_from_text(RunMode mode, const std::string& text,
                               const KeyValues& overrides = {});

// Locale-independent numeric formatting: shortest round-trip form and the
// fixed 12-significant-digit form used in CSV output.
std::string format_double_exact(double v);
std::string format_double_csv(double v);

}  // namespace kaonsim
