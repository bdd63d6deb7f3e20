#include "kaonsim/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

namespace kaonsim {

namespace {

std::string trim(const std::string& s) {
    const auto from = s.find_first_not_of(" \t\r");
    if (from == std::string::npos) return "";
    const auto to = s.find_last_not_of(" \t\r");
    return s.substr(from, to - from + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("config key '" + key + "': not a number: '" + value + "'");
    }
    if (!std::isfinite(out)) {
        throw ConfigError("config key '" + key + "': value must be finite");
    }
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("config key '" + key + "': not a non-negative integer: '" +
                          value + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + value +
                      "'");
}

// Pulls typed values out of the merged key set; whatever remains at the
// end is an unknown key.
class KeyReader {
  public:
    explicit KeyReader(KeyValues merged) : values_(std::move(merged)) {}

    double number(const std::string& key, double fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const double v = parse_double(key, it->second);
        values_.erase(it);
        return v;
    }

    double required_number(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) {
            throw ConfigError("config key '" + key + "' is required for this mode");
        }
        const double v = parse_double(key, it->second);
        values_.erase(it);
        return v;
    }

    std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const std::uint64_t v = parse_u64(key, it->second);
        values_.erase(it);
        return v;
    }

    std::uint64_t required_integer(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) {
            throw ConfigError("config key '" + key + "' is required for this mode");
        }
        const std::uint64_t v = parse_u64(key, it->second);
        values_.erase(it);
        return v;
    }

    std::string text(const std::string& key, const std::string& fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::string v = it->second;
        values_.erase(it);
        return v;
    }

    bool boolean(const std::string& key, bool fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const bool v = parse_bool(key, it->second);
        values_.erase(it);
        return v;
    }

    void reject_leftovers() const {
        if (values_.empty()) return;
        std::string msg = "unknown config key(s):";
        for (const auto& [k, v] : values_) msg += " '" + k + "'";
        throw ConfigError(msg);
    }

  private:
    KeyValues values_;
};

RetainPolicy parse_retain_policy(const std::string& text) {
    RetainPolicy policy;
    policy.keep = {false, false, false, false};
    if (text == "none") return policy;
    if (text == "all") return RetainPolicy::keep_all();
    std::stringstream ss(text);
    std::string item;
    bool any = false;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        bool matched = false;
        for (PairBasis v : kAllPairBases) {
            if (item == pair_basis_name(v)) {
                policy.keep[static_cast<int>(v)] = true;
                matched = true;
            }
        }
        if (!matched) {
            throw ConfigError("config key 'retain_policy': expected a comma list of "
                              "phi1..phi4, 'all' or 'none'; got '" + item + "'");
        }
        any = true;
    }
    if (!any) {
        throw ConfigError("config key 'retain_policy': empty value");
    }
    return policy;
}

std::string retain_policy_canonical(const RetainPolicy& p) {
    std::string out;
    for (PairBasis v : kAllPairBases) {
        if (!p.keep[static_cast<int>(v)]) continue;
        if (!out.empty()) out += ",";
        out += pair_basis_name(v);
    }
    return out.empty() ? "none" : out;
}

void check_unit(double norm, const char* what) {
    if (std::abs(norm - 1.0) > 1e-9) {
        throw ConfigError(std::string(what) +
                          " (normalization must hold to 1e-9; got norm^2 = " +
                          format_double_exact(norm) + ")");
    }
}

}  // namespace

const char* run_mode_name(RunMode m) {
    switch (m) {
        case RunMode::Teleport: return "teleport";
        case RunMode::Swap: return "swap";
        case RunMode::General: return "general";
        case RunMode::Verify: return "verify";
    }
    return "?";
}

RunMode run_mode_from_name(const std::string& name) {
    if (name == "teleport") return RunMode::Teleport;
    if (name == "swap") return RunMode::Swap;
    if (name == "general") return RunMode::General;
    if (name == "verify") return RunMode::Verify;
    throw ConfigError("unknown mode '" + name +
                      "' (expected teleport, swap, general or verify)");
}

KeyValues parse_key_values(const std::string& text, const std::string& source_name) {
    KeyValues out;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source_name + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(source_name + ":" + std::to_string(line_no) +
                              ": empty key or value");
        }
        if (out.count(key) != 0) {
            throw ConfigError(source_name + ":" + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
        }
        out[key] = value;
    }
    return out;
}

std::vector<double> RunConfig::measurement_grid() const {
    std::vector<double> grid;
    grid.reserve(t_m_steps);
    if (t_m_steps == 1) {
        grid.push_back(t_m_start);
        return grid;
    }
    const double step = (t_m_stop - t_m_start) / static_cast<double>(t_m_steps - 1);
    for (std::uint64_t i = 0; i < t_m_steps; ++i) {
        grid.push_back(t_m_start + step * static_cast<double>(i));
    }
    return grid;
}

ProtocolSetup RunConfig::to_setup() const {
    switch (mode) {
        case RunMode::Teleport:
            return ProtocolSetup{TeleportMode{alpha, beta}, kin, constants};
        case RunMode::Swap:
            return ProtocolSetup{SwapMode{}, kin, constants};
        case RunMode::General:
            return ProtocolSetup{GeneralMode{c1, w1, c2, w2}, kin, constants};
        case RunMode::Verify:
            break;
    }
    throw ConfigError("verify mode has no protocol setup");
}

std::string RunConfig::echo() const {
    std::ostringstream os;
    const auto num = [&](const char* key, double v) {
        os << key << " = " << format_double_exact(v) << "\n";
    };
    os << "mode = " << run_mode_name(mode) << "\n";
    num("gamma_l", constants.gamma_l);
    num("delta_m", constants.delta_m);
    num("epsilon_re", constants.epsilon.real());
    num("epsilon_im", constants.epsilon.imag());
    num("gamma_a", kin.gamma_a);
    num("gamma_b", kin.gamma_b);
    num("gamma_c", kin.gamma_c);
    num("gamma_d", kin.gamma_d);
    num("t_x", kin.t_x);
    num("t_z", kin.t_z);
    os << "time_convention = "
       << (kin.convention == TimeConvention::Paper ? "paper" : "standard") << "\n";
    num("alpha_re", alpha.real());
    num("alpha_im", alpha.imag());
    num("beta_re", beta.real());
    num("beta_im", beta.imag());
    num("c1_re", c1.real());
    num("c1_im", c1.imag());
    num("c2_re", c2.real());
    num("c2_im", c2.imag());
    num("w1_f_re", w1.f.real());
    num("w1_f_im", w1.f.imag());
    num("w1_g_re", w1.g.real());
    num("w1_g_im", w1.g.imag());
    num("w2_f_re", w2.f.real());
    num("w2_f_im", w2.f.imag());
    num("w2_g_re", w2.g.real());
    num("w2_g_im", w2.g.imag());
    num("t_m_start", t_m_start);
    num("t_m_stop", t_m_stop);
    os << "t_m_steps = " << t_m_steps << "\n";
    os << "n_runs = " << n_runs << "\n";
    os << "master_seed = " << master_seed << "\n";
    os << "workers = " << workers << "\n";
    os << "retain_policy = " << retain_policy_text << "\n";
    os << "out_dir = " << out_dir << "\n";
    os << "force = " << (force ? "true" : "false") << "\n";
    return os.str();
}

RunConfig build_run_config(RunMode mode, const KeyValues& file_values,
                           const KeyValues& overrides) {
    KeyValues merged = file_values;
    for (const auto& [k, v] : overrides) merged[k] = v;

    KeyReader keys(std::move(merged));

    RunConfig cfg;
    cfg.mode = mode;
    {
        const std::string file_mode = keys.text("mode", run_mode_name(mode));
        if (run_mode_from_name(file_mode) != mode) {
            throw ConfigError("config key 'mode' (" + file_mode +
                              ") does not match the requested mode '" +
                              std::string(run_mode_name(mode)) + "'");
        }
    }

    const bool is_run_mode = mode != RunMode::Verify;

    cfg.constants = constants_paper();
    cfg.constants.gamma_l = keys.number("gamma_l", cfg.constants.gamma_l);
    cfg.constants.delta_m = keys.number("delta_m", cfg.constants.delta_m);
    cfg.constants.epsilon = Complex{keys.number("epsilon_re", 0.0),
                                    keys.number("epsilon_im", 0.0)};

    cfg.kin.gamma_a = keys.number("gamma_a", 1.0);
    cfg.kin.gamma_b = keys.number("gamma_b", 1.0);
    cfg.kin.gamma_c = keys.number("gamma_c", 1.0);
    cfg.kin.gamma_d = keys.number("gamma_d", 1.0);
    cfg.kin.t_x = is_run_mode ? keys.required_number("t_x") : keys.number("t_x", 0.0);
    cfg.kin.t_z = keys.number("t_z", 0.0);
    {
        const std::string conv = keys.text("time_convention", "paper");
        if (conv == "paper") {
            cfg.kin.convention = TimeConvention::Paper;
        } else if (conv == "standard") {
            cfg.kin.convention = TimeConvention::Standard;
        } else {
            throw ConfigError("config key 'time_convention': expected 'paper' or "
                              "'standard', got '" + conv + "'");
        }
    }

    if (mode == RunMode::Teleport) {
        cfg.alpha = Complex{keys.required_number("alpha_re"),
                            keys.number("alpha_im", 0.0)};
        cfg.beta = Complex{keys.required_number("beta_re"), keys.number("beta_im", 0.0)};
        check_unit(std::norm(cfg.alpha) + std::norm(cfg.beta),
                   "config keys 'alpha_*'/'beta_*': |alpha|^2 + |beta|^2 must equal 1");
    } else {
        cfg.alpha = Complex{keys.number("alpha_re", 1.0), keys.number("alpha_im", 0.0)};
        cfg.beta = Complex{keys.number("beta_re", 0.0), keys.number("beta_im", 0.0)};
    }

    if (mode == RunMode::General) {
        cfg.c1 = Complex{keys.required_number("c1_re"), keys.number("c1_im", 0.0)};
        cfg.c2 = Complex{keys.required_number("c2_re"), keys.number("c2_im", 0.0)};
        cfg.w1 = SingleKaon{Complex{keys.required_number("w1_f_re"),
                                    keys.number("w1_f_im", 0.0)},
                            Complex{keys.required_number("w1_g_re"),
                                    keys.number("w1_g_im", 0.0)}};
        cfg.w2 = SingleKaon{Complex{keys.required_number("w2_f_re"),
                                    keys.number("w2_f_im", 0.0)},
                            Complex{keys.required_number("w2_g_re"),
                                    keys.number("w2_g_im", 0.0)}};
        check_unit(std::norm(cfg.c1) + std::norm(cfg.c2),
                   "config keys 'c1_*'/'c2_*': |c1|^2 + |c2|^2 must equal 1");
        check_unit(cfg.w1.survival(), "config keys 'w1_*': w1 must be normalized");
        check_unit(cfg.w2.survival(), "config keys 'w2_*': w2 must be normalized");
    } else {
        cfg.c1 = Complex{keys.number("c1_re", 1.0), keys.number("c1_im", 0.0)};
        cfg.c2 = Complex{keys.number("c2_re", 0.0), keys.number("c2_im", 0.0)};
        cfg.w1 = SingleKaon{Complex{keys.number("w1_f_re", 1.0), keys.number("w1_f_im", 0.0)},
                            Complex{keys.number("w1_g_re", 0.0), keys.number("w1_g_im", 0.0)}};
        cfg.w2 = SingleKaon{Complex{keys.number("w2_f_re", 1.0), keys.number("w2_f_im", 0.0)},
                            Complex{keys.number("w2_g_re", 0.0), keys.number("w2_g_im", 0.0)}};
    }

    cfg.t_m_start = keys.number("t_m_start", cfg.kin.t_x);
    cfg.t_m_stop = keys.number("t_m_stop", cfg.kin.t_x + 5.0);
    cfg.t_m_steps = keys.integer("t_m_steps", 5);

    cfg.n_runs = is_run_mode ? keys.required_integer("n_runs")
                             : keys.integer("n_runs", 0);
    cfg.master_seed = is_run_mode ? keys.required_integer("master_seed")
                                  : keys.integer("master_seed", 0);
    cfg.workers = static_cast<unsigned>(keys.integer("workers", 0));

    cfg.retain_policy_text = keys.text("retain_policy", "phi4");
    cfg.retain = parse_retain_policy(cfg.retain_policy_text);
    cfg.retain_policy_text = retain_policy_canonical(cfg.retain);

    cfg.out_dir = keys.text("out_dir", "out");
    cfg.force = keys.boolean("force", false);

    keys.reject_leftovers();

    // Physics-level validation, reported as config errors.
    try {
        cfg.constants.validate();
        cfg.kin.validate(mode == RunMode::Swap);
        if (is_run_mode) cfg.to_setup().validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }

    if (is_run_mode) {
        if (cfg.n_runs < 1) {
            throw ConfigError("config key 'n_runs': must be >= 1");
        }
        if (cfg.t_m_steps < 1) {
            throw ConfigError("config key 't_m_steps': must be >= 1");
        }
        if (cfg.t_m_start < cfg.kin.t_x) {
            throw ConfigError("config key 't_m_start': measurements start at or "
                              "after the collision time t_x");
        }
        if (cfg.t_m_stop < cfg.t_m_start) {
            throw ConfigError("config key 't_m_stop': must be >= t_m_start");
        }
        if (cfg.out_dir.empty()) {
            throw ConfigError("config key 'out_dir': must not be empty");
        }
    }
    return cfg;
}

RunConfig run_config_from_text(RunMode mode, const std::string& text,
                               const KeyValues& overrides) {
    return build_run_config(mode, parse_key_values(text, "config"), overrides);
}

std::string format_double_exact(double v) {
    std::array<char, 64> buf;
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string format_double_csv(double v) {
    std::array<char, 64> buf;
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                         std::chars_format::general, 12);
    return std::string(buf.data(), ptr);
}

}  // namespace kaonsim
