// SPDX-License-Identifier: Apache-2.0

#include "slsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace slsim {

namespace {

std::string join_diags(const std::vector<ConfigDiag>& diags) {
    std::ostringstream os;
    os << "configuration error";
    for (const auto& d : diags) os << "\n  " << d.path << ": " << d.message;
    return os.str();
}

bool to_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool to_long(const std::string& s, long& out) {
    try {
        std::size_t pos = 0;
        out = std::stol(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool to_u64(const std::string& s, std::uint64_t& out) {
    try {
        std::size_t pos = 0;
        out = std::stoull(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool to_bool(const std::string& s, bool& out) {
    if (s == "true" || s == "1") {
        out = true;
        return true;
    }
    if (s == "false" || s == "0") {
        out = false;
        return true;
    }
    return false;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool divides_slot(double value_ms, double slot_ms) {
    const double q = value_ms / slot_ms;
    return std::abs(q - std::round(q)) < 1e-9;
}

class Parser {
public:
    explicit Parser(SimConfig& cfg) : cfg_(cfg) {}

    void apply(const std::string& section, const std::string& key, const std::string& value,
               std::vector<ConfigDiag>& diags) {
        const std::string path = section + "." + key;
        seen_.insert(path);
        if (!set_key(section, key, value, path, diags)) return;
    }

    void finalize() {
        // The delay budget follows the traffic interval unless set.
        if (seen_.count("traffic.interval_ms") != 0 && seen_.count("traffic.pdb_ms") == 0) {
            cfg_.traffic.pdb_ms = cfg_.traffic.interval_ms;
        }
    }

private:
    bool num(const std::string& v, const std::string& path, std::vector<ConfigDiag>& diags,
             double& out) {
        if (to_double(v, out)) return true;
        diags.push_back({path, "expected a number, got '" + v + "'"});
        return false;
    }
    bool inum(const std::string& v, const std::string& path, std::vector<ConfigDiag>& diags,
              long& out) {
        if (to_long(v, out)) return true;
        diags.push_back({path, "expected an integer, got '" + v + "'"});
        return false;
    }
    bool bnum(const std::string& v, const std::string& path, std::vector<ConfigDiag>& diags,
              bool& out) {
        if (to_bool(v, out)) return true;
        diags.push_back({path, "expected true/false, got '" + v + "'"});
        return false;
    }

    bool set_key(const std::string& section, const std::string& key, const std::string& v,
                 const std::string& path, std::vector<ConfigDiag>& diags) {
        double d = 0;
        long l = 0;
        bool b = false;
        std::uint64_t u = 0;

        if (section == "radio") {
            if (key == "carrier_freq_ghz") return num(v, path, diags, cfg_.radio.carrier_freq_ghz);
            if (key == "tx_power_dbm") return num(v, path, diags, cfg_.radio.tx_power_dbm);
            if (key == "tx_gain_db") return num(v, path, diags, cfg_.radio.tx_gain_db);
            if (key == "rx_gain_db") return num(v, path, diags, cfg_.radio.rx_gain_db);
            if (key == "tx_rf_loss_db") return num(v, path, diags, cfg_.radio.tx_rf_loss_db);
            if (key == "rx_rf_loss_db") return num(v, path, diags, cfg_.radio.rx_rf_loss_db);
            if (key == "noise_figure_db") return num(v, path, diags, cfg_.radio.noise_figure_db);
            if (key == "scs_khz") return num(v, path, diags, cfg_.radio.scs_khz);
            if (key == "capacity_overhead") return num(v, path, diags, cfg_.radio.capacity_overhead);
        } else if (section == "spectrum") {
            if (key == "bandwidth_mhz") {
                if (!inum(v, path, diags, l)) return false;
                cfg_.bandwidth_mhz = static_cast<int>(l);
                return true;
            }
            if (key == "subchannel_size_prbs") {
                if (!inum(v, path, diags, l)) return false;
                cfg_.subchannel_size_prbs = static_cast<int>(l);
                return true;
            }
            if (key == "prb_count") {
                if (!inum(v, path, diags, l)) return false;
                cfg_.prb_count = static_cast<int>(l);
                return true;
            }
        } else if (section == "link") {
            if (key == "bler_target") return num(v, path, diags, cfg_.link.bler_target);
            if (key == "bler_file") {
                cfg_.link.bler_file = v;
                return true;
            }
        } else if (section == "traffic") {
            if (key == "interval_ms") return num(v, path, diags, cfg_.traffic.interval_ms);
            if (key == "g2c_mbps") return num(v, path, diags, cfg_.traffic.g2c_mbps);
            if (key == "c2g_mbps") return num(v, path, diags, cfg_.traffic.c2g_mbps);
            if (key == "pdb_ms") return num(v, path, diags, cfg_.traffic.pdb_ms);
            if (key == "drop_policy") {
                if (v == "pdb_drop") {
                    cfg_.traffic.drop_policy = DropPolicy::pdb_drop;
                } else if (v == "queue_across_intervals") {
                    cfg_.traffic.drop_policy = DropPolicy::queue_across_intervals;
                } else {
                    diags.push_back({path, "expected pdb_drop or queue_across_intervals"});
                    return false;
                }
                return true;
            }
            if (key == "random_phase") {
                if (!bnum(v, path, diags, b)) return false;
                cfg_.traffic.random_phase = b;
                return true;
            }
        } else if (section == "mac") {
            if (key == "mode") {
                if (v == "mode2") {
                    cfg_.flags.mode = Mode::mode2;
                } else if (v == "mode1") {
                    cfg_.flags.mode = Mode::mode1_genie;
                } else {
                    diags.push_back({path, "expected mode2 or mode1"});
                    return false;
                }
                return true;
            }
            if (key == "mar") {
                if (!bnum(v, path, diags, b)) return false;
                cfg_.flags.mar_enabled = b;
                return true;
            }
            if (key == "fd") {
                if (!bnum(v, path, diags, b)) return false;
                cfg_.flags.fd_sensing = b;
                return true;
            }
            if (key == "sensing_window_ms") return num(v, path, diags, cfg_.mac.sensing_window_ms);
            if (key == "rsrp_threshold_dbm")
                return num(v, path, diags, cfg_.mac.rsrp_threshold_dbm);
            if (key == "rrc_min") {
                if (!inum(v, path, diags, l)) return false;
                cfg_.mac.rrc_min = static_cast<int>(l);
                return true;
            }
            if (key == "rrc_max") {
                if (!inum(v, path, diags, l)) return false;
                cfg_.mac.rrc_max = static_cast<int>(l);
                return true;
            }
            if (key == "p_change") return num(v, path, diags, cfg_.mac.p_change);
            if (key == "rri_ms") return num(v, path, diags, cfg_.mac.rri_ms);
            if (key == "selection_start_offset_slots") {
                if (!inum(v, path, diags, l)) return false;
                cfg_.mac.selection_start_offset_slots = l;
                return true;
            }
            if (key == "min_candidate_fraction")
                return num(v, path, diags, cfg_.mac.min_candidate_fraction);
            if (key == "threshold_step_db") return num(v, path, diags, cfg_.mac.threshold_step_db);
        } else if (section == "deployment") {
            if (key == "n_users") {
                if (!inum(v, path, diags, l)) return false;
                cfg_.deployment.n_users = static_cast<int>(l);
                return true;
            }
            if (key == "grid_side_m") return num(v, path, diags, cfg_.deployment.grid_side_m);
            if (key == "pair_dist_min_m")
                return num(v, path, diags, cfg_.deployment.pair_dist_min_m);
            if (key == "pair_dist_max_m")
                return num(v, path, diags, cfg_.deployment.pair_dist_max_m);
        } else if (section == "interference") {
            if (key == "x_percent") return num(v, path, diags, cfg_.interference_pct);
        } else if (section == "run") {
            if (key == "duration_s") return num(v, path, diags, cfg_.run.duration_s);
            if (key == "n_runs") {
                if (!inum(v, path, diags, l)) return false;
                cfg_.run.n_runs = static_cast<int>(l);
                return true;
            }
            if (key == "base_seed") {
                if (!to_u64(v, u)) {
                    diags.push_back({path, "expected an unsigned integer, got '" + v + "'"});
                    return false;
                }
                cfg_.run.base_seed = u;
                return true;
            }
            if (key == "threads") {
                if (!inum(v, path, diags, l)) return false;
                cfg_.run.threads = static_cast<int>(l);
                return true;
            }
        } else if (section == "metrics") {
            if (key == "thermal_fraction") return num(v, path, diags, cfg_.metrics.thermal_fraction);
            if (key == "class_a_ms") return num(v, path, diags, cfg_.metrics.class_a_ms);
            if (key == "class_b_ms") return num(v, path, diags, cfg_.metrics.class_b_ms);
            if (key == "class_c_ms") return num(v, path, diags, cfg_.metrics.class_c_ms);
        } else {
            diags.push_back({path, "unknown section [" + section + "]"});
            return false;
        }
        (void)d;
        diags.push_back({path, "unknown key"});
        return false;
    }

    SimConfig& cfg_;
    std::set<std::string> seen_;
};

}  // namespace

ConfigError::ConfigError(std::vector<ConfigDiag> diags)
    : std::runtime_error(join_diags(diags)), diags_(std::move(diags)) {}

Bandwidth SimConfig::bandwidth() const {
    Bandwidth bw;
    bw.nominal_mhz = bandwidth_mhz;
    bw.prb_count = prb_count > 0 ? prb_count : prb_count_for_mhz(bandwidth_mhz);
    bw.subchannel_size_prbs = subchannel_size_prbs;
    return bw;
}

BlerCurve SimConfig::bler_curve() const {
    return link.bler_file.empty() ? BlerCurve::defaults() : BlerCurve::load_file(link.bler_file);
}

SimConfig parse_config(const std::string& text, const std::string& origin) {
    SimConfig cfg;
    Parser parser(cfg);
    std::vector<ConfigDiag> diags;

    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                diags.push_back({origin + ":" + std::to_string(lineno), "malformed section header"});
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            diags.push_back({origin + ":" + std::to_string(lineno), "expected key = value"});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            diags.push_back({origin + ":" + std::to_string(lineno), "key outside any [section]"});
            continue;
        }
        parser.apply(section, key, value, diags);
    }
    parser.finalize();
    if (!diags.empty()) throw ConfigError(std::move(diags));
    validate_config(cfg);
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{path, "cannot open file"}});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

void validate_config(const SimConfig& cfg) {
    std::vector<ConfigDiag> diags;
    const auto bad = [&](const std::string& path, const std::string& msg) {
        diags.push_back({path, msg});
    };

    if (!(cfg.radio.carrier_freq_ghz > 0.0) || !std::isfinite(cfg.radio.carrier_freq_ghz)) {
        bad("radio.carrier_freq_ghz", "must be a positive frequency in GHz");
    }
    if (!std::isfinite(cfg.radio.tx_power_dbm)) bad("radio.tx_power_dbm", "must be finite");
    if (cfg.radio.scs_khz != 15.0 && cfg.radio.scs_khz != 30.0 && cfg.radio.scs_khz != 60.0) {
        bad("radio.scs_khz", "FR1 sidelink subcarrier spacing must be 15, 30 or 60 kHz");
    }
    if (!(cfg.radio.capacity_overhead > 0.0 && cfg.radio.capacity_overhead <= 1.0)) {
        bad("radio.capacity_overhead", "must be in (0, 1]");
    }
    if (cfg.radio.noise_figure_db < 0.0) bad("radio.noise_figure_db", "must be >= 0");

    const double slot_ms = cfg.radio.slot_duration_ms();

    bool bw_ok = true;
    if (cfg.bandwidth_mhz != 20 && cfg.bandwidth_mhz != 40 && cfg.bandwidth_mhz != 60 &&
        cfg.bandwidth_mhz != 80 && cfg.bandwidth_mhz != 100) {
        bad("spectrum.bandwidth_mhz", "must be one of 20/40/60/80/100");
        bw_ok = false;
    }
    if (cfg.prb_count < 0) {
        bad("spectrum.prb_count", "must be >= 0 (0 selects the standard table)");
        bw_ok = false;
    }
    if (cfg.subchannel_size_prbs < 1) {
        bad("spectrum.subchannel_size_prbs", "must be >= 1");
        bw_ok = false;
    }
    if (bw_ok) {
        const Bandwidth bw = cfg.bandwidth();
        if (bw.n_subchannels() < 1) {
            bad("spectrum.subchannel_size_prbs",
                "no whole subchannel fits in " + std::to_string(bw.prb_count) + " PRBs");
        } else if (bw.occupied_hz(cfg.radio.scs_khz) > cfg.bandwidth_mhz * 1e6) {
            bad("spectrum.prb_count", "occupied bandwidth exceeds the nominal channel");
        }
    }

    if (!(cfg.link.bler_target > 0.0 && cfg.link.bler_target <= 1.0)) {
        bad("link.bler_target", "must be in (0, 1]");
    }
    if (!cfg.link.bler_file.empty()) {
        try {
            const BlerCurve c = BlerCurve::load_file(cfg.link.bler_file);
            for (const auto& e : default_mcs_table()) {
                if (!c.has(e.index)) {
                    bad("link.bler_file",
                        "no curve for MCS " + std::to_string(e.index));
                }
            }
        } catch (const std::exception& e) {
            bad("link.bler_file", e.what());
        }
    }

    if (!(cfg.traffic.interval_ms > 0.0)) {
        bad("traffic.interval_ms", "must be > 0");
    } else if (!divides_slot(cfg.traffic.interval_ms, slot_ms)) {
        bad("traffic.interval_ms", "must be a whole number of slots");
    }
    if (cfg.traffic.g2c_mbps < 0.0) bad("traffic.g2c_mbps", "must be >= 0");
    if (cfg.traffic.c2g_mbps < 0.0) bad("traffic.c2g_mbps", "must be >= 0");
    if (!(cfg.traffic.pdb_ms > 0.0)) {
        bad("traffic.pdb_ms", "must be > 0");
    } else {
        if (!divides_slot(cfg.traffic.pdb_ms, slot_ms)) {
            bad("traffic.pdb_ms", "must be a whole number of slots");
        }
        if (cfg.traffic.drop_policy == DropPolicy::pdb_drop &&
            cfg.traffic.pdb_ms > cfg.traffic.interval_ms) {
            bad("traffic.pdb_ms", "must not exceed interval_ms under pdb_drop");
        }
    }

    if (!(cfg.mac.sensing_window_ms > 0.0)) {
        bad("mac.sensing_window_ms", "must be > 0");
    } else if (!divides_slot(cfg.mac.sensing_window_ms, slot_ms)) {
        bad("mac.sensing_window_ms", "must be a whole number of slots");
    }
    if (cfg.mac.rrc_min < 1 || cfg.mac.rrc_max < cfg.mac.rrc_min) {
        bad("mac.rrc_min", "need 1 <= rrc_min <= rrc_max");
    }
    if (!(cfg.mac.p_change >= 0.0 && cfg.mac.p_change <= 1.0)) {
        bad("mac.p_change", "must be in [0, 1]");
    }
    if (cfg.mac.rri_ms < 2.0) {
        bad("mac.rri_ms",
            "must be >= 2 ms: with 0.5 ms slots and half-duplex sensing, a 1 ms period leaves "
            "no slots to sense, so 2 ms is the minimum permissible reservation interval");
    } else if (!divides_slot(cfg.mac.rri_ms, slot_ms)) {
        bad("mac.rri_ms", "must be a whole number of slots");
    }
    if (cfg.mac.selection_start_offset_slots < 0) {
        bad("mac.selection_start_offset_slots", "must be >= 0");
    }
    if (!(cfg.mac.min_candidate_fraction > 0.0 && cfg.mac.min_candidate_fraction <= 1.0)) {
        bad("mac.min_candidate_fraction", "must be in (0, 1]");
    }
    if (!(cfg.mac.threshold_step_db > 0.0)) bad("mac.threshold_step_db", "must be > 0");

    if (cfg.flags.fd_sensing && cfg.flags.mode != Mode::mode2) {
        bad("mac.fd", "full-duplex sensing applies to mode2 only");
    }

    if (cfg.deployment.n_users < 1 || cfg.deployment.n_users > 20) {
        bad("deployment.n_users", "must be in [1, 20]");
    }
    if (!(cfg.deployment.grid_side_m > 0.0)) bad("deployment.grid_side_m", "must be > 0");
    if (!(cfg.deployment.pair_dist_min_m > 0.0) ||
        cfg.deployment.pair_dist_max_m < cfg.deployment.pair_dist_min_m) {
        bad("deployment.pair_dist_min_m", "need 0 < min <= max");
    } else if (cfg.deployment.pair_dist_max_m > cfg.deployment.grid_side_m) {
        bad("deployment.pair_dist_max_m", "must fit inside the grid");
    }

    if (!(cfg.interference_pct >= 0.0 && cfg.interference_pct <= 100.0)) {
        bad("interference.x_percent", "must be in [0, 100]");
    }

    if (!(cfg.run.duration_s > 0.0)) bad("run.duration_s", "must be > 0");
    if (cfg.run.n_runs < 1) bad("run.n_runs", "must be >= 1");
    if (cfg.run.threads < 0) bad("run.threads", "must be >= 0 (0 = auto)");

    if (!(cfg.metrics.thermal_fraction > 0.0 && cfg.metrics.thermal_fraction <= 1.0)) {
        bad("metrics.thermal_fraction", "must be in (0, 1]");
    }
    if (!(cfg.metrics.class_a_ms > 0.0 && cfg.metrics.class_a_ms <= cfg.metrics.class_b_ms &&
          cfg.metrics.class_b_ms <= cfg.metrics.class_c_ms)) {
        bad("metrics.class_a_ms", "need 0 < class_a_ms <= class_b_ms <= class_c_ms");
    }

    if (!diags.empty()) throw ConfigError(std::move(diags));
}

std::string emit_config(const SimConfig& c) {
    std::ostringstream os;
    os << "[radio]\n";
    os << "carrier_freq_ghz = " << fmt_double(c.radio.carrier_freq_ghz) << "\n";
    os << "tx_power_dbm = " << fmt_double(c.radio.tx_power_dbm) << "\n";
    os << "tx_gain_db = " << fmt_double(c.radio.tx_gain_db) << "\n";
    os << "rx_gain_db = " << fmt_double(c.radio.rx_gain_db) << "\n";
    os << "tx_rf_loss_db = " << fmt_double(c.radio.tx_rf_loss_db) << "\n";
    os << "rx_rf_loss_db = " << fmt_double(c.radio.rx_rf_loss_db) << "\n";
    os << "noise_figure_db = " << fmt_double(c.radio.noise_figure_db) << "\n";
    os << "scs_khz = " << fmt_double(c.radio.scs_khz) << "\n";
    os << "capacity_overhead = " << fmt_double(c.radio.capacity_overhead) << "\n";
    os << "\n[spectrum]\n";
    os << "bandwidth_mhz = " << c.bandwidth_mhz << "\n";
    os << "subchannel_size_prbs = " << c.subchannel_size_prbs << "\n";
    os << "prb_count = " << c.prb_count << "\n";
    os << "\n[link]\n";
    os << "bler_target = " << fmt_double(c.link.bler_target) << "\n";
    if (!c.link.bler_file.empty()) os << "bler_file = " << c.link.bler_file << "\n";
    os << "\n[traffic]\n";
    os << "interval_ms = " << fmt_double(c.traffic.interval_ms) << "\n";
    os << "g2c_mbps = " << fmt_double(c.traffic.g2c_mbps) << "\n";
    os << "c2g_mbps = " << fmt_double(c.traffic.c2g_mbps) << "\n";
    os << "pdb_ms = " << fmt_double(c.traffic.pdb_ms) << "\n";
    os << "drop_policy = "
       << (c.traffic.drop_policy == DropPolicy::pdb_drop ? "pdb_drop" : "queue_across_intervals")
       << "\n";
    os << "random_phase = " << (c.traffic.random_phase ? "true" : "false") << "\n";
    os << "\n[mac]\n";
    os << "mode = " << (c.flags.mode == Mode::mode2 ? "mode2" : "mode1") << "\n";
    os << "mar = " << (c.flags.mar_enabled ? "true" : "false") << "\n";
    os << "fd = " << (c.flags.fd_sensing ? "true" : "false") << "\n";
    os << "sensing_window_ms = " << fmt_double(c.mac.sensing_window_ms) << "\n";
    os << "rsrp_threshold_dbm = " << fmt_double(c.mac.rsrp_threshold_dbm) << "\n";
    os << "rrc_min = " << c.mac.rrc_min << "\n";
    os << "rrc_max = " << c.mac.rrc_max << "\n";
    os << "p_change = " << fmt_double(c.mac.p_change) << "\n";
    os << "rri_ms = " << fmt_double(c.mac.rri_ms) << "\n";
    os << "selection_start_offset_slots = " << c.mac.selection_start_offset_slots << "\n";
    os << "min_candidate_fraction = " << fmt_double(c.mac.min_candidate_fraction) << "\n";
    os << "threshold_step_db = " << fmt_double(c.mac.threshold_step_db) << "\n";
    os << "\n[deployment]\n";
    os << "n_users = " << c.deployment.n_users << "\n";
    os << "grid_side_m = " << fmt_double(c.deployment.grid_side_m) << "\n";
    os << "pair_dist_min_m = " << fmt_double(c.deployment.pair_dist_min_m) << "\n";
    os << "pair_dist_max_m = " << fmt_double(c.deployment.pair_dist_max_m) << "\n";
    os << "\n[interference]\n";
    os << "x_percent = " << fmt_double(c.interference_pct) << "\n";
    os << "\n[run]\n";
    os << "duration_s = " << fmt_double(c.run.duration_s) << "\n";
    os << "n_runs = " << c.run.n_runs << "\n";
    os << "base_seed = " << c.run.base_seed << "\n";
    os << "threads = " << c.run.threads << "\n";
    os << "\n[metrics]\n";
    os << "thermal_fraction = " << fmt_double(c.metrics.thermal_fraction) << "\n";
    os << "class_a_ms = " << fmt_double(c.metrics.class_a_ms) << "\n";
    os << "class_b_ms = " << fmt_double(c.metrics.class_b_ms) << "\n";
    os << "class_c_ms = " << fmt_double(c.metrics.class_c_ms) << "\n";
    return os.str();
}

}  // namespace slsim
