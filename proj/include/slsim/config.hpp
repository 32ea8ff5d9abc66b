// SPDX-License-Identifier: Apache-2.0

#ifndef SLSIM_CONFIG_HPP
#define SLSIM_CONFIG_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "slsim/engine.hpp"
#include "slsim/mac.hpp"
#include "slsim/metrics.hpp"
#include "slsim/radio.hpp"
#include "slsim/traffic.hpp"

namespace slsim {

struct ConfigDiag {
    std::string path;  // section.key, or "<file>" for file-level problems
    std::string message;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigDiag> diags);
    const std::vector<ConfigDiag>& diagnostics() const { return diags_; }

private:
    std::vector<ConfigDiag> diags_;
};

struct SimConfig {
    RadioParams radio;
    int bandwidth_mhz = 100;
    int subchannel_size_prbs = 15;
    int prb_count = 0;  // 0 = standard table for the nominal bandwidth
    LinkParams link;
    TrafficConfig traffic;
    Mode2Params mac;
    ModeFlags flags;
    DeploymentParams deployment;
    double interference_pct = 0.0;
    RunParams run;
    MetricsThresholds metrics;

    Bandwidth bandwidth() const;
    BlerCurve bler_curve() const;
    double slot_ms() const { return radio.slot_duration_ms(); }

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

// Sectioned key/value text:
//   lines of `key = value` grouped under `[section]` headers, `#` comments.
// Unknown sections or keys are rejected; omitted keys keep their defaults
// (pdb_ms follows interval_ms unless set). All invariants are checked and
// every violation is reported with its section.key path.
SimConfig parse_config(const std::string& text, const std::string& origin);
SimConfig load_config(const std::string& path);

// Canonical text form; load_config(emit_config(c)) == c.
std::string emit_config(const SimConfig& cfg);

// Full invariant check, collecting every violation.
void validate_config(const SimConfig& cfg);

}  // namespace slsim

#endif
