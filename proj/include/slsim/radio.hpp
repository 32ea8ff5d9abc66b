// SPDX-License-Identifier: Apache-2.0

#ifndef SLSIM_RADIO_HPP
#define SLSIM_RADIO_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace slsim {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

inline double distance_m(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

struct RadioParams {
    double carrier_freq_ghz = 6.0;
    double tx_power_dbm = 14.0;
    double tx_gain_db = 0.0;
    double rx_gain_db = 0.0;
    double tx_rf_loss_db = 0.0;
    double rx_rf_loss_db = 0.0;
    double noise_figure_db = 9.0;
    double scs_khz = 30.0;
    // Uniform scaling on per-slot payload for control/DMRS symbols, 1.0 = none.
    double capacity_overhead = 1.0;

    // Scalable numerology: 30 kHz SCS gives 0.5 ms slots.
    double slot_duration_ms() const { return 15.0 / scs_khz; }
    double slot_duration_s() const { return slot_duration_ms() * 1e-3; }

    friend bool operator==(const RadioParams&, const RadioParams&) = default;
};

struct McsEntry {
    int index = 0;
    int modulation_order = 0;
    int code_rate_x1024 = 0;
    double spectral_efficiency = 0.0;  // bits/s/Hz
};

// The three representative rows of the 38.214 MCS table used here.
std::span<const McsEntry> default_mcs_table();
const McsEntry& mcs_by_index(int index);

// PRBs available per nominal channel bandwidth at 30 kHz SCS (38.101-1).
int prb_count_for_mhz(int nominal_mhz);

struct Bandwidth {
    int nominal_mhz = 100;
    int prb_count = 273;
    int subchannel_size_prbs = 15;

    int n_subchannels() const { return prb_count / subchannel_size_prbs; }
    double occupied_hz(double scs_khz) const {
        return static_cast<double>(n_subchannels()) * subchannel_size_prbs * 12.0 * scs_khz * 1e3;
    }

    static Bandwidth from_mhz(int nominal_mhz, int subchannel_size_prbs = 15);
};

// SINR -> BLER mapping, per MCS. Each MCS carries either a logistic curve
// (midpoint where BLER = 0.5, slope = logistic width in dB) or a sampled
// table with linear interpolation, loadable from a text file so published
// link-abstraction data can be substituted for the shipped defaults.
class BlerCurve {
public:
    // Logistic (midpoint, slope) of (2, 0.8), (9, 0.8), (16, 0.8) dB for
    // MCS 4/11/19. Calibration defaults, not measured ground truth.
    static BlerCurve defaults();

    // File schema, one record per line, '#' starts a comment:
    //   logistic <mcs_index> <midpoint_db> <slope_db>
    //   sample   <mcs_index> <sinr_db> <bler>
    static BlerCurve load_file(const std::string& path);

    void set_logistic(int mcs_index, double midpoint_db, double slope_db);
    void add_sample(int mcs_index, double sinr_db, double bler);

    bool has(int mcs_index) const;
    double bler(int mcs_index, double sinr_db) const;

private:
    struct PerMcs {
        bool logistic = true;
        double midpoint_db = 0.0;
        double slope_db = 1.0;
        std::vector<std::pair<double, double>> samples;  // (sinr, bler), sorted
    };
    std::map<int, PerMcs> curves_;
};

// 38.901 indoor-office LOS pathloss, d in meters, fc in GHz.
double pathloss_db(double d_m, double fc_ghz);

// Link budget in the dB domain; losses are entered as positive dB.
double received_power_dbm(const RadioParams& tx, double pathloss_db);

// Received power between two positions under the given radio parameters.
double rsrp_dbm(const RadioParams& radio, const Position& tx, const Position& rx);

// Thermal noise over an occupied bandwidth plus receiver noise figure.
double thermal_noise_dbm(double occupied_hz, double noise_figure_db);
double noise_power_dbm(const Bandwidth& bw, const RadioParams& radio);

double sinr_db(double wanted_dbm, std::span<const double> interferers_dbm, double noise_dbm);

// Per-slot payload of a full-bandwidth transmission.
long tb_capacity_bits(const McsEntry& mcs, const Bandwidth& bw, const RadioParams& radio);

// Table convention: spectral efficiency times the nominal channel bandwidth.
double nominal_rate_mbps(const McsEntry& mcs, double nominal_bw_mhz);

// Highest-efficiency MCS meeting the BLER target at the predicted SINR;
// falls back to the lowest-index entry when none qualifies.
const McsEntry& adapt_mcs(double predicted_sinr_db, const BlerCurve& curve, double target_bler,
                          std::span<const McsEntry> table);

}  // namespace slsim

#endif
