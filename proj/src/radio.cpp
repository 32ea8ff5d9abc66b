// SPDX-License-Identifier: Apache-2.0

#include "slsim/radio.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slsim {

namespace {

const McsEntry kMcsTable[] = {
    {4, 2, 308, 0.6016},
    {11, 4, 378, 1.4766},
    {19, 6, 517, 3.0293},
};

}  // namespace

std::span<const McsEntry> default_mcs_table() { return kMcsTable; }

const McsEntry& mcs_by_index(int index) {
    for (const auto& e : kMcsTable) {
        if (e.index == index) return e;
    }
    throw std::invalid_argument("unknown MCS index " + std::to_string(index));
}

int prb_count_for_mhz(int nominal_mhz) {
    switch (nominal_mhz) {
        case 20: return 51;
        case 40: return 106;
        case 60: return 162;
        case 80: return 217;
        case 100: return 273;
        default:
            throw std::invalid_argument("unsupported channel bandwidth " +
                                        std::to_string(nominal_mhz) + " MHz");
    }
}

Bandwidth Bandwidth::from_mhz(int nominal_mhz, int subchannel_size_prbs) {
    Bandwidth bw;
    bw.nominal_mhz = nominal_mhz;
    bw.prb_count = prb_count_for_mhz(nominal_mhz);
    bw.subchannel_size_prbs = subchannel_size_prbs;
    return bw;
}

BlerCurve BlerCurve::defaults() {
    BlerCurve c;
    c.set_logistic(4, 2.0, 0.8);
    c.set_logistic(11, 9.0, 0.8);
    c.set_logistic(19, 16.0, 0.8);
    return c;
}

void BlerCurve::set_logistic(int mcs_index, double midpoint_db, double slope_db) {
    if (slope_db <= 0.0) throw std::invalid_argument("logistic slope must be > 0");
    PerMcs& p = curves_[mcs_index];
    p.logistic = true;
    p.midpoint_db = midpoint_db;
    p.slope_db = slope_db;
    p.samples.clear();
}

void BlerCurve::add_sample(int mcs_index, double sinr_db, double bler) {
    if (bler < 0.0 || bler > 1.0) throw std::invalid_argument("bler sample outside [0,1]");
    PerMcs& p = curves_[mcs_index];
    if (p.logistic && !p.samples.empty()) {
        throw std::invalid_argument("mixed logistic/sample records for one MCS");
    }
    p.logistic = false;
    p.samples.emplace_back(sinr_db, bler);
    std::sort(p.samples.begin(), p.samples.end());
    for (std::size_t i = 1; i < p.samples.size(); ++i) {
        if (p.samples[i].second > p.samples[i - 1].second) {
            throw std::invalid_argument("bler samples must be non-increasing in SINR");
        }
    }
}

BlerCurve BlerCurve::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open BLER curve file: " + path);
    BlerCurve c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        int mcs = 0;
        double a = 0.0, b = 0.0;
        if (!(ls >> mcs >> a >> b)) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed record");
        }
        if (kind == "logistic") {
            c.set_logistic(mcs, a, b);
        } else if (kind == "sample") {
            c.add_sample(mcs, a, b);
        } else {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown record kind '" + kind + "'");
        }
    }
    return c;
}

bool BlerCurve::has(int mcs_index) const { return curves_.count(mcs_index) != 0; }

double BlerCurve::bler(int mcs_index, double sinr_db) const {
    const auto it = curves_.find(mcs_index);
    if (it == curves_.end()) {
        throw std::invalid_argument("no BLER curve for MCS " + std::to_string(mcs_index));
    }
    const PerMcs& p = it->second;
    double v;
    if (p.logistic) {
        v = 1.0 / (1.0 + std::exp((sinr_db - p.midpoint_db) / p.slope_db));
    } else {
        const auto& s = p.samples;
        if (sinr_db <= s.front().first) {
            v = s.front().second;
        } else if (sinr_db >= s.back().first) {
            v = s.back().second;
        } else {
            auto hi = std::upper_bound(s.begin(), s.end(), std::make_pair(sinr_db, 2.0));
            auto lo = hi - 1;
            const double t = (sinr_db - lo->first) / (hi->first - lo->first);
            v = lo->second + t * (hi->second - lo->second);
        }
    }
    return std::clamp(v, 0.0, 1.0);
}

double pathloss_db(double d_m, double fc_ghz) {
    if (d_m <= 0.0) throw std::domain_error("pathloss distance must be > 0");
    if (fc_ghz <= 0.0) throw std::domain_error("carrier frequency must be > 0");
    return 32.4 + 17.3 * std::log10(d_m) + 20.0 * std::log10(fc_ghz);
}

double received_power_dbm(const RadioParams& tx, double pathloss_db) {
    return tx.tx_power_dbm + tx.tx_gain_db + tx.rx_gain_db - tx.tx_rf_loss_db - tx.rx_rf_loss_db -
           pathloss_db;
}

double rsrp_dbm(const RadioParams& radio, const Position& tx, const Position& rx) {
    return received_power_dbm(radio, pathloss_db(distance_m(tx, rx), radio.carrier_freq_ghz));
}

double thermal_noise_dbm(double occupied_hz, double noise_figure_db) {
    return -174.0 + 10.0 * std::log10(occupied_hz) + noise_figure_db;
}

double noise_power_dbm(const Bandwidth& bw, const RadioParams& radio) {
    return thermal_noise_dbm(bw.occupied_hz(radio.scs_khz), radio.noise_figure_db);
}

double sinr_db(double wanted_dbm, std::span<const double> interferers_dbm, double noise_dbm) {
    double denom_mw = db_to_linear(noise_dbm);
    for (double i : interferers_dbm) denom_mw += db_to_linear(i);
    return wanted_dbm - linear_to_db(denom_mw);
}

long tb_capacity_bits(const McsEntry& mcs, const Bandwidth& bw, const RadioParams& radio) {
    const double bits = mcs.spectral_efficiency * bw.occupied_hz(radio.scs_khz) *
                        radio.slot_duration_s() * radio.capacity_overhead;
    return static_cast<long>(std::floor(bits));
}

double nominal_rate_mbps(const McsEntry& mcs, double nominal_bw_mhz) {
    return mcs.spectral_efficiency * nominal_bw_mhz;
}

const McsEntry& adapt_mcs(double predicted_sinr_db, const BlerCurve& curve, double target_bler,
                          std::span<const McsEntry> table) {
    if (table.empty()) throw std::invalid_argument("empty MCS table");
    const McsEntry* best = nullptr;
    for (const auto& e : table) {
        if (curve.bler(e.index, predicted_sinr_db) <= target_bler) {
            if (best == nullptr || e.spectral_efficiency > best->spectral_efficiency) best = &e;
        }
    }
    if (best != nullptr) return *best;
    // Poor link: lowest-index entry for robustness.
    const McsEntry* fallback = &table[0];
    for (const auto& e : table) {
        if (e.index < fallback->index) fallback = &e;
    }
    return *fallback;
}

}  // namespace slsim
