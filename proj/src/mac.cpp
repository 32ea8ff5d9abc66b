// SPDX-License-Identifier: Apache-2.0

#include "slsim/mac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slsim/radio.hpp"

namespace slsim {

namespace {

// Marks every projection of one record onto the window, keeping the
// strongest RSRP seen per slot.
void project_record(const SciRecord& rec, long win_begin, long win_end,
                    std::vector<double>& slot_max_rsrp) {
    for (long a : rec.reserved_slots) {
        long s = a;
        if (win_begin > a) {
            const long k = (win_begin - a + rec.rri_slots - 1) / rec.rri_slots;
            s = a + k * rec.rri_slots;
        }
        for (; s <= win_end; s += rec.rri_slots) {
            double& m = slot_max_rsrp[static_cast<std::size_t>(s - win_begin)];
            if (rec.rsrp_dbm > m) m = rec.rsrp_dbm;
        }
    }
}

}  // namespace

ExclusionResult excluded_slots(std::span<const SciRecord> records, long win_begin, long win_end,
                               const Mode2Params& params) {
    if (win_end < win_begin) throw std::invalid_argument("empty selection window");
    const std::size_t wlen = static_cast<std::size_t>(win_end - win_begin + 1);

    std::vector<double> slot_max(wlen, -std::numeric_limits<double>::infinity());
    for (const auto& rec : records) project_record(rec, win_begin, win_end, slot_max);

    ExclusionResult out;
    out.final_threshold_dbm = params.rsrp_threshold_dbm;
    while (true) {
        std::size_t n_cand = 0;
        for (double m : slot_max) {
            if (!(m > out.final_threshold_dbm)) ++n_cand;
        }
        if (static_cast<double>(n_cand) >=
            params.min_candidate_fraction * static_cast<double>(wlen)) {
            break;
        }
        out.final_threshold_dbm += params.threshold_step_db;
        ++out.relaxation_steps;
    }

    for (std::size_t i = 0; i < wlen; ++i) {
        const long s = win_begin + static_cast<long>(i);
        if (slot_max[i] > out.final_threshold_dbm) {
            out.excluded.push_back(s);
        } else {
            out.candidates.push_back(s);
        }
    }
    return out;
}

double predict_sinr_db(double own_rx_dbm, std::span<const SciRecord> records,
                       std::span<const long> selected_slots, double noise_dbm) {
    double denom_mw = db_to_linear(noise_dbm);
    for (const auto& rec : records) {
        bool projects = false;
        for (long s : selected_slots) {
            for (long a : rec.reserved_slots) {
                if (s >= a && (s - a) % rec.rri_slots == 0) {
                    projects = true;
                    break;
                }
            }
            if (projects) break;
        }
        if (projects) denom_mw += db_to_linear(rec.rsrp_dbm);
    }
    return own_rx_dbm - linear_to_db(denom_mw);
}

std::optional<Reservation> select_resource(std::span<const long> candidates, Rng& rng,
                                           const SelectionParams& params, int batch, int owner) {
    if (candidates.empty()) return std::nullopt;

    Reservation res;
    res.owner = owner;
    res.rri_slots = params.rri_slots;

    if (batch <= 1) {
        res.anchors.push_back(candidates[rng.below(candidates.size())]);
    } else {
        const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(batch),
                                                       candidates.size());
        // Earliest run of `want` consecutive slots.
        std::size_t run_start = 0;
        bool found = false;
        for (std::size_t i = 0; i + want <= candidates.size() && !found; ++i) {
            if (candidates[i + want - 1] - candidates[i] == static_cast<long>(want) - 1) {
                run_start = i;
                found = true;
            }
        }
        if (found) {
            res.anchors.assign(candidates.begin() + static_cast<long>(run_start),
                               candidates.begin() + static_cast<long>(run_start + want));
        } else {
            res.anchors.assign(candidates.begin(), candidates.begin() + static_cast<long>(want));
        }
    }
    res.remaining = static_cast<int>(rng.uniform_int(params.rrc_min, params.rrc_max));
    return res;
}

ExpiryAction on_reservation_expiry(Reservation& res, Rng& rng, const Mode2Params& params) {
    if (rng.bernoulli(params.p_change)) return ExpiryAction::reselect;
    res.remaining = static_cast<int>(rng.uniform_int(params.rrc_min, params.rrc_max));
    return ExpiryAction::keep;
}

}  // namespace slsim
