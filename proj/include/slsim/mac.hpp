// SPDX-License-Identifier: Apache-2.0

#ifndef SLSIM_MAC_HPP
#define SLSIM_MAC_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slsim/rng.hpp"

namespace slsim {

enum class Mode : int { mode2, mode1_genie };

struct ModeFlags {
    Mode mode = Mode::mode2;
    bool mar_enabled = false;
    bool fd_sensing = false;  // meaningful under mode2 only

    friend bool operator==(const ModeFlags&, const ModeFlags&) = default;
};

struct Mode2Params {
    double sensing_window_ms = 100.0;
    double rsrp_threshold_dbm = -96.0;
    int rrc_min = 25;
    int rrc_max = 75;
    double p_change = 0.5;
    double rri_ms = 2.0;  // 2 ms floor: shorter periods collapse under half-duplex sensing
    long selection_start_offset_slots = 2;
    double min_candidate_fraction = 0.2;
    double threshold_step_db = 3.0;

    long sensing_window_slots(double slot_ms) const {
        return static_cast<long>(sensing_window_ms / slot_ms + 0.5);
    }
    long rri_slots(double slot_ms) const { return static_cast<long>(rri_ms / slot_ms + 0.5); }

    friend bool operator==(const Mode2Params&, const Mode2Params&) = default;
};

// A recurring claim on the grid: every anchor slot repeats with period
// rri_slots until the re-selection counter runs out. Baseline reservations
// hold a single anchor; batches hold several (consecutive when placement
// succeeds). Reservations always span all subchannels; subchannel_span is
// kept for partial-band extensions.
struct Reservation {
    int owner = -1;
    std::vector<long> anchors;
    long rri_slots = 4;
    int remaining = 0;
    int subchannel_span = 0;

    bool is_opportunity(long t) const {
        for (long a : anchors) {
            if (t >= a && (t - a) % rri_slots == 0) return true;
        }
        return false;
    }
    // True when t closes one full period (the last anchor's occurrence).
    bool period_ends_at(long t) const {
        const long a = anchors.back();
        return t >= a && (t - a) % rri_slots == 0;
    }
};

// One decoded first-stage control message in a sensing ledger: who was
// heard, when, at what power, and the periodic claim it advertised.
struct SciRecord {
    int sender = -1;
    long heard_slot = 0;
    std::vector<long> reserved_slots;  // advertised absolute slots
    long rri_slots = 4;
    double rsrp_dbm = 0.0;
};

// Append-only ledger with windowed eviction; records arrive in slot order.
class SensingLedger {
public:
    void add(SciRecord rec) { recs_.push_back(std::move(rec)); }

    void evict_heard_before(long slot) {
        while (start_ < recs_.size() && recs_[start_].heard_slot < slot) ++start_;
        if (start_ > 4096 && start_ * 2 > recs_.size()) {
            recs_.erase(recs_.begin(), recs_.begin() + static_cast<long>(start_));
            start_ = 0;
        }
    }

    std::span<const SciRecord> records() const {
        return {recs_.data() + start_, recs_.size() - start_};
    }
    void clear() {
        recs_.clear();
        start_ = 0;
    }

private:
    std::vector<SciRecord> recs_;
    std::size_t start_ = 0;
};

// A slot in [win_begin, win_end] is excluded when some record above the
// RSRP threshold projects a reservation onto it (advertised slots advanced
// by whole periods). When fewer than min_candidate_fraction of the window
// survives, the threshold is raised by threshold_step_db and the exclusion
// recomputed until enough candidates remain.
struct ExclusionResult {
    std::vector<long> excluded;    // ascending
    std::vector<long> candidates;  // ascending complement within the window
    double final_threshold_dbm = 0.0;
    int relaxation_steps = 0;
};

ExclusionResult excluded_slots(std::span<const SciRecord> records, long win_begin, long win_end,
                               const Mode2Params& params);

// Expected SINR over a prospective set of slots: own link power against the
// summed linear RSRP of every record projecting onto any of them, plus noise.
double predict_sinr_db(double own_rx_dbm, std::span<const SciRecord> records,
                       std::span<const long> selected_slots, double noise_dbm);

struct SelectionParams {
    long rri_slots = 4;
    int rrc_min = 25;
    int rrc_max = 75;
};

// Baseline: one uniformly random candidate. Batched (batch > 1): the
// earliest run of `batch` consecutive candidates, falling back to the
// earliest candidates when no full run exists. Empty candidates fail.
std::optional<Reservation> select_resource(std::span<const long> candidates, Rng& rng,
                                           const SelectionParams& params, int batch, int owner);

enum class ExpiryAction : int { keep, reselect };

// At counter exhaustion: re-select with probability p_change, otherwise
// keep the same slots for a fresh counter draw.
ExpiryAction on_reservation_expiry(Reservation& res, Rng& rng, const Mode2Params& params);

}  // namespace slsim

#endif
