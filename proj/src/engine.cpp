// SPDX-License-Identifier: Apache-2.0

#include "slsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <optional>
#include <thread>

#include "slsim/config.hpp"

namespace slsim {

namespace {

// Stream tags for per-run seed splitting.
constexpr std::uint64_t kTagDeployment = 0x6465706c6f79ULL;
constexpr std::uint64_t kTagTraffic = 0x74726166666963ULL;
constexpr std::uint64_t kTagMac = 0x6d6163ULL;
constexpr std::uint64_t kTagCoin = 0x636f696eULL;
constexpr std::uint64_t kTagInterference = 0x65787465726eULL;

}  // namespace

Deployment sample_deployment(Rng& rng, const DeploymentParams& params) {
    Deployment d;
    d.grid_side_m = params.grid_side_m;
    d.pairs.reserve(static_cast<std::size_t>(params.n_users));
    for (int i = 0; i < params.n_users; ++i) {
        UserPair p;
        p.companion.x = rng.uniform(0.0, params.grid_side_m);
        p.companion.y = rng.uniform(0.0, params.grid_side_m);
        while (true) {
            const double dist = rng.uniform(params.pair_dist_min_m, params.pair_dist_max_m);
            const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double gx = p.companion.x + dist * std::cos(ang);
            const double gy = p.companion.y + dist * std::sin(ang);
            if (gx >= 0.0 && gx <= params.grid_side_m && gy >= 0.0 && gy <= params.grid_side_m) {
                p.glasses = {gx, gy};
                p.orientation_rad = ang;
                break;
            }
        }
        d.pairs.push_back(p);
    }
    return d;
}

void resolve_reception(std::span<SlotTx> txs, const RadioParams& radio, double noise_dbm,
                       const BlerCurve& curve, Rng& coin) {
    std::vector<double> interferers;
    for (std::size_t i = 0; i < txs.size(); ++i) {
        SlotTx& tx = txs[i];
        const double wanted = rsrp_dbm(radio, tx.tx_pos, tx.rx_pos);
        interferers.clear();
        for (std::size_t j = 0; j < txs.size(); ++j) {
            if (j == i) continue;
            interferers.push_back(rsrp_dbm(radio, txs[j].tx_pos, tx.rx_pos));
        }
        tx.sinr_db = sinr_db(wanted, interferers, noise_dbm);
        tx.bler = curve.bler(tx.tb.mcs_index, tx.sinr_db);
        tx.tb.outcome = coin.uniform01() < tx.bler ? Outcome::rx_failure : Outcome::success;
    }
}

namespace {

struct PairState {
    UserPair pos;
    PairQueues queues;
    SensingLedger ledger;
    std::optional<Reservation> res;
    int mcs_index = 19;
    long tb_cap = 0;
    double own_rx_dbm = 0.0;
    long phase = 0;
    std::vector<IntervalAgg> intervals;
    UserStats stats;
};

class Sim {
public:
    Sim(const SimConfig& cfg, int run_index, TraceSink* trace)
        : cfg_(cfg),
          run_index_(run_index),
          trace_(trace),
          bw_(cfg.bandwidth()),
          curve_(cfg.bler_curve()),
          table_(default_mcs_table()),
          slot_ms_(cfg.slot_ms()),
          noise_dbm_(noise_power_dbm(bw_, cfg.radio)),
          interval_slots_(cfg.traffic.interval_slots(slot_ms_)),
          sensing_slots_(cfg.mac.sensing_window_slots(slot_ms_)),
          total_slots_(static_cast<long>(std::llround(cfg.run.duration_s * 1000.0 / slot_ms_))),
          run_seed_(cfg.run.base_seed + static_cast<std::uint64_t>(run_index)),
          mac_rng_(splitmix64(run_seed_ ^ kTagMac)),
          coin_rng_(splitmix64(run_seed_ ^ kTagCoin)),
          interference_(cfg.interference_pct, splitmix64(run_seed_ ^ kTagInterference)) {}

    RunStats execute() {
        setup();
        for (long t = 0; t < total_slots_; ++t) step_slot(t);
        finish();
        return std::move(out_);
    }

private:
    void setup() {
        Rng deploy_rng(splitmix64(run_seed_ ^ kTagDeployment));
        Rng traffic_rng(splitmix64(run_seed_ ^ kTagTraffic));
        const Deployment dep = sample_deployment(deploy_rng, cfg_.deployment);

        const long n_intervals = total_slots_ / interval_slots_ + 2;
        pairs_.resize(dep.pairs.size());
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            PairState& p = pairs_[i];
            p.pos = dep.pairs[i];
            p.own_rx_dbm = rsrp_dbm(cfg_.radio, p.pos.companion, p.pos.glasses);
            // Initial link adaptation before any sensing history exists.
            adapt_pair(p, predict_sinr_db(p.own_rx_dbm, {}, {}, noise_dbm_));
            p.phase = cfg_.traffic.random_phase
                          ? static_cast<long>(traffic_rng.below(
                                static_cast<std::uint64_t>(interval_slots_)))
                          : 0;
            p.intervals.resize(static_cast<std::size_t>(n_intervals));
        }
        out_.total_slots = total_slots_;
    }

    void adapt_pair(PairState& p, double predicted_sinr) {
        const McsEntry& e = adapt_mcs(predicted_sinr, curve_, cfg_.link.bler_target, table_);
        p.mcs_index = e.index;
        p.tb_cap = tb_capacity_bits(e, bw_, cfg_.radio);
    }

    long interval_tb_count(const PairState& p) const {
        long n = 0;
        for (Direction d :
             {Direction::glasses_to_companion, Direction::companion_to_glasses}) {
            const long bits = burst_bits(cfg_.traffic.rate_mbps(d), cfg_.traffic.interval_ms);
            n += static_cast<long>(segment_burst(bits, p.tb_cap).size());
        }
        return n;
    }

    void record_terminal(PairState& p, const TransportBlock& tb) {
        IntervalAgg& agg = p.intervals[static_cast<std::size_t>(tb.interval_index)];
        ++agg.terminal;
        switch (tb.outcome) {
            case Outcome::success:
                ++p.stats.success;
                ++out_.success;
                agg.max_completion_boundary =
                    std::max(agg.max_completion_boundary, tb.completion_boundary);
                break;
            case Outcome::rx_failure:
                ++p.stats.rx_failure;
                ++out_.rx_failure;
                // The transmission still happened; the link was on until it ended.
                agg.max_completion_boundary =
                    std::max(agg.max_completion_boundary, tb.completion_boundary);
                break;
            case Outcome::drop:
                ++p.stats.drop;
                ++out_.drop;
                agg.any_drop = true;
                break;
            case Outcome::pending:
                break;
        }
    }

    // Resource (re)selection for one pair. Returns false when no usable
    // window exists this slot; the caller retries next slot.
    bool attempt_selection(int i, long t) {
        PairState& p = pairs_[static_cast<std::size_t>(i)];
        const long wbegin = t + cfg_.mac.selection_start_offset_slots;
        long wend;
        if (cfg_.traffic.drop_policy == DropPolicy::pdb_drop) {
            long max_deadline = -1;
            for (const auto& q : p.queues.q) {
                if (!q.empty()) max_deadline = std::max(max_deadline, q.back().deadline_slot);
            }
            wend = max_deadline - 1;
        } else {
            wend = wbegin + interval_slots_ - 1;
        }
        if (wend < wbegin) return false;

        std::vector<SciRecord> genie_ads;
        std::span<const SciRecord> records;
        if (cfg_.flags.mode == Mode::mode2) {
            records = p.ledger.records();
        } else {
            genie_ads = build_genie_ads(i, t);
            records = genie_ads;
        }

        const ExclusionResult excl = excluded_slots(records, wbegin, wend, cfg_.mac);
        if (excl.relaxation_steps > 0) ++out_.relaxation_events;
        if (excl.candidates.empty()) return false;

        SelectionParams sp;
        sp.rri_slots = cfg_.flags.mar_enabled ? interval_slots_ : cfg_.mac.rri_slots(slot_ms_);
        sp.rrc_min = cfg_.mac.rrc_min;
        sp.rrc_max = cfg_.mac.rrc_max;
        const int batch =
            cfg_.flags.mar_enabled ? static_cast<int>(interval_tb_count(p)) : 1;

        auto res = select_resource(excl.candidates, mac_rng_, sp, batch, i);
        if (!res) return false;

        // Expected SINR over the selected pattern inside the window drives
        // the MCS for subsequent segmentation.
        std::vector<long> sel;
        for (long a : res->anchors) {
            for (long s = a; s <= wend; s += res->rri_slots) {
                if (s >= wbegin) sel.push_back(s);
            }
        }
        adapt_pair(p, predict_sinr_db(p.own_rx_dbm, records, sel, noise_dbm_));
        p.res = std::move(*res);
        return true;
    }

    std::vector<SciRecord> build_genie_ads(int self, long t) {
        std::vector<SciRecord> ads;
        const PairState& me = pairs_[static_cast<std::size_t>(self)];
        for (std::size_t j = 0; j < pairs_.size(); ++j) {
            if (static_cast<int>(j) == self) continue;
            const PairState& other = pairs_[j];
            if (!other.res) continue;
            SciRecord rec;
            rec.sender = static_cast<int>(j);
            rec.heard_slot = t;
            rec.reserved_slots = other.res->anchors;
            rec.rri_slots = other.res->rri_slots;
            rec.rsrp_dbm = pair_cross_rsrp_max(me.pos, other.pos);
            ads.push_back(std::move(rec));
        }
        return ads;
    }

    double pair_cross_rsrp_max(const UserPair& a, const UserPair& b) const {
        double m = rsrp_dbm(cfg_.radio, a.companion, b.companion);
        m = std::max(m, rsrp_dbm(cfg_.radio, a.companion, b.glasses));
        m = std::max(m, rsrp_dbm(cfg_.radio, a.glasses, b.companion));
        m = std::max(m, rsrp_dbm(cfg_.radio, a.glasses, b.glasses));
        return m;
    }

    // Direction choice at a transmit opportunity: strict alternation over
    // the directions whose head-of-line block can still meet its deadline.
    std::optional<Direction> pick_direction(PairState& p, long t) const {
        const auto eligible = [&](Direction d) {
            const auto& q = p.queues.queue(d);
            return !q.empty() &&
                   (q.front().deadline_slot == kNoDeadline || t < q.front().deadline_slot);
        };
        const bool eg = eligible(Direction::glasses_to_companion);
        const bool ec = eligible(Direction::companion_to_glasses);
        if (!eg && !ec) return std::nullopt;
        Direction d;
        if (eg && ec) {
            d = p.queues.next_dir;
        } else {
            d = eg ? Direction::glasses_to_companion : Direction::companion_to_glasses;
        }
        p.queues.next_dir = d == Direction::glasses_to_companion
                                ? Direction::companion_to_glasses
                                : Direction::glasses_to_companion;
        return d;
    }

    void step_slot(long t) {
        const bool occupied = interference_.occupied(t);
        if (occupied) {
            ++out_.occupied_slots;
            if (trace_ != nullptr) trace_->on_occupied_slot(run_index_, t);
        }

        // Traffic arrivals at interval boundaries.
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            PairState& p = pairs_[i];
            if (t >= p.phase && (t - p.phase) % interval_slots_ == 0) {
                const long idx = (t - p.phase) / interval_slots_;
                const int n = generate_interval(cfg_.traffic, slot_ms_, static_cast<int>(i), t,
                                                idx, p.tb_cap, p.mcs_index, p.queues);
                IntervalAgg& agg = p.intervals[static_cast<std::size_t>(idx)];
                agg.arrival_slot = t;
                agg.generated += n;
                out_.generated += n;
            }
        }

        // Delay-budget sweep.
        dropped_.clear();
        for (auto& p : pairs_) {
            for (auto& q : p.queues.q) expire_overdue(q, t, dropped_);
        }
        for (auto& tb : dropped_) record_terminal(pairs_[static_cast<std::size_t>(tb.pair)], tb);

        // (Re)selection for pairs with pending blocks and no reservation.
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            if (!pairs_[i].res && !pairs_[i].queues.empty()) {
                attempt_selection(static_cast<int>(i), t);
            }
        }

        // Reserved opportunities transmit unless the slot is occupied.
        txs_.clear();
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            PairState& p = pairs_[i];
            if (!p.res || !p.res->is_opportunity(t)) continue;
            if (occupied) continue;  // postponed to the next reserved slot
            const auto dir = pick_direction(p, t);
            if (!dir) continue;  // idle opportunity
            auto& q = p.queues.queue(*dir);
            SlotTx tx;
            tx.pair = static_cast<int>(i);
            tx.direction = *dir;
            tx.tb = q.front();
            q.pop_front();
            if (*dir == Direction::glasses_to_companion) {
                tx.tx_pos = p.pos.glasses;
                tx.rx_pos = p.pos.companion;
            } else {
                tx.tx_pos = p.pos.companion;
                tx.rx_pos = p.pos.glasses;
            }
            tx.tb.completion_boundary = t + 1;
            txs_.push_back(std::move(tx));
        }

        resolve_reception(txs_, cfg_.radio, noise_dbm_, curve_, coin_rng_);
        for (auto& tx : txs_) {
            record_terminal(pairs_[static_cast<std::size_t>(tx.pair)], tx.tb);
            if (trace_ != nullptr) trace_->on_transmission(run_index_, t, tx);
        }
        if (cfg_.flags.mode == Mode::mode1_genie && txs_.size() > 1) {
            for (std::size_t i = 0; i < txs_.size(); ++i) {
                for (std::size_t j = i + 1; j < txs_.size(); ++j) {
                    const auto& a = pairs_[static_cast<std::size_t>(txs_[i].pair)].pos;
                    const auto& b = pairs_[static_cast<std::size_t>(txs_[j].pair)].pos;
                    if (pair_cross_rsrp_max(a, b) > cfg_.mac.rsrp_threshold_dbm) {
                        ++out_.genie_threshold_violations;
                    }
                }
            }
        }

        // Sensing: every non-transmitting companion decodes the slot's
        // control messages; full-duplex lifts the transmit restriction.
        if (cfg_.flags.mode == Mode::mode2) {
            for (std::size_t i = 0; i < pairs_.size(); ++i) {
                PairState& p = pairs_[i];
                p.ledger.evict_heard_before(t - sensing_slots_);
                if (!cfg_.flags.fd_sensing) {
                    bool companion_tx = false;
                    for (const auto& tx : txs_) {
                        if (tx.pair == static_cast<int>(i) &&
                            tx.direction == Direction::companion_to_glasses) {
                            companion_tx = true;
                            break;
                        }
                    }
                    if (companion_tx) continue;
                }
                for (const auto& tx : txs_) {
                    if (tx.pair == static_cast<int>(i)) continue;
                    SciRecord rec;
                    rec.sender = tx.pair;
                    rec.heard_slot = t;
                    rec.reserved_slots = {t};
                    rec.rri_slots =
                        pairs_[static_cast<std::size_t>(tx.pair)].res->rri_slots;
                    rec.rsrp_dbm = rsrp_dbm(cfg_.radio, tx.tx_pos, p.pos.companion);
                    p.ledger.add(std::move(rec));
                }
            }
        }

        // Period bookkeeping and counter expiry.
        for (auto& p : pairs_) {
            if (p.res && p.res->period_ends_at(t)) {
                if (--p.res->remaining == 0) {
                    if (on_reservation_expiry(*p.res, mac_rng_, cfg_.mac) ==
                        ExpiryAction::reselect) {
                        p.res.reset();
                    }
                }
            }
        }
    }

    void finish() {
        for (auto& p : pairs_) {
            for (auto& q : p.queues.q) {
                for (auto& tb : q) {
                    tb.outcome = Outcome::drop;
                    record_terminal(p, tb);
                }
                q.clear();
            }
            for (const auto& agg : p.intervals) {
                if (agg.generated == 0) continue;
                ++p.stats.traffic_intervals;
                const auto on_time = interval_on_time_ms(agg, slot_ms_);
                if (on_time) {
                    p.stats.on_times_ms.push_back(*on_time);
                } else {
                    ++p.stats.incomplete_intervals;
                }
            }
            out_.users.push_back(std::move(p.stats));
        }
    }

    const SimConfig& cfg_;
    int run_index_;
    TraceSink* trace_;
    Bandwidth bw_;
    BlerCurve curve_;
    std::span<const McsEntry> table_;
    double slot_ms_;
    double noise_dbm_;
    long interval_slots_;
    long sensing_slots_;
    long total_slots_;
    std::uint64_t run_seed_;
    Rng mac_rng_;
    Rng coin_rng_;
    InterferenceProcess interference_;
    std::vector<PairState> pairs_;
    std::vector<SlotTx> txs_;
    std::vector<TransportBlock> dropped_;
    RunStats out_;
};

}  // namespace

RunStats simulate_run(const SimConfig& cfg, int run_index, TraceSink* trace) {
    Sim sim(cfg, run_index, trace);
    return sim.execute();
}

MetricsReport run(const SimConfig& cfg, TraceSink* trace) {
    validate_config(cfg);
    const int n = cfg.run.n_runs;
    std::vector<RunStats> results(static_cast<std::size_t>(n));

    int threads = cfg.run.threads;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = std::min(threads, n);
    if (trace != nullptr) threads = 1;  // keep trace rows in run order

    if (threads == 1) {
        for (int i = 0; i < n; ++i) results[static_cast<std::size_t>(i)] = simulate_run(cfg, i, trace);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const int i = next.fetch_add(1);
                    if (i >= n) break;
                    results[static_cast<std::size_t>(i)] = simulate_run(cfg, i, nullptr);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return aggregate(results, cfg.metrics, cfg.traffic.interval_ms);
}

}  // namespace slsim
