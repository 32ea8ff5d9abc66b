// SPDX-License-Identifier: Apache-2.0

#ifndef SLSIM_ENGINE_HPP
#define SLSIM_ENGINE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slsim/mac.hpp"
#include "slsim/metrics.hpp"
#include "slsim/radio.hpp"
#include "slsim/rng.hpp"
#include "slsim/traffic.hpp"

namespace slsim {

struct DeploymentParams {
    int n_users = 10;
    double grid_side_m = 20.0;
    double pair_dist_min_m = 1.0;
    double pair_dist_max_m = 2.0;

    friend bool operator==(const DeploymentParams&, const DeploymentParams&) = default;
};

struct UserPair {
    Position companion;
    Position glasses;
    double orientation_rad = 0.0;
};

struct Deployment {
    std::vector<UserPair> pairs;
    double grid_side_m = 20.0;
};

// Companion uniform on the grid; glasses at a uniform [min,max] distance in
// a uniform direction, re-sampled until inside the grid.
Deployment sample_deployment(Rng& rng, const DeploymentParams& params);

// Slot occupancy by non-sidelink traffic: i.i.d. Bernoulli(x/100) per slot,
// a pure function of (seed, slot), sensed identically by all users.
class InterferenceProcess {
public:
    InterferenceProcess(double x_percent, std::uint64_t seed)
        : p_(x_percent / 100.0), seed_(seed) {}

    bool occupied(long slot) const {
        if (p_ <= 0.0) return false;
        if (p_ >= 1.0) return true;
        const std::uint64_t h = splitmix64(seed_ ^ (static_cast<std::uint64_t>(slot) *
                                                    0x9e3779b97f4a7c15ULL));
        return static_cast<double>(h >> 11) * 0x1.0p-53 < p_;
    }

private:
    double p_;
    std::uint64_t seed_;
};

struct RunParams {
    double duration_s = 10.0;
    int n_runs = 20;
    std::uint64_t base_seed = 1;
    int threads = 0;  // 0 = one per hardware thread

    friend bool operator==(const RunParams&, const RunParams&) = default;
};

struct LinkParams {
    double bler_target = 0.01;
    std::string bler_file;  // empty = shipped logistic defaults

    friend bool operator==(const LinkParams&, const LinkParams&) = default;
};

// One transmission scheduled in a slot, resolved jointly with the others.
struct SlotTx {
    int pair = -1;
    Direction direction = Direction::glasses_to_companion;
    Position tx_pos;
    Position rx_pos;
    TransportBlock tb;
    double sinr_db = 0.0;
    double bler = 0.0;
};

// SINR for each transmission against all concurrent transmitters, BLER for
// its MCS, then a biased coin: success with probability 1 - BLER.
void resolve_reception(std::span<SlotTx> txs, const RadioParams& radio, double noise_dbm,
                       const BlerCurve& curve, Rng& coin);

class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void on_occupied_slot(int run, long slot) = 0;
    virtual void on_transmission(int run, long slot, const SlotTx& tx) = 0;
};

struct SimConfig;

// One deployment simulated for the configured duration. Seeds derive from
// run_seed = base_seed + run_index, split per stream (deployment, traffic,
// MAC, reception coins, interference) via splitmix64 with fixed tags.
RunStats simulate_run(const SimConfig& cfg, int run_index, TraceSink* trace = nullptr);

// All runs, aggregated; deterministic for a fixed config and seed
// regardless of the thread count.
MetricsReport run(const SimConfig& cfg, TraceSink* trace = nullptr);

}  // namespace slsim

#endif
