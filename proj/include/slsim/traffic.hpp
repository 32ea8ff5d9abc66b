// SPDX-License-Identifier: Apache-2.0

#ifndef SLSIM_TRAFFIC_HPP
#define SLSIM_TRAFFIC_HPP

#include <array>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

namespace slsim {

enum class Direction : int {
    glasses_to_companion = 0,
    companion_to_glasses = 1,
};

enum class Outcome : int { pending, success, rx_failure, drop };

enum class DropPolicy : int {
    pdb_drop,                 // a block missing its delay budget is dropped
    queue_across_intervals,   // blocks stay queued into later intervals
};

struct TrafficConfig {
    double interval_ms = 22.0;
    double g2c_mbps = 5.0;
    double c2g_mbps = 5.0;
    double pdb_ms = 22.0;
    DropPolicy drop_policy = DropPolicy::pdb_drop;
    // Interval phase: all users burst together by default (the adversarial
    // case for contention); per-user random offsets for sensitivity studies.
    bool random_phase = false;

    long interval_slots(double slot_ms) const {
        return static_cast<long>(interval_ms / slot_ms + 0.5);
    }
    long pdb_slots(double slot_ms) const { return static_cast<long>(pdb_ms / slot_ms + 0.5); }

    double rate_mbps(Direction d) const {
        return d == Direction::glasses_to_companion ? g2c_mbps : c2g_mbps;
    }

    friend bool operator==(const TrafficConfig&, const TrafficConfig&) = default;
};

inline constexpr long kNoDeadline = std::numeric_limits<long>::max();

// Time convention: arrival_slot is the slot at whose start the block is
// generated; completion_boundary is the index of the slot boundary ending
// the transmission slot (tx in slot t completes at boundary t + 1), so a
// same-slot turnaround costs one slot duration. deadline_slot is a boundary
// index as well: the block must complete at or before it.
struct TransportBlock {
    int pair = 0;
    Direction direction = Direction::glasses_to_companion;
    long size_bits = 0;
    long arrival_slot = 0;
    long deadline_slot = kNoDeadline;
    long interval_index = 0;
    int mcs_index = 0;
    Outcome outcome = Outcome::pending;
    long completion_boundary = -1;
};

long burst_bits(double rate_mbps, double interval_ms);

// Full-capacity blocks plus a final remainder; empty for zero bits.
std::vector<long> segment_burst(long bits, long tb_capacity);

// Per-pair transmit queues, one per direction, drained in strict alternation
// starting glasses-to-companion at each traffic interval.
struct PairQueues {
    std::array<std::deque<TransportBlock>, 2> q;
    Direction next_dir = Direction::glasses_to_companion;

    std::deque<TransportBlock>& queue(Direction d) { return q[static_cast<int>(d)]; }
    const std::deque<TransportBlock>& queue(Direction d) const { return q[static_cast<int>(d)]; }
    bool empty() const { return q[0].empty() && q[1].empty(); }
    std::size_t pending() const { return q[0].size() + q[1].size(); }
};

// Emits both directions' blocks for the interval starting at slot t and
// appends them to the pair's queues. Returns the number of blocks added.
int generate_interval(const TrafficConfig& cfg, double slot_ms, int pair, long t,
                      long interval_index, long tb_capacity, int mcs_index, PairQueues& queues);

// Removes blocks whose deadline has passed, marking them dropped. The
// dropped blocks are appended to `dropped`. No-op under queueing policy.
int expire_overdue(std::deque<TransportBlock>& queue, long now,
                   std::vector<TransportBlock>& dropped);

}  // namespace slsim

#endif
