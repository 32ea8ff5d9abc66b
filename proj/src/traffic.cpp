// SPDX-License-Identifier: Apache-2.0

#include "slsim/traffic.hpp"

#include <cmath>
#include <stdexcept>

namespace slsim {

long burst_bits(double rate_mbps, double interval_ms) {
    if (rate_mbps < 0.0) throw std::invalid_argument("traffic rate must be >= 0");
    return static_cast<long>(std::llround(rate_mbps * 1e6 * interval_ms / 1000.0));
}

std::vector<long> segment_burst(long bits, long tb_capacity) {
    if (tb_capacity <= 0) throw std::invalid_argument("TB capacity must be > 0");
    std::vector<long> sizes;
    while (bits > 0) {
        const long s = bits < tb_capacity ? bits : tb_capacity;
        sizes.push_back(s);
        bits -= s;
    }
    return sizes;
}

int generate_interval(const TrafficConfig& cfg, double slot_ms, int pair, long t,
                      long interval_index, long tb_capacity, int mcs_index, PairQueues& queues) {
    const long deadline =
        cfg.drop_policy == DropPolicy::pdb_drop ? t + cfg.pdb_slots(slot_ms) : kNoDeadline;
    int added = 0;
    for (Direction d : {Direction::glasses_to_companion, Direction::companion_to_glasses}) {
        const long bits = burst_bits(cfg.rate_mbps(d), cfg.interval_ms);
        for (long size : segment_burst(bits, tb_capacity)) {
            TransportBlock tb;
            tb.pair = pair;
            tb.direction = d;
            tb.size_bits = size;
            tb.arrival_slot = t;
            tb.deadline_slot = deadline;
            tb.interval_index = interval_index;
            tb.mcs_index = mcs_index;
            queues.queue(d).push_back(tb);
            ++added;
        }
    }
    // Each interval's transfer restarts the alternation at glasses-to-companion.
    queues.next_dir = Direction::glasses_to_companion;
    return added;
}

int expire_overdue(std::deque<TransportBlock>& queue, long now,
                   std::vector<TransportBlock>& dropped) {
    int count = 0;
    while (!queue.empty() && queue.front().deadline_slot != kNoDeadline &&
           queue.front().deadline_slot < now) {
        queue.front().outcome = Outcome::drop;
        dropped.push_back(queue.front());
        queue.pop_front();
        ++count;
    }
    return count;
}

}  // namespace slsim
