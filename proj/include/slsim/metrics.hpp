// SPDX-License-Identifier: Apache-2.0

#ifndef SLSIM_METRICS_HPP
#define SLSIM_METRICS_HPP

#include <optional>
#include <span>
#include <vector>

#include "slsim/traffic.hpp"

namespace slsim {

struct MetricsThresholds {
    double thermal_fraction = 0.5;
    double class_a_ms = 20.0;
    double class_b_ms = 40.0;
    double class_c_ms = 1000.0;

    friend bool operator==(const MetricsThresholds&, const MetricsThresholds&) = default;
};

struct ClassVerdict {
    bool class_a = false;
    bool class_b = false;
    bool class_c = false;
    bool thermal_ok = false;
};

// Valid for successful blocks only.
double tb_latency_ms(const TransportBlock& tb, double slot_ms);

// Book-keeping for one traffic interval of one user: on-time is the latency
// of the last block transmitted in the interval; a dropped block makes the
// interval incomplete.
struct IntervalAgg {
    long arrival_slot = 0;
    int generated = 0;
    int terminal = 0;
    bool any_drop = false;
    long max_completion_boundary = -1;
};

std::optional<double> interval_on_time_ms(const IntervalAgg& agg, double slot_ms);

// Duty-cycle proxy: mean on-time within limit_fraction of the interval.
// An empty sample set fails the check (nothing ever completed).
bool thermal_check(std::span<const double> on_times_ms, double limit_fraction,
                   double interval_ms);
bool thermal_check_mean(double mean_on_time_ms, double limit_fraction, double interval_ms);

// Nested use-case classes; A additionally requires the thermal check.
ClassVerdict classify(double mean_on_time_ms, bool thermal_ok, const MetricsThresholds& th);

struct UserStats {
    long success = 0;
    long rx_failure = 0;
    long drop = 0;
    std::vector<double> on_times_ms;  // complete intervals only
    long incomplete_intervals = 0;
    long traffic_intervals = 0;

    long total() const { return success + rx_failure + drop; }
    double prr() const;
};

struct RunStats {
    std::vector<UserStats> users;
    long generated = 0;
    long success = 0;
    long rx_failure = 0;
    long drop = 0;
    long occupied_slots = 0;
    long total_slots = 0;
    long genie_threshold_violations = 0;  // above-threshold co-slot transmissions
    long relaxation_events = 0;           // selections that needed threshold relaxation

    double prr_mean() const;
    double latency_mean_ms() const;
    double latency_p95_ms() const;
    double incomplete_rate() const;
};

struct MetricsReport {
    int n_runs = 0;
    int n_users = 0;
    double prr_mean = 0.0;
    double latency_mean_ms = 0.0;
    double latency_p95_ms = 0.0;
    double incomplete_rate = 0.0;
    bool thermal_ok = false;
    ClassVerdict classes;
    long generated = 0;
    long success = 0;
    long rx_failure = 0;
    long drop = 0;
    long genie_threshold_violations = 0;
    long relaxation_events = 0;
    // Per-run reductions, in run order, for dispersion estimates.
    std::vector<double> per_run_prr;
    std::vector<double> per_run_latency_ms;
};

double percentile(std::span<const double> sorted_values, double p);

// Unweighted mean over users, then over runs; incomplete intervals are
// excluded from the latency figures and reported as a separate rate.
MetricsReport aggregate(std::span<const RunStats> runs, const MetricsThresholds& th,
                        double interval_ms);

}  // namespace slsim

#endif
