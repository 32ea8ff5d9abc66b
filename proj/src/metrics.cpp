// SPDX-License-Identifier: Apache-2.0

#include "slsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace slsim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> v) {
    if (v.empty()) return kNan;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Mean over the non-NaN entries; NaN when none.
double nan_mean(const std::vector<double>& v) {
    double s = 0.0;
    std::size_t n = 0;
    for (double x : v) {
        if (!std::isnan(x)) {
            s += x;
            ++n;
        }
    }
    return n == 0 ? kNan : s / static_cast<double>(n);
}

}  // namespace

double tb_latency_ms(const TransportBlock& tb, double slot_ms) {
    if (tb.outcome != Outcome::success) {
        throw std::logic_error("latency queried for a non-success transport block");
    }
    return static_cast<double>(tb.completion_boundary - tb.arrival_slot) * slot_ms;
}

std::optional<double> interval_on_time_ms(const IntervalAgg& agg, double slot_ms) {
    if (agg.generated == 0 || agg.any_drop || agg.terminal < agg.generated) return std::nullopt;
    return static_cast<double>(agg.max_completion_boundary - agg.arrival_slot) * slot_ms;
}

bool thermal_check_mean(double mean_on_time_ms, double limit_fraction, double interval_ms) {
    return mean_on_time_ms <= limit_fraction * interval_ms;  // NaN fails
}

bool thermal_check(std::span<const double> on_times_ms, double limit_fraction,
                   double interval_ms) {
    return thermal_check_mean(mean_of(on_times_ms), limit_fraction, interval_ms);
}

ClassVerdict classify(double mean_on_time_ms, bool thermal_ok, const MetricsThresholds& th) {
    ClassVerdict v;
    v.thermal_ok = thermal_ok;
    v.class_a = mean_on_time_ms <= th.class_a_ms && thermal_ok;
    v.class_b = v.class_a || mean_on_time_ms <= th.class_b_ms;
    v.class_c = v.class_b || mean_on_time_ms <= th.class_c_ms;
    return v;
}

double UserStats::prr() const {
    const long n = total();
    return n == 0 ? kNan : static_cast<double>(success) / static_cast<double>(n);
}

double percentile(std::span<const double> sorted_values, double p) {
    if (sorted_values.empty()) return kNan;
    const double rank = p * static_cast<double>(sorted_values.size());
    std::size_t idx = static_cast<std::size_t>(std::ceil(rank));
    if (idx > 0) --idx;
    if (idx >= sorted_values.size()) idx = sorted_values.size() - 1;
    return sorted_values[idx];
}

double RunStats::prr_mean() const {
    std::vector<double> v;
    v.reserve(users.size());
    for (const auto& u : users) v.push_back(u.prr());
    return nan_mean(v);
}

double RunStats::latency_mean_ms() const {
    std::vector<double> v;
    for (const auto& u : users) {
        if (!u.on_times_ms.empty()) v.push_back(mean_of(u.on_times_ms));
    }
    return nan_mean(v);
}

double RunStats::latency_p95_ms() const {
    std::vector<double> v;
    for (const auto& u : users) {
        if (u.on_times_ms.empty()) continue;
        std::vector<double> s(u.on_times_ms);
        std::sort(s.begin(), s.end());
        v.push_back(percentile(s, 0.95));
    }
    return nan_mean(v);
}

double RunStats::incomplete_rate() const {
    std::vector<double> v;
    for (const auto& u : users) {
        if (u.traffic_intervals > 0) {
            v.push_back(static_cast<double>(u.incomplete_intervals) /
                        static_cast<double>(u.traffic_intervals));
        }
    }
    return nan_mean(v);
}

MetricsReport aggregate(std::span<const RunStats> runs, const MetricsThresholds& th,
                        double interval_ms) {
    if (runs.empty()) throw std::invalid_argument("aggregate needs at least one run");
    MetricsReport r;
    r.n_runs = static_cast<int>(runs.size());
    r.n_users = runs.empty() ? 0 : static_cast<int>(runs.front().users.size());

    std::vector<double> p95s, incs;
    for (const auto& run : runs) {
        r.per_run_prr.push_back(run.prr_mean());
        r.per_run_latency_ms.push_back(run.latency_mean_ms());
        p95s.push_back(run.latency_p95_ms());
        incs.push_back(run.incomplete_rate());
        r.generated += run.generated;
        r.success += run.success;
        r.rx_failure += run.rx_failure;
        r.drop += run.drop;
        r.genie_threshold_violations += run.genie_threshold_violations;
        r.relaxation_events += run.relaxation_events;
    }
    r.prr_mean = nan_mean(r.per_run_prr);
    r.latency_mean_ms = nan_mean(r.per_run_latency_ms);
    r.latency_p95_ms = nan_mean(p95s);
    r.incomplete_rate = nan_mean(incs);
    r.thermal_ok = thermal_check_mean(r.latency_mean_ms, th.thermal_fraction, interval_ms);
    r.classes = classify(r.latency_mean_ms, r.thermal_ok, th);
    return r;
}

}  // namespace slsim
