#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adex/error.hpp"
#include "adex/rng.hpp"
#include "adex/types.hpp"

namespace adex {
namespace datagen {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Shape of the simulated cluster and its telemetry.
struct GeneratorConfig {
    std::int64_t duration_seconds = 7200;
    double base_input_rate = 1000.0; // records/s
    std::int64_t batch_interval = 5; // seconds
    int node_count = 4;
    double noise_sigma = 0.05; // fraction of the base level
    std::uint64_t seed = 1;

    void validate() const {
        if (duration_seconds < 600)
            throw ConfigError("generator: duration must be >= 600 s");
        if (batch_interval < 1)
            throw ConfigError("generator: batch_interval must be >= 1 s");
        if (node_count < 1)
            throw ConfigError("generator: node_count must be >= 1");
        if (noise_sigma < 0.0)
            throw ConfigError("generator: noise_sigma must be >= 0");
        if (base_input_rate <= 0.0)
            throw ConfigError("generator: base_input_rate must be positive");
    }

    /// 7 driver features + 3 per node (19 at the default 4 nodes).
    std::size_t feature_count() const { return 7 + 3 * static_cast<std::size_t>(node_count); }
};

struct InjectionSpec {
    AnomalyType anomaly_type = AnomalyType::BurstyInput;
    std::int64_t start_second = 0;
    std::int64_t duration_seconds = 0; // ignored for T2/T5/T6 (type-defined)
    double magnitude = 2.0;            // input-rate factor (T1/T2), CPU fraction (T4)
};

// Steady-state utilization of the simulated cluster: processing time of a
// nominal batch is kUtilization * batch_interval.
inline constexpr double kUtilization = 0.7;
// Fraction of the processing time that is fixed per-batch overhead; the
// rest scales with the batch size. An empty batch still takes
// kProcOverhead of the nominal time.
inline constexpr double kProcOverhead = 0.15;
// Cluster-wide load factor noise relative to per-feature noise; kept small
// so the correlated component does not dominate the noise structure.
inline constexpr double kCommonModeScale = 0.25;
inline constexpr double kMemBase = 16000.0;
// Normal band for EEI determination: rolling 60 s mean within 1.2x of the
// pre-anomaly baseline (two-sided for processing time, upper-only with an
// absolute slack for scheduling delay, whose baseline sits at ~0).
inline constexpr double kBandRatio = 1.2;
inline constexpr std::int64_t kBandWindow = 60;
inline constexpr double kDelayBandSlack = 0.25; // seconds
// T2 cascade: one executor dies each time the backlog grows by this much.
inline constexpr double kCrashDelayStep = 90.0; // seconds of scheduling delay
inline constexpr std::int64_t kDriverOutageSeconds = 20;
inline constexpr std::int64_t kDriverFailureRciSeconds = 60;
inline constexpr std::int64_t kExecutorOutageSeconds = 10;

// Feature layout ------------------------------------------------------------

inline constexpr std::size_t kInputRate = 0;
inline constexpr std::size_t kReceived = 1;
inline constexpr std::size_t kProcessed = 2; // cumulative
inline constexpr std::size_t kProcTime = 3;
inline constexpr std::size_t kSchedDelay = 4;
inline constexpr std::size_t kMemUsed = 5;
inline constexpr std::size_t kActiveExecutors = 6;

inline std::size_t node_idle_col(int node) { return 7 + 3 * static_cast<std::size_t>(node); }
inline std::size_t node_cpu_col(int node) { return 8 + 3 * static_cast<std::size_t>(node); }
inline std::size_t node_io_col(int node) { return 9 + 3 * static_cast<std::size_t>(node); }

inline std::vector<std::string> feature_names(const GeneratorConfig& config) {
    std::vector<std::string> names = {
        "driver_input_rate",       "driver_received_records", "driver_processed_records",
        "driver_processing_time",  "driver_scheduling_delay", "driver_memory_used",
        "driver_active_executors",
    };
    for (int i = 0; i < config.node_count; ++i) {
        std::string node = "node" + std::to_string(i + 1);
        names.push_back(node + "_cpu_idle");
        names.push_back(node + "_executor_cpu_time");
        names.push_back(node + "_executor_io_ops");
    }
    return names;
}

// ---------------------------------------------------------------------------
// Undisturbed generation
// ---------------------------------------------------------------------------

/// Deterministic synthetic trace of a healthily loaded cluster. Benign
/// processing-time spikes (disabled at noise_sigma = 0) mimic checkpointing
/// noise; they stay under 2% of records and at most 30 s each.
inline Trace generate_normal(const GeneratorConfig& config, std::uint64_t seed,
                             const std::string& trace_id = "trace", int app_id = 1) {
    config.validate();
    const auto n = static_cast<std::size_t>(config.duration_seconds);
    const std::size_t m = config.feature_count();
    const double b = static_cast<double>(config.batch_interval);
    const double sigma = config.noise_sigma;

    Trace trace;
    trace.trace_id = trace_id;
    trace.app_id = app_id;
    trace.features = feature_names(config);
    trace.timestamps.resize(n);
    trace.values = Matrix(n, m);

    Rng rng(seed);
    // Per-node load shares and nuisance coefficients, fixed per trace.
    std::vector<double> busy_base(static_cast<std::size_t>(config.node_count));
    std::vector<double> cpu_coeff(busy_base.size()), io_coeff(busy_base.size());
    for (std::size_t i = 0; i < busy_base.size(); ++i) {
        busy_base[i] = 100.0 * 0.6 * (0.7 + 0.3 * rng.uniform());
        cpu_coeff[i] = 0.9 + 0.2 * rng.uniform();
        io_coeff[i] = 0.9 + 0.2 * rng.uniform();
    }

    double delay_state = 0.0;
    double processed_total = 0.0;
    std::int64_t spike_until = -1;
    double spike_factor = 1.0;

    for (std::size_t t = 0; t < n; ++t) {
        trace.timestamps[t] = static_cast<std::int64_t>(t);

        if (sigma > 0.0) {
            if (static_cast<std::int64_t>(t) >= spike_until && rng.bernoulli(1.0 / 3000.0)) {
                spike_until = static_cast<std::int64_t>(t) +
                              static_cast<std::int64_t>(rng.uniform(5.0, 20.0));
                spike_factor = rng.uniform(1.5, 1.9);
            }
        }
        bool in_spike = static_cast<std::int64_t>(t) < spike_until;

        double load = std::max(0.01, 1.0 + kCommonModeScale * sigma * rng.normal());
        double input_rate =
            config.base_input_rate * load * std::max(0.01, 1.0 + sigma * rng.normal());
        double received = input_rate * std::max(0.01, 1.0 + 0.5 * sigma * rng.normal());
        double batch_load = received / config.base_input_rate;
        double proc = kUtilization * b * (kProcOverhead + (1.0 - kProcOverhead) * batch_load) *
                      (in_spike ? spike_factor : 1.0) *
                      std::max(0.01, 1.0 + sigma * rng.normal());

        trace.values.at(t, kInputRate) = input_rate;
        trace.values.at(t, kReceived) = received;
        processed_total += received;
        trace.values.at(t, kProcessed) = processed_total;
        trace.values.at(t, kProcTime) = proc;
        trace.values.at(t, kSchedDelay) = delay_state;
        trace.values.at(t, kMemUsed) = kMemBase * (1.0 + delay_state / (10.0 * b)) *
                                       std::max(0.01, 1.0 + 0.2 * sigma * rng.normal());
        trace.values.at(t, kActiveExecutors) = static_cast<double>(config.node_count);
        for (int i = 0; i < config.node_count; ++i) {
            auto ui = static_cast<std::size_t>(i);
            double busy = busy_base[ui] * load * std::max(0.01, 1.0 + sigma * rng.normal());
            trace.values.at(t, node_idle_col(i)) = std::max(0.0, 100.0 - busy);
            trace.values.at(t, node_cpu_col(i)) =
                cpu_coeff[ui] * received * std::max(0.01, 1.0 + sigma * rng.normal());
            trace.values.at(t, node_io_col(i)) =
                io_coeff[ui] * proc * std::max(0.01, 1.0 + sigma * rng.normal());
        }

        delay_state = std::max(0.0, delay_state + proc - b);
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Injection
// ---------------------------------------------------------------------------

namespace detail {

/// Processing-time multiplier for a given input-rate factor: the per-batch
/// overhead does not scale with the batch size. Exactly 1 for factor 1.
inline double flow_factor(double input_factor) {
    return input_factor == 1.0 ? 1.0
                               : kProcOverhead + (1.0 - kProcOverhead) * input_factor;
}

struct Modifiers {
    // Per-second multiplicative factors and flags driving the rewrite.
    std::vector<double> input_factor;   // T1/T2/T3
    std::vector<double> capacity_loss;  // extra processing-time factor (T4/T6/T2 cascade)
    std::vector<double> idle_scale;     // per node x second, 1 = untouched
    std::vector<double> cpu_scale;      // per node x second: executor CPU share kept
    std::vector<char> executor_down;    // per node x second
    std::vector<char> driver_down;      // second
    std::vector<double> delay_impulse;  // seconds added to the queue at t
    std::vector<char> counter_reset;    // cumulative counters restart at t
    std::size_t n = 0;
    int nodes = 0;

    explicit Modifiers(std::size_t n_, int nodes_)
        : input_factor(n_, 1.0), capacity_loss(n_, 1.0),
          idle_scale(n_ * static_cast<std::size_t>(nodes_), 1.0),
          cpu_scale(n_ * static_cast<std::size_t>(nodes_), 1.0),
          executor_down(n_ * static_cast<std::size_t>(nodes_), 0), driver_down(n_, 0),
          delay_impulse(n_, 0.0), counter_reset(n_, 0), n(n_), nodes(nodes_) {}

    double& idle(std::size_t t, int node) {
        return idle_scale[t * static_cast<std::size_t>(nodes) + static_cast<std::size_t>(node)];
    }
    double idle(std::size_t t, int node) const {
        return idle_scale[t * static_cast<std::size_t>(nodes) + static_cast<std::size_t>(node)];
    }
    double& cpu(std::size_t t, int node) {
        return cpu_scale[t * static_cast<std::size_t>(nodes) + static_cast<std::size_t>(node)];
    }
    double cpu(std::size_t t, int node) const {
        return cpu_scale[t * static_cast<std::size_t>(nodes) + static_cast<std::size_t>(node)];
    }
    char& down(std::size_t t, int node) {
        return executor_down[t * static_cast<std::size_t>(nodes) + static_cast<std::size_t>(node)];
    }
    bool is_down(std::size_t t, int node) const {
        return executor_down[t * static_cast<std::size_t>(nodes) + static_cast<std::size_t>(node)] !=
               0;
    }
};

/// Rewrite the trace columns under the modifiers. Identity positions keep
/// the original bytes; the scheduling-delay recurrence and cumulative
/// counters are re-run from the start whenever anything changed.
inline Trace apply_modifiers(const GeneratorConfig& config, const Trace& original,
                             const Modifiers& mods, std::size_t truncate_at) {
    const double b = static_cast<double>(config.batch_interval);
    Trace out = original;
    const std::size_t n = std::min(mods.n, original.record_count());

    bool touch_flow = false;
    for (std::size_t t = 0; t < n; ++t)
        touch_flow |= mods.input_factor[t] != 1.0 || mods.capacity_loss[t] != 1.0 ||
                      mods.driver_down[t] || mods.delay_impulse[t] != 0.0 ||
                      mods.counter_reset[t];

    if (touch_flow) {
        double delay_state = 0.0;
        double processed_total = 0.0;
        double prev_processed = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            double f = mods.input_factor[t];
            double cap = mods.capacity_loss[t];
            bool down = mods.driver_down[t] != 0;

            double inc = original.values.at(t, kProcessed) - prev_processed;
            prev_processed = original.values.at(t, kProcessed);
            if (mods.counter_reset[t])
                processed_total = 0.0;

            double proc = original.values.at(t, kProcTime) * flow_factor(f) * cap;
            delay_state += mods.delay_impulse[t];
            double recorded_delay = delay_state;
            delay_state = std::max(0.0, delay_state + (down ? 0.0 : proc) - b);

            if (down) {
                out.values.at(t, kInputRate) = 0.0;
                out.values.at(t, kReceived) = 0.0;
                out.values.at(t, kProcessed) = 0.0;
                out.values.at(t, kProcTime) = 0.0;
                out.values.at(t, kSchedDelay) = 0.0;
                out.values.at(t, kMemUsed) = 0.0;
                out.values.at(t, kActiveExecutors) = 0.0;
                continue;
            }

            if (f != 1.0) {
                out.values.at(t, kInputRate) = original.values.at(t, kInputRate) * f;
                out.values.at(t, kReceived) = original.values.at(t, kReceived) * f;
            }
            processed_total += inc * f;
            out.values.at(t, kProcessed) = processed_total;
            if (f != 1.0 || cap != 1.0)
                out.values.at(t, kProcTime) = proc;
            out.values.at(t, kSchedDelay) = recorded_delay;
            double old_delay = original.values.at(t, kSchedDelay);
            out.values.at(t, kMemUsed) = original.values.at(t, kMemUsed) *
                                         ((1.0 + recorded_delay / (10.0 * b)) /
                                          (1.0 + old_delay / (10.0 * b)));
        }
    }

    for (std::size_t t = 0; t < n; ++t) {
        int active = config.node_count;
        for (int i = 0; i < config.node_count; ++i) {
            if (mods.is_down(t, i)) {
                --active;
                out.values.at(t, node_cpu_col(i)) = 0.0;
                out.values.at(t, node_io_col(i)) = 0.0;
            } else {
                double f = mods.input_factor[t] * mods.cpu(t, i);
                if (f != 1.0)
                    out.values.at(t, node_cpu_col(i)) =
                        original.values.at(t, node_cpu_col(i)) * f;
                double proc_ratio = flow_factor(mods.input_factor[t]) * mods.capacity_loss[t];
                if (proc_ratio != 1.0)
                    out.values.at(t, node_io_col(i)) =
                        original.values.at(t, node_io_col(i)) * proc_ratio;
            }
            double scale = mods.idle(t, i);
            if (scale != 1.0) {
                out.values.at(t, node_idle_col(i)) =
                    original.values.at(t, node_idle_col(i)) * scale;
            } else if (mods.input_factor[t] != 1.0) {
                double busy = 100.0 - original.values.at(t, node_idle_col(i));
                out.values.at(t, node_idle_col(i)) =
                    std::max(0.0, 100.0 - busy * mods.input_factor[t]);
            }
        }
        if (!mods.driver_down[t])
            out.values.at(t, kActiveExecutors) = static_cast<double>(active);
    }

    if (truncate_at < out.record_count()) {
        out.timestamps.resize(truncate_at);
        out.values = out.values.slice_rows(0, truncate_at);
    }
    return out;
}

struct BandSpec {
    bool watch_proc = false;
    bool watch_delay = false;
    double proc_baseline = 0.0;
    double delay_baseline = 0.0;
};

inline BandSpec make_band(const Trace& trace, std::size_t rci_start, AnomalyType type) {
    BandSpec band;
    switch (type) {
    case AnomalyType::BurstyInput:
    case AnomalyType::CpuContention:
        band.watch_proc = band.watch_delay = true;
        break;
    case AnomalyType::StalledInput:
        band.watch_proc = true;
        break;
    case AnomalyType::DriverFailure:
    case AnomalyType::ExecutorFailure:
        band.watch_delay = true;
        break;
    case AnomalyType::BurstyInputCrash:
        break;
    }
    std::size_t lo = rci_start > 600 ? rci_start - 600 : 0;
    double proc_sum = 0.0, delay_sum = 0.0;
    for (std::size_t t = lo; t < rci_start; ++t) {
        proc_sum += trace.values.at(t, kProcTime);
        delay_sum += trace.values.at(t, kSchedDelay);
    }
    auto len = static_cast<double>(rci_start - lo);
    band.proc_baseline = proc_sum / len;
    band.delay_baseline = delay_sum / len;
    return band;
}

inline bool in_band(const Trace& trace, const BandSpec& band, std::size_t t) {
    std::size_t lo = t + 1 >= static_cast<std::size_t>(kBandWindow)
                         ? t + 1 - static_cast<std::size_t>(kBandWindow)
                         : 0;
    double proc_sum = 0.0, delay_sum = 0.0;
    for (std::size_t u = lo; u <= t; ++u) {
        proc_sum += trace.values.at(u, kProcTime);
        delay_sum += trace.values.at(u, kSchedDelay);
    }
    auto len = static_cast<double>(t - lo + 1);
    if (band.watch_proc) {
        double roll = proc_sum / len;
        if (roll > band.proc_baseline * kBandRatio || roll < band.proc_baseline / kBandRatio)
            return false;
    }
    if (band.watch_delay) {
        double roll = delay_sum / len;
        if (roll > band.delay_baseline * kBandRatio + kDelayBandSlack)
            return false;
    }
    return true;
}

/// First second e > rci_end such that the band held for 60 consecutive
/// seconds ending at e; none if the trace is in band right at the RCI end.
inline std::optional<std::size_t> extended_effect_end(const Trace& trace, const BandSpec& band,
                                                      std::size_t rci_end) {
    if (!band.watch_proc && !band.watch_delay)
        return std::nullopt;
    if (rci_end >= trace.record_count())
        return std::nullopt;
    if (in_band(trace, band, rci_end))
        return std::nullopt; // effect already dissipated: EEI is null
    std::int64_t streak = 0;
    for (std::size_t t = rci_end; t < trace.record_count(); ++t) {
        streak = in_band(trace, band, t) ? streak + 1 : 0;
        if (streak >= kBandWindow)
            return t + 1;
    }
    return trace.record_count(); // never recovered: EEI runs to the trace end
}

} // namespace detail

/// Apply one injection to a trace, returning the modified trace and its
/// ground-truth label. The RCI is the injected event interval; the EEI is
/// found by simulating forward until the watched metrics sit inside the
/// normal band for 60 consecutive seconds (or the trace ends / crashes).
inline std::pair<Trace, GroundTruthEntry> inject(const GeneratorConfig& config, const Trace& trace,
                                                 const InjectionSpec& spec, std::uint64_t seed,
                                                 const GroundTruthTable& existing = {}) {
    config.validate();
    const auto n = static_cast<std::int64_t>(trace.record_count());
    if (spec.start_second < 60 || spec.start_second >= n)
        throw RejectionError("inject: start_second must lie within the trace after a 60 s warmup");
    if ((spec.anomaly_type == AnomalyType::BurstyInput ||
         spec.anomaly_type == AnomalyType::StalledInput ||
         spec.anomaly_type == AnomalyType::CpuContention) &&
        spec.duration_seconds < 1)
        throw RejectionError("inject: duration_seconds must be >= 1 for T1/T3/T4");
    if (spec.magnitude < 0.0)
        throw RejectionError("inject: magnitude must be non-negative");

    Rng rng(seed);
    const auto start = static_cast<std::size_t>(spec.start_second);
    detail::Modifiers mods(static_cast<std::size_t>(n), config.node_count);
    std::size_t truncate_at = trace.record_count();
    std::size_t rci_end = 0;

    switch (spec.anomaly_type) {
    case AnomalyType::BurstyInput: {
        rci_end = std::min<std::size_t>(start + static_cast<std::size_t>(spec.duration_seconds),
                                        trace.record_count());
        for (std::size_t t = start; t < rci_end; ++t)
            mods.input_factor[t] = spec.magnitude;
        break;
    }
    case AnomalyType::BurstyInputCrash: {
        const double b = static_cast<double>(config.batch_interval);
        double delay = trace.values.at(start, kSchedDelay);
        int crashed = 0;
        std::size_t t = start;
        for (; t < trace.record_count(); ++t) {
            mods.input_factor[t] = spec.magnitude;
            double cap = crashed < config.node_count
                             ? static_cast<double>(config.node_count) /
                                   static_cast<double>(config.node_count - crashed)
                             : 0.0;
            mods.capacity_loss[t] = cap;
            for (int i = 0; i < crashed; ++i)
                mods.down(t, i) = 1;
            double proc = trace.values.at(t, kProcTime) * detail::flow_factor(spec.magnitude) * cap;
            delay = std::max(0.0, delay + proc - b);
            while (crashed < config.node_count &&
                   delay >= kCrashDelayStep * static_cast<double>(crashed + 1))
                ++crashed;
            if (crashed >= config.node_count)
                break; // application crash at second t
        }
        truncate_at = std::min<std::size_t>(t + 1, trace.record_count());
        rci_end = truncate_at;
        break;
    }
    case AnomalyType::StalledInput: {
        rci_end = std::min<std::size_t>(start + static_cast<std::size_t>(spec.duration_seconds),
                                        trace.record_count());
        for (std::size_t t = start; t < rci_end; ++t)
            mods.input_factor[t] = 0.0;
        break;
    }
    case AnomalyType::CpuContention: {
        rci_end = std::min<std::size_t>(start + static_cast<std::size_t>(spec.duration_seconds),
                                        trace.record_count());
        double fraction = spec.magnitude > 0.0 && spec.magnitude <= 1.0 ? spec.magnitude : 1.0;
        int node = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(config.node_count)));
        for (std::size_t t = start; t < rci_end; ++t) {
            mods.idle(t, node) = 1.0 - 0.98 * fraction;
            // The executor on the contended node gets starved of CPU time,
            // and its straggling tasks gate the whole batch: full contention
            // doubles the processing time, building up scheduling delay.
            mods.cpu(t, node) = 1.0 - 0.7 * fraction;
            mods.capacity_loss[t] = 1.0 / (1.0 - 0.5 * fraction);
        }
        break;
    }
    case AnomalyType::DriverFailure: {
        rci_end = std::min<std::size_t>(start + static_cast<std::size_t>(kDriverFailureRciSeconds),
                                        trace.record_count());
        auto outage_end = std::min<std::size_t>(
            start + 1 + static_cast<std::size_t>(kDriverOutageSeconds), trace.record_count());
        for (std::size_t t = start + 1; t < outage_end; ++t)
            mods.driver_down[t] = 1;
        if (start + 1 < mods.n)
            mods.counter_reset[start + 1] = 1;
        if (outage_end < mods.n)
            mods.delay_impulse[outage_end] = 2.0;
        break;
    }
    case AnomalyType::ExecutorFailure: {
        rci_end = std::min<std::size_t>(start + static_cast<std::size_t>(kExecutorOutageSeconds),
                                        trace.record_count());
        int node = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(config.node_count)));
        for (std::size_t t = start; t < rci_end; ++t) {
            mods.down(t, node) = 1;
            mods.capacity_loss[t] = static_cast<double>(config.node_count) /
                                    static_cast<double>(std::max(1, config.node_count - 1));
        }
        // Replaying the lost executor's in-flight work keeps the queue
        // elevated well past the restart.
        if (rci_end < mods.n)
            mods.delay_impulse[rci_end] = 30.0 * static_cast<double>(config.batch_interval);
        break;
    }
    }

    detail::BandSpec band = detail::make_band(trace, start, spec.anomaly_type);
    Trace modified = spec.magnitude == 1.0 && spec.anomaly_type == AnomalyType::BurstyInput
                         ? trace // identity factor leaves the trace untouched
                         : detail::apply_modifiers(config, trace, mods, truncate_at);

    GroundTruthEntry entry;
    entry.app_id = trace.app_id;
    entry.trace_id = trace.trace_id;
    entry.anomaly_type = spec.anomaly_type;
    const std::int64_t t0 = trace.timestamps.front();
    entry.root_cause_start = t0 + static_cast<std::int64_t>(start);
    entry.root_cause_end = t0 + static_cast<std::int64_t>(rci_end);

    if (spec.anomaly_type != AnomalyType::BurstyInputCrash) {
        auto eei = detail::extended_effect_end(modified, band, rci_end);
        if (eei && *eei > rci_end) {
            entry.extended_effect_start = entry.root_cause_end;
            entry.extended_effect_end = t0 + static_cast<std::int64_t>(*eei);
        }
    }
    entry.validate();

    for (const auto& prior : existing) {
        if (prior.trace_id != entry.trace_id)
            continue;
        if (entry.interval_start() < prior.interval_end() &&
            prior.interval_start() < entry.interval_end())
            throw RejectionError("inject: injection overlaps an existing labeled interval on '" +
                                 entry.trace_id + "'");
    }
    return {std::move(modified), std::move(entry)};
}

// ---------------------------------------------------------------------------
// Dataset recipes
// ---------------------------------------------------------------------------

struct TraceRecipe {
    std::string trace_id;
    int app_id = 1;
    std::optional<std::uint64_t> seed; // default derives from config.seed + id
    std::vector<InjectionSpec> injections;
};

struct DatasetRecipe {
    GeneratorConfig config;
    std::vector<TraceRecipe> traces;
};

struct DatasetSummary {
    std::size_t trace_count = 0;
    std::size_t disturbed_count = 0;
    std::map<AnomalyType, std::size_t> anomaly_counts;
};

/// Simulate every trace of the recipe in memory (so invalid recipes reject
/// before any write), producing traces plus the ground-truth table.
inline std::pair<std::vector<Trace>, GroundTruthTable> build_dataset(const DatasetRecipe& recipe) {
    recipe.config.validate();
    std::vector<Trace> traces;
    GroundTruthTable truth;
    std::map<std::string, int> ids;
    for (const auto& tr : recipe.traces)
        if (++ids[tr.trace_id] > 1)
            throw RejectionError("recipe: duplicate trace_id '" + tr.trace_id + "'");

    for (const auto& tr : recipe.traces) {
        std::uint64_t seed =
            tr.seed ? *tr.seed : derive_seed(recipe.config.seed, "trace", tr.trace_id);
        Trace trace = generate_normal(recipe.config, seed, tr.trace_id, tr.app_id);
        GroundTruthTable local;
        std::vector<InjectionSpec> ordered = tr.injections;
        std::sort(ordered.begin(), ordered.end(),
                  [](const InjectionSpec& a, const InjectionSpec& b) {
                      return a.start_second < b.start_second;
                  });
        std::size_t idx = 0;
        for (const auto& spec : ordered) {
            auto [modified, entry] =
                inject(recipe.config, trace, spec, derive_seed(seed, "inject", std::to_string(idx)),
                       local);
            trace = std::move(modified);
            local.push_back(entry);
            ++idx;
        }
        truth.insert(truth.end(), local.begin(), local.end());
        traces.push_back(std::move(trace));
    }
    return {std::move(traces), std::move(truth)};
}

} // namespace datagen
} // namespace adex
