#pragma once
// Time representation, injectable clock, bi-temporal visibility, and the
// decay/retention algebra shared by all stores.
//
// All times are integer milliseconds since the Unix epoch, UTC. Calendar
// days convert at exactly 86,400,000 ms; no DST or leap-second handling.
// Validity windows are half-open [from, until) so adjacent versions of a
// fact never overlap at a boundary instant.

#include "stratum/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>

namespace stratum {

using Millis = std::int64_t;

constexpr Millis kMillisPerSecond = 1000;
constexpr Millis kMillisPerHour = 3'600'000;
constexpr Millis kMillisPerDay = 86'400'000;

struct Timestamp {
    Millis ms = 0;

    constexpr auto operator<=>(const Timestamp&) const = default;
};

constexpr Timestamp at_ms(Millis ms) { return Timestamp{ms}; }
constexpr Timestamp at_days(double days) {
    return Timestamp{static_cast<Millis>(days * static_cast<double>(kMillisPerDay))};
}
constexpr Millis days(double d) {
    return static_cast<Millis>(d * static_cast<double>(kMillisPerDay));
}

// Four timestamps: when the record entered/left the system, and when the
// described state held in the world. Absent bounds mean open-ended.
struct BitemporalStamp {
    Timestamp system_created;
    std::optional<Timestamp> system_expired;
    Timestamp valid_from;
    std::optional<Timestamp> valid_until;
};

// True iff the record existed at `system_time` and described the world at
// `valid_time`. Both windows are half-open: [created, expired) x [from, until).
inline bool visible_as_of(const BitemporalStamp& stamp, Timestamp system_time,
                          Timestamp valid_time) {
    if (stamp.system_created > system_time) return false;
    if (stamp.system_expired && *stamp.system_expired <= system_time) return false;
    if (stamp.valid_from > valid_time) return false;
    if (stamp.valid_until && *stamp.valid_until <= valid_time) return false;
    return true;
}

// Abstract time source. Everything in the engine reads time through one of
// these; nothing ever calls the system clock directly.
class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() = 0;
};

// Wall clock, clamped so repeated calls never go backwards within a process.
class SystemClock final : public Clock {
public:
    Timestamp now() override {
        const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count();
        Millis prev = last_.load(std::memory_order_relaxed);
        Millis next = std::max<Millis>(wall, prev);
        while (!last_.compare_exchange_weak(prev, std::max(next, prev),
                                            std::memory_order_relaxed)) {
            next = std::max(next, prev);
        }
        return Timestamp{std::max(next, prev)};
    }

private:
    std::atomic<Millis> last_{0};
};

// Fixed clock for tests and reproducible CLI runs.
class ManualClock final : public Clock {
public:
    explicit ManualClock(Timestamp start = {}) : current_(start.ms) {}

    Timestamp now() override { return Timestamp{current_.load(std::memory_order_relaxed)}; }

    void set(Timestamp t) { current_.store(t.ms, std::memory_order_relaxed); }
    void advance(Millis by) { current_.fetch_add(by, std::memory_order_relaxed); }

private:
    std::atomic<Millis> current_;
};

// Decay profile. half_life and half_life_cap are durations in millis;
// initial_strength is in (0,1], recall_threshold in [0,1).
struct DecayParams {
    double initial_strength = 1.0;
    Millis half_life = 7 * kMillisPerDay;
    double reinforcement_growth = 2.0;
    Millis half_life_cap = 365 * kMillisPerDay;
    double recall_threshold = 0.05;

    void validate() const {
        if (!(initial_strength > 0.0 && initial_strength <= 1.0))
            throw ValidationError("initial_strength must be in (0,1]");
        if (half_life <= 0) throw ValidationError("half_life must be positive");
        if (reinforcement_growth < 1.0)
            throw ValidationError("reinforcement_growth must be >= 1");
        if (half_life_cap <= 0) throw ValidationError("half_life_cap must be positive");
        if (!(recall_threshold >= 0.0 && recall_threshold < 1.0))
            throw ValidationError("recall_threshold must be in [0,1)");
    }
};

// Retained strength after `elapsed` with half-life `half_life`:
//   r = s0 * 2^(-elapsed / half_life)
// Strictly decreasing and continuous in elapsed; r(h) = s0/2 exactly.
inline double retention(double initial_strength, Millis elapsed, Millis half_life) {
    if (half_life <= 0) throw ValidationError("retention: half_life must be positive");
    if (elapsed < 0) throw ValidationError("retention: elapsed must be non-negative");
    return initial_strength *
           std::exp2(-static_cast<double>(elapsed) / static_cast<double>(half_life));
}

// Effective half-life after `count` reinforcements: min(h * g^count, cap).
// Geometric growth with a cap; permanence belongs to other layers.
inline Millis reinforced_half_life(Millis base_half_life, int count, double growth,
                                   Millis cap) {
    if (count < 0) throw ValidationError("reinforced_half_life: count must be >= 0");
    double h = static_cast<double>(base_half_life);
    const double capd = static_cast<double>(cap);
    for (int i = 0; i < count && h < capd; ++i) h *= growth;
    h = std::min(h, capd);
    return static_cast<Millis>(h);
}

} // namespace stratum
