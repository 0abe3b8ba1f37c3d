#ifndef TIMEBIN_TIMING_HPP
#define TIMEBIN_TIMING_HPP

#include <cmath>
#include <cstdint>

#include "config.hpp"
#include "outcome.hpp"

namespace timebin {

/// Pulse-synchronous time base shared by the simulator and the analysis.
/// Pulse n (from run start) has its M slot at (n + 1/2) * period; E and L sit
/// delta_t before and after. Times are quantized by floor(t / tdc_bin).
class PulseClock {
public:
    PulseClock(double rep_period, double tdc_bin, double delta_t)
        : period_(rep_period), bin_(tdc_bin), delta_t_(delta_t) {}

    explicit PulseClock(const ExperimentConfig& c) : PulseClock(c.rep_period(), c.tdc_bin, c.delta_t) {}

    double period() const noexcept { return period_; }
    double bin() const noexcept { return bin_; }

    std::uint64_t tick_of(double t) const noexcept { return static_cast<std::uint64_t>(std::floor(t / bin_)); }

    double slot_time(std::uint64_t pulse, Slot s) const noexcept
    {
        const double centre = (static_cast<double>(pulse) + 0.5) * period_;
        switch (s) {
        case Slot::early: return centre - delta_t_;
        case Slot::late: return centre + delta_t_;
        default: return centre;
        }
    }

    std::uint64_t slot_tick(std::uint64_t pulse, Slot s) const noexcept { return tick_of(slot_time(pulse, s)); }

    std::uint64_t pulse_of(std::uint64_t tick) const noexcept
    {
        return static_cast<std::uint64_t>(std::floor(static_cast<double>(tick) * bin_ / period_));
    }

    /// Tick offset from the M-slot centre of the pulse containing `tick`.
    std::int64_t offset_of(std::uint64_t tick) const noexcept
    {
        const std::uint64_t n = pulse_of(tick);
        return static_cast<std::int64_t>(tick) - static_cast<std::int64_t>(slot_tick(n, Slot::medium));
    }

    /// Nominal E/L offset from the M slot, in whole ticks.
    std::int64_t slot_spacing_ticks() const noexcept { return std::llround(delta_t_ / bin_); }

    /// Offsets any tick can take: pulse half-period rounded outward.
    std::int64_t max_abs_offset() const noexcept
    {
        return static_cast<std::int64_t>(std::ceil(0.5 * period_ / bin_)) + 1;
    }

private:
    double period_;
    double bin_;
    double delta_t_;
};

} // namespace timebin

#endif // TIMEBIN_TIMING_HPP
