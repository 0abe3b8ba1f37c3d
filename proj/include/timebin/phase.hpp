#ifndef TIMEBIN_PHASE_HPP
#define TIMEBIN_PHASE_HPP

#include <cmath>
#include <numbers>

namespace timebin {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Maps any finite angle into [0, 2pi).
inline double normalize_angle(double x) noexcept
{
    double r = std::fmod(x, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0; // fmod(-tiny) + 2pi rounds up to 2pi
    return r;
}

/// Signed angular distance a - b folded into (-pi, pi].
inline double angle_difference(double a, double b) noexcept
{
    double d = normalize_angle(a - b);
    return d > pi ? d - two_pi : d;
}

/// Interferometer phase setting in radians, always held in [0, 2pi).
class Phase {
public:
    constexpr Phase() = default;
    explicit Phase(double radians) noexcept : value_(normalize_angle(radians)) {}

    double value() const noexcept { return value_; }

    Phase operator+(double shift) const noexcept { return Phase(value_ + shift); }
    Phase operator-(double shift) const noexcept { return Phase(value_ - shift); }

    friend bool operator==(Phase, Phase) = default;

private:
    double value_ = 0.0;
};

inline Phase shifted_by_pi(Phase p) noexcept { return p + pi; }

} // namespace timebin

#endif // TIMEBIN_PHASE_HPP
