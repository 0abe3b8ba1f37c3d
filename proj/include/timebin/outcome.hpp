#ifndef TIMEBIN_OUTCOME_HPP
#define TIMEBIN_OUTCOME_HPP

#include <array>
#include <cstddef>
#include <string>

namespace timebin {

/// Arrival slot relative to the pump pulse: t0 - dT, t0, t0 + dT.
enum class Slot : unsigned char { early = 0, medium = 1, late = 2 };

enum class Sign : unsigned char { plus = 0, minus = 1 };

inline constexpr std::array<Slot, 3> all_slots{Slot::early, Slot::medium, Slot::late};
inline constexpr std::array<Sign, 2> both_signs{Sign::plus, Sign::minus};

inline constexpr Sign flip(Sign s) noexcept { return s == Sign::plus ? Sign::minus : Sign::plus; }
inline constexpr int value_of(Sign s) noexcept { return s == Sign::plus ? 1 : -1; }

/// One local detection event class: E+, E-, M+, M-, L+ or L-.
struct SlotSign {
    Slot slot = Slot::medium;
    Sign sign = Sign::plus;

    constexpr std::size_t index() const noexcept
    {
        return static_cast<std::size_t>(slot) * 2 + static_cast<std::size_t>(sign);
    }
    static constexpr SlotSign from_index(std::size_t i) noexcept
    {
        return {static_cast<Slot>(i / 2), static_cast<Sign>(i % 2)};
    }

    friend constexpr bool operator==(SlotSign, SlotSign) = default;
};

inline constexpr std::size_t outcome_count = 6;

inline std::string to_string(SlotSign o)
{
    static constexpr const char* slots = "EML";
    return std::string(1, slots[static_cast<int>(o.slot)]) + (o.sign == Sign::plus ? "+" : "-");
}

/// Joint probability table over (Alice outcome, Bob outcome).
struct JointOutcomeTable {
    std::array<std::array<double, outcome_count>, outcome_count> p{};

    double& operator()(SlotSign a, SlotSign b) noexcept { return p[a.index()][b.index()]; }
    double operator()(SlotSign a, SlotSign b) const noexcept { return p[a.index()][b.index()]; }

    double total() const noexcept
    {
        double s = 0.0;
        for (const auto& row : p)
            for (double v : row) s += v;
        return s;
    }

    double alice_slot_marginal(Slot slot) const noexcept
    {
        double s = 0.0;
        for (Sign sa : both_signs)
            for (std::size_t j = 0; j < outcome_count; ++j) s += p[SlotSign{slot, sa}.index()][j];
        return s;
    }

    double bob_slot_marginal(Slot slot) const noexcept
    {
        double s = 0.0;
        for (Sign sb : both_signs)
            for (std::size_t i = 0; i < outcome_count; ++i) s += p[i][SlotSign{slot, sb}.index()];
        return s;
    }

    /// Total weight of one (Alice slot, Bob slot) block, summed over signs.
    double slot_pair(Slot a, Slot b) const noexcept
    {
        double s = 0.0;
        for (Sign sa : both_signs)
            for (Sign sb : both_signs) s += (*this)({a, sa}, {b, sb});
        return s;
    }

    /// Largest absolute cell difference.
    double max_abs_difference(const JointOutcomeTable& other) const noexcept
    {
        double m = 0.0;
        for (std::size_t i = 0; i < outcome_count; ++i)
            for (std::size_t j = 0; j < outcome_count; ++j) {
                const double d = p[i][j] - other.p[i][j];
                m = d < 0 ? (-d > m ? -d : m) : (d > m ? d : m);
            }
        return m;
    }
};

/// M,M-conditional sign probabilities, indexed [alice sign][bob sign].
using SignPairTable = std::array<std::array<double, 2>, 2>;

inline SignPairTable medium_medium_conditional(const JointOutcomeTable& t) noexcept
{
    SignPairTable out{};
    double z = t.slot_pair(Slot::medium, Slot::medium);
    for (Sign sa : both_signs)
        for (Sign sb : both_signs)
            out[static_cast<int>(sa)][static_cast<int>(sb)] =
                z > 0 ? t({Slot::medium, sa}, {Slot::medium, sb}) / z : 0.0;
    return out;
}

inline double correlation_of(const SignPairTable& q) noexcept
{
    return q[0][0] + q[1][1] - q[0][1] - q[1][0];
}

} // namespace timebin

#endif // TIMEBIN_OUTCOME_HPP
