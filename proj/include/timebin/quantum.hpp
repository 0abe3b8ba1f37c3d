#ifndef TIMEBIN_QUANTUM_HPP
#define TIMEBIN_QUANTUM_HPP

#include <cmath>

#include "errors.hpp"
#include "outcome.hpp"
#include "phase.hpp"

namespace timebin::quantum {

/// Time-bin entangled pair source with fringe visibility V.
/// V scales only the M,M interference term.
class StateModel {
public:
    explicit StateModel(double visibility = 1.0) : visibility_(visibility)
    {
        if (!(visibility >= 0.0 && visibility <= 1.0))
            throw invalid_argument("visibility must lie in [0, 1]");
    }
    double visibility() const noexcept { return visibility_; }

private:
    double visibility_;
};

/// Closed-form joint outcome probabilities for settings (phiA, phiB).
///
/// M,M cells carry (1 +- V cos(phiA + phiB)) / 16, every mixed slot pair
/// except E,L / L,E carries 1/32 per sign pair, and E,L / L,E are zero.
inline JointOutcomeTable joint_table(const StateModel& state, Phase alice, Phase bob) noexcept
{
    JointOutcomeTable t;
    constexpr double flat = 1.0 / 32.0;
    for (Sign sa : both_signs)
        for (Sign sb : both_signs) {
            t({Slot::medium, sa}, {Slot::early, sb}) = flat;
            t({Slot::early, sa}, {Slot::medium, sb}) = flat;
            t({Slot::medium, sa}, {Slot::late, sb}) = flat;
            t({Slot::late, sa}, {Slot::medium, sb}) = flat;
            t({Slot::early, sa}, {Slot::early, sb}) = flat;
            t({Slot::late, sa}, {Slot::late, sb}) = flat;
        }

    const double fringe = state.visibility() * std::cos(alice.value() + bob.value());
    const double same = (1.0 + fringe) / 16.0;
    const double diff = (1.0 - fringe) / 16.0;
    t({Slot::medium, Sign::plus}, {Slot::medium, Sign::plus}) = same;
    t({Slot::medium, Sign::minus}, {Slot::medium, Sign::minus}) = same;
    t({Slot::medium, Sign::plus}, {Slot::medium, Sign::minus}) = diff;
    t({Slot::medium, Sign::minus}, {Slot::medium, Sign::plus}) = diff;
    return t;
}

/// Correlation of the M,M-postselected subensemble, V cos(phiA + phiB).
inline double conditional_mm_correlation(const StateModel& state, Phase alice, Phase bob) noexcept
{
    return correlation_of(medium_medium_conditional(joint_table(state, alice, bob)));
}

inline void require_chain_length(int n)
{
    if (n < 2) throw invalid_argument("chained Bell test needs n >= 2 settings per side");
}

/// Quantum maximum of the chained CHSH functional, 2N cos(pi / 2N).
inline double qm_chained_chsh(int n)
{
    require_chain_length(n);
    return 2.0 * n * std::cos(pi / (2.0 * n));
}

/// Quantum value of the CH form of the chained functional, 1/2 - N sin^2(pi / 4N).
inline double qm_chained_ch(int n)
{
    require_chain_length(n);
    const double s = std::sin(pi / (4.0 * n));
    return 0.5 - n * s * s;
}

/// Smallest visibility for which V * S_QM still exceeds the time-bin bound 2N - 1.
inline double critical_visibility(int n)
{
    require_chain_length(n);
    return (2.0 * n - 1.0) / qm_chained_chsh(n);
}

} // namespace timebin::quantum

#endif // TIMEBIN_QUANTUM_HPP
