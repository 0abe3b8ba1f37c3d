#include <gtest/gtest.h>

#include <timebin/quantum.hpp>

#include "oracles.hpp"

using namespace timebin;
using namespace timebin::quantum;

namespace {
const SlotSign mp{Slot::medium, Sign::plus}, mm{Slot::medium, Sign::minus};
const SlotSign ep{Slot::early, Sign::plus}, lp{Slot::late, Sign::plus};
} // namespace

TEST(JointTable, MatchesInterferometerAmplitudes)
{
    for (double v : {0.0, 0.37, 0.99, 1.0})
        for (double a : {0.0, 0.4, 2.1, 5.5})
            for (double b : {0.0, 1.3, 3.0, 4.4}) {
                const auto t = joint_table(StateModel(v), Phase(a), Phase(b));
                EXPECT_LT(t.max_abs_difference(oracle::interferometer_table(v, a, b)), 1e-15)
                    << "V=" << v << " a=" << a << " b=" << b;
                EXPECT_NEAR(t.total(), 1.0, 1e-15);
            }
}

TEST(JointTable, CentralPeakAtZeroPhaseSum)
{
    const auto t = joint_table(StateModel(1.0), Phase(0.7), Phase(-0.7));
    EXPECT_NEAR(t(mp, mp), 1.0 / 8, 1e-15);
    EXPECT_NEAR(t(mp, mm), 0.0, 1e-15);
}

TEST(JointTable, EarlyLateExactlyZero)
{
    for (double a : {0.0, 1.0, 4.0}) {
        const auto t = joint_table(StateModel(1.0), Phase(a), Phase(2.0));
        EXPECT_EQ(t(ep, lp), 0.0);
        EXPECT_EQ(t(lp, ep), 0.0);
    }
}

TEST(JointTable, NoInterferenceAtZeroVisibility)
{
    const auto t = joint_table(StateModel(0.0), Phase(0.3), Phase(1.9));
    for (SlotSign a : {mp, mm})
        for (SlotSign b : {mp, mm}) EXPECT_NEAR(t(a, b), 1.0 / 16, 1e-15);
}

TEST(JointTable, SlotMarginalsQuarterHalfQuarter)
{
    const auto t = joint_table(StateModel(0.8), Phase(1.0), Phase(2.0));
    EXPECT_NEAR(t.alice_slot_marginal(Slot::early), 0.25, 1e-15);
    EXPECT_NEAR(t.alice_slot_marginal(Slot::medium), 0.5, 1e-15);
    EXPECT_NEAR(t.bob_slot_marginal(Slot::late), 0.25, 1e-15);
}

TEST(StateModel, VisibilityRange)
{
    EXPECT_THROW(StateModel(-0.01), invalid_argument);
    EXPECT_THROW(StateModel(1.01), invalid_argument);
    EXPECT_NO_THROW(StateModel(0.0));
}

TEST(Correlation, ConditionalOnMediumSlots)
{
    EXPECT_NEAR(conditional_mm_correlation(StateModel(1.0), Phase(0), Phase(0)), 1.0, 1e-15);
    EXPECT_NEAR(conditional_mm_correlation(StateModel(1.0), Phase(pi / 8), Phase(pi / 8)), std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(conditional_mm_correlation(StateModel(0.99), Phase(pi / 20), Phase(pi / 20)), 0.99 * std::cos(pi / 10),
                1e-12);
    // Same number through the table.
    const auto t = oracle::interferometer_table(0.99, pi / 20, pi / 20);
    EXPECT_NEAR(correlation_of(medium_medium_conditional(t)), 0.99 * std::cos(pi / 10), 1e-12);
}

TEST(ChainedPrediction, Values)
{
    EXPECT_NEAR(qm_chained_chsh(3), 5.196, 1e-3);
    EXPECT_NEAR(qm_chained_chsh(4), 7.391, 1e-3);
    EXPECT_NEAR(qm_chained_chsh(5), 9.511, 1e-3);
    EXPECT_NEAR(qm_chained_ch(3), 0.5 - 3 * std::pow(std::sin(pi / 12), 2), 1e-15);
    EXPECT_NEAR(qm_chained_ch(3), 0.2990, 1e-4);
    EXPECT_NEAR(qm_chained_ch(5), 0.5 - 5 * std::pow(std::sin(pi / 20), 2), 1e-15);
    EXPECT_NEAR(qm_chained_ch(5), 0.3773, 1e-3);
    for (int n = 2; n <= 10; ++n) EXPECT_NEAR(4 * qm_chained_ch(n) + 2 * (n - 1), qm_chained_chsh(n), 1e-12);
    EXPECT_THROW(qm_chained_chsh(1), invalid_argument);
}

TEST(ChainedPrediction, CriticalVisibility)
{
    EXPECT_NEAR(critical_visibility(5), 0.9463, 1e-4);
    EXPECT_NEAR(critical_visibility(3), 5.0 / (3 * std::sqrt(3.0)), 1e-12);
    EXPECT_NEAR(critical_visibility(3), 0.9623, 1e-4);
    EXPECT_NEAR(critical_visibility(4), 0.9471, 1e-4);
    EXPECT_GT(critical_visibility(2), 1.0);
}
