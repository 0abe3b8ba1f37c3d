#include <gtest/gtest.h>

#include <set>

#include <timebin/settings.hpp>

#include "oracles.hpp"

using namespace timebin;

namespace {

double chained_cos(const ChainedSettings& s)
{
    return oracle::chained_sum(s.n(), [&](int k, int j) { return std::cos(s.alice(k).value() + s.bob(j).value()); });
}

} // namespace

TEST(Phase, NormalizesIntoHalfOpenRange)
{
    EXPECT_DOUBLE_EQ(Phase(-pi / 2).value(), 1.5 * pi);
    EXPECT_DOUBLE_EQ(Phase(two_pi).value(), 0.0);
    EXPECT_NEAR(Phase(5 * pi).value(), pi, 1e-12);
    EXPECT_NEAR(shifted_by_pi(Phase(0.25)).value(), 0.25 + pi, 1e-15);
    EXPECT_NEAR(angle_difference(0.1, two_pi - 0.1), 0.2, 1e-12);
}

TEST(OptimalSettings, TwoSettingsGiveTsirelson)
{
    EXPECT_NEAR(chained_cos(optimal_chained_settings(2)), 2 * std::sqrt(2.0), 1e-12);
}

TEST(OptimalSettings, ThreeSettingsGiveThreeRootThree)
{
    EXPECT_NEAR(chained_cos(optimal_chained_settings(3)), 3 * std::sqrt(3.0), 1e-12);
}

TEST(OptimalSettings, FiveSettings)
{
    EXPECT_NEAR(chained_cos(optimal_chained_settings(5)), 10 * std::cos(pi / 10), 1e-12);
}

TEST(OptimalSettings, EveryTermHasStepSizedPhaseSum)
{
    for (int n = 2; n <= 8; ++n) {
        const auto s = optimal_chained_settings(n);
        const double step = pi / (2 * n);
        for (const auto& t : chained_terms(n)) {
            const double sum = angle_difference(s.alice(t.index.alice).value() + s.bob(t.index.bob).value(), 0.0);
            const double want = t.role == TermRole::negated ? step - pi : step;
            EXPECT_NEAR(std::abs(sum), std::abs(want), 1e-12) << term_name(t.index) << " n=" << n;
        }
    }
}

TEST(OptimalSettings, RejectsShortChains)
{
    EXPECT_THROW(optimal_chained_settings(1), invalid_argument);
    EXPECT_THROW(ChainedSettings({Phase(0)}, {Phase(0)}), invalid_argument);
    EXPECT_THROW(ChainedSettings({Phase(0), Phase(1)}, {Phase(0)}), invalid_argument);
}

TEST(ChainedTerms, OrderAndRoles)
{
    const auto t = chained_terms(3);
    ASSERT_EQ(t.size(), 6u);
    EXPECT_EQ(term_name(t.front().index), "A3B3");
    EXPECT_EQ(term_name(t[1].index), "A2B1");
    EXPECT_EQ(term_name(t[2].index), "A1B2");
    EXPECT_EQ(term_name(t.back().index), "A1B1");
    EXPECT_EQ(t.back().sign(), -1);
    EXPECT_EQ(t.front().sign(), 1);
}

TEST(RunPlan, ChshRunCounts)
{
    EXPECT_EQ(build_run_plan(optimal_chained_settings(2), Functional::chsh).runs.size(), 16u);
    EXPECT_EQ(build_run_plan(optimal_chained_settings(3), Functional::chsh).runs.size(), 24u);
}

TEST(RunPlan, ChFormHasOneRunPerProbability)
{
    const auto plan = build_run_plan(optimal_chained_settings(3), Functional::ch1, 2.0);
    ASSERT_EQ(plan.runs.size(), 6u);
    std::set<std::string> labels;
    for (const auto& r : plan.runs) {
        labels.insert(r.label);
        EXPECT_EQ(r.duration, 2.0);
    }
    EXPECT_EQ(labels, (std::set<std::string>{"A3B3_pp", "A2B1_pm", "A1B2_mp", "A3B2_pm", "A2B3_mp", "A1B1_pp"}));
}

TEST(RunPlan, MinusOutcomeShiftsPhaseByPi)
{
    const auto s = optimal_chained_settings(3);
    const auto plan = build_run_plan(s, Functional::chsh);
    std::set<std::string> labels;
    for (const auto& r : plan.runs) {
        labels.insert(r.label);
        const double da = angle_difference(r.alice_phase.value(), s.alice(r.term.alice).value());
        const double db = angle_difference(r.bob_phase.value(), s.bob(r.term.bob).value());
        EXPECT_NEAR(std::abs(da), r.alice_outcome == Sign::minus ? pi : 0.0, 1e-12);
        EXPECT_NEAR(std::abs(db), r.bob_outcome == Sign::minus ? pi : 0.0, 1e-12);
        EXPECT_EQ(r.label, run_label(r.term, r.alice_outcome, r.bob_outcome));
    }
    EXPECT_EQ(labels.size(), 24u);
}

TEST(RunPlan, StartTimesIncludeStabilizationGaps)
{
    const auto plan = build_run_plan(optimal_chained_settings(2), Functional::chsh, 3.0, 1.0);
    EXPECT_DOUBLE_EQ(plan.start_time(0), 0.0);
    EXPECT_DOUBLE_EQ(plan.start_time(3), 12.0);
    EXPECT_THROW(build_run_plan(optimal_chained_settings(2), Functional::chsh, 0.0), invalid_argument);
}

TEST(RunLabel, RoundTrip)
{
    const auto p = parse_run_label("A12B11_mp");
    ASSERT_TRUE(p);
    EXPECT_EQ(p->term.alice, 12);
    EXPECT_EQ(p->term.bob, 11);
    EXPECT_EQ(p->alice, Sign::minus);
    EXPECT_EQ(p->bob, Sign::plus);
    EXPECT_FALSE(parse_run_label("A1B1"));
    EXPECT_FALSE(parse_run_label("A1B1_px"));
    EXPECT_FALSE(parse_run_label("B1A1_pp"));
}

TEST(Functional, Parsing)
{
    EXPECT_EQ(functional_from_string("ch3"), Functional::ch3);
    EXPECT_EQ(to_string(Functional::chsh), "chsh");
    EXPECT_THROW(functional_from_string("ch5"), invalid_argument);
}
