#include <gtest/gtest.h>

#include <timebin/analysis.hpp>
#include <timebin/simulator.hpp>

using namespace timebin;

namespace {

ExperimentConfig ideal(double p = 1e-3)
{
    ExperimentConfig c;
    c.pair_prob_per_pulse = p;
    c.detector_efficiency = {1.0, 1.0};
    c.dark_count_rate = 0.0;
    c.visibility = 1.0;
    return c;
}

/// Duration holding exactly `pulses` pump pulses.
double pulses_to_seconds(const ExperimentConfig& c, double pulses) { return (pulses + 0.5) / c.rep_rate; }

std::uint64_t central(const TimetagStream& s) { return analysis::count_coincidences(s, {}).central_count; }

} // namespace

TEST(SimulateRun, NoPairsNoDarksIsEmpty)
{
    ExperimentConfig c = ideal(0.0);
    const auto s = sim::simulate_run(c, Phase(0), Phase(0), 0.01, "x");
    EXPECT_TRUE(s.records.empty());
    EXPECT_EQ(s.header.generated_pairs, 0u);
    EXPECT_EQ(s.header.label, "x");
    EXPECT_EQ(s.header.model_id, sim::quantum_model_id);
}

TEST(SimulateRun, DestructiveInterferenceKillsCentralCoincidences)
{
    ExperimentConfig c = ideal(1e-2);
    const auto s = sim::simulate_run(c, Phase(1.0), Phase(pi - 1.0), pulses_to_seconds(c, 2e6));
    EXPECT_GT(s.header.generated_pairs, 10000u);
    EXPECT_EQ(central(s), 0u);
}

TEST(SimulateRun, CentralCoincidencesAreAnEighthOfPairs)
{
    ExperimentConfig c = ideal(1e-3);
    const auto s = sim::simulate_run(c, Phase(0.2), Phase(-0.2), pulses_to_seconds(c, 1e7));
    const double n = static_cast<double>(s.header.generated_pairs);
    EXPECT_NEAR(n, 1e4, 5 * std::sqrt(1e4));
    const double sigma = std::sqrt(n * 0.125 * 0.875);
    EXPECT_NEAR(static_cast<double>(central(s)), n / 8, 5 * sigma);
}

TEST(SimulateRun, RecordsSortedAndChannelsBalanced)
{
    ExperimentConfig c = ideal(1e-2);
    c.dark_count_rate = 1e4;
    const auto s = sim::simulate_run(c, Phase(0.5), Phase(2.0), 0.01);
    for (std::size_t i = 1; i < s.records.size(); ++i) ASSERT_LE(s.records[i - 1].tick, s.records[i].tick);
    // Each side clicks on "+" half of the time.
    const double n = static_cast<double>(s.header.generated_pairs);
    EXPECT_NEAR(double(s.count(Channel::alice_plus)), n / 2 + 100, 5 * std::sqrt(n / 4 + 100));
    EXPECT_NEAR(double(s.count(Channel::bob_plus)), n / 2 + 100, 5 * std::sqrt(n / 4 + 100));
}

TEST(SimulateRun, EfficiencyThinsEachSide)
{
    ExperimentConfig c = ideal(1e-2);
    c.detector_efficiency = {0.2, 0.6};
    const auto s = sim::simulate_run(c, Phase(0), Phase(0), 0.01);
    const double n = static_cast<double>(s.header.generated_pairs);
    EXPECT_NEAR(double(s.count(Channel::alice_plus)), 0.1 * n, 5 * std::sqrt(0.1 * 0.9 * n));
    EXPECT_NEAR(double(s.count(Channel::bob_plus)), 0.3 * n, 5 * std::sqrt(0.3 * 0.7 * n));
}

TEST(SimulateRun, DarkCountsArePoissonAndUniform)
{
    ExperimentConfig c = ideal(0.0);
    c.dark_count_rate = 2e5;
    const double duration = 0.05;
    const auto s = sim::simulate_run(c, Phase(0), Phase(0), duration);
    const double mean = c.dark_count_rate * duration;
    EXPECT_NEAR(double(s.count(Channel::alice_plus)), mean, 5 * std::sqrt(mean));
    EXPECT_NEAR(double(s.count(Channel::bob_plus)), mean, 5 * std::sqrt(mean));
    const auto h = analysis::singles_histogram(s);
    EXPECT_EQ(h[0].total() + h[1].total(), s.records.size());
}

TEST(SimulateRun, DeterministicAndThreadIndependent)
{
    ExperimentConfig c = ideal(5e-3);
    c.dark_count_rate = 1000;
    c.phase_jitter_rms = 0.1;
    const double d = pulses_to_seconds(c, 3.5 * sim::pulses_per_block);
    const auto a = sim::simulate_run(c, Phase(0.1), Phase(0.2), d, "r", 3, 1);
    const auto b = sim::simulate_run(c, Phase(0.1), Phase(0.2), d, "r", 3, 4);
    EXPECT_EQ(a.records, b.records);
    EXPECT_EQ(a.header.alice_phase_offset, b.header.alice_phase_offset);
    EXPECT_NE(a.header.alice_phase_offset, 0.0);
    c.seed = 2;
    const auto other = sim::simulate_run(c, Phase(0.1), Phase(0.2), d, "r", 3, 1);
    EXPECT_NE(a.records, other.records);
    const auto other_run = sim::simulate_run(ideal(5e-3), Phase(0.1), Phase(0.2), d, "r", 4, 1);
    EXPECT_NE(a.records, other_run.records);
}

TEST(SimulateRun, RejectsBadInput)
{
    EXPECT_THROW(sim::simulate_run(ideal(), Phase(0), Phase(0), 0.0), invalid_argument);
    ExperimentConfig c;
    c.visibility = 2;
    EXPECT_THROW(sim::simulate_run(c, Phase(0), Phase(0), 1e-3), invalid_argument);
}

TEST(SimulatePlan, LabelsAndStartTimes)
{
    ExperimentConfig c = ideal(1e-3);
    const auto plan = build_run_plan(optimal_chained_settings(3), Functional::chsh, 1e-4, 0.5);
    const auto streams = sim::simulate_plan(c, plan);
    ASSERT_EQ(streams.size(), 24u);
    for (std::size_t i = 0; i < plan.runs.size(); ++i) {
        EXPECT_EQ(streams[i].header.label, plan.runs[i].label);
        EXPECT_EQ(streams[i].header.alice_phase, plan.runs[i].alice_phase);
        EXPECT_EQ(streams[i].header.bob_phase, plan.runs[i].bob_phase);
        EXPECT_DOUBLE_EQ(streams[i].header.start_time, plan.start_time(i));
    }
    const auto again = sim::simulate_plan(c, plan, 3);
    for (std::size_t i = 0; i < streams.size(); ++i) EXPECT_EQ(again[i].records, streams[i].records);
}

TEST(SimulateRun, LhvAndQuantumSourcesMatchPerRun)
{
    ExperimentConfig q = ideal(1e-2);
    ExperimentConfig l = q;
    l.model = SourceModel::lhv;
    l.seed = 77;
    const auto settings = optimal_chained_settings(3);
    for (const auto& run : build_run_plan(settings, Functional::chsh, 0.01).runs) {
        const auto a = sim::simulate_run(q, run.alice_phase, run.bob_phase, run.duration, run.label);
        const auto b = sim::simulate_run(l, run.alice_phase, run.bob_phase, run.duration, run.label);
        EXPECT_EQ(b.header.model_id, lhv::model_id);
        const double ca = double(central(a)), cb = double(central(b));
        EXPECT_NEAR(ca, cb, 5 * std::sqrt(ca + cb + 1)) << run.label;
    }
}

TEST(SimulateRun, NoEarlyLateCrossCoincidences)
{
    ExperimentConfig c = ideal(1e-2);
    for (SourceModel m : {SourceModel::quantum, SourceModel::lhv}) {
        c.model = m;
        const auto s = sim::simulate_run(c, Phase(0.4), Phase(1.9), 0.02);
        const auto mat = analysis::slot_coincidences(s, c.coincidence_half_width);
        EXPECT_EQ(mat[0][2], 0u);
        EXPECT_EQ(mat[2][0], 0u);
        EXPECT_GT(mat[0][0], 0u);
        EXPECT_GT(mat[1][1], 0u);
    }
}
