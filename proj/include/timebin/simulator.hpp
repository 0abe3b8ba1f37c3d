#ifndef TIMEBIN_SIMULATOR_HPP
#define TIMEBIN_SIMULATOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "lhv.hpp"
#include "outcome.hpp"
#include "parallel.hpp"
#include "quantum.hpp"
#include "rng.hpp"
#include "settings.hpp"
#include "timetag.hpp"
#include "timing.hpp"

namespace timebin::sim {

inline constexpr const char* quantum_model_id = "quantum-timebin-analytic-v1";
inline constexpr std::uint64_t pulses_per_block = 1u << 20;

inline std::string model_id(SourceModel m) { return m == SourceModel::quantum ? quantum_model_id : lhv::model_id; }

namespace detail {

enum StreamPurpose : std::uint64_t { jitter = 1, pulses = 2, darks = 3 };

/// Inverse-CDF sampler over the 36 joint outcome cells.
class JointSampler {
public:
    explicit JointSampler(const JointOutcomeTable& t)
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < outcome_count * outcome_count; ++i) {
            acc += t.p[i / outcome_count][i % outcome_count];
            cumulative_[i] = acc;
        }
        for (double& c : cumulative_) c /= acc;
    }

    std::pair<SlotSign, SlotSign> draw(Rng& rng) const noexcept
    {
        const double u = rng.uniform();
        std::size_t i = 0;
        // Strict comparison never selects zero-weight cells.
        while (i + 1 < cumulative_.size() && !(u < cumulative_[i])) ++i;
        return {SlotSign::from_index(i / outcome_count), SlotSign::from_index(i % outcome_count)};
    }

private:
    std::array<double, outcome_count * outcome_count> cumulative_{};
};

inline void sort_records(std::vector<TimetagRecord>& records)
{
    std::sort(records.begin(), records.end(), [](const TimetagRecord& a, const TimetagRecord& b) {
        return a.tick != b.tick ? a.tick < b.tick : a.channel < b.channel;
    });
}

} // namespace detail

/// One run at fixed phase settings.
///
/// Each pump pulse emits a pair with probability pair_prob_per_pulse. The
/// joint (slot, sign) outcome comes from the quantum table or from the LHV
/// strategies. A side records a click only for a "+" outcome, and then with
/// its detector efficiency; the "-" port is unobserved. Dark counts are
/// Poisson and uniform in time. The result is identical for any `threads`.
inline TimetagStream simulate_run(const ExperimentConfig& config, Phase alice_phase, Phase bob_phase,
                                  double duration, std::string label = {}, std::uint64_t run_index = 0,
                                  unsigned threads = 1)
{
    config.validate();
    if (!(duration > 0.0)) throw invalid_argument("run duration must be positive");

    const PulseClock clock(config);
    const auto pulses = static_cast<std::uint64_t>(std::floor(duration * config.rep_rate));
    const std::uint64_t seed = config.seed;

    TimetagStream stream;
    StreamHeader& h = stream.header;
    h.config = config;
    h.label = std::move(label);
    h.alice_phase = alice_phase;
    h.bob_phase = bob_phase;
    h.duration = duration;
    h.run_index = run_index;
    h.model_id = model_id(config.model);

    Rng jitter_rng(seed, {run_index, detail::jitter});
    h.alice_phase_offset = config.phase_jitter_rms * jitter_rng.normal();
    h.bob_phase_offset = config.phase_jitter_rms * jitter_rng.normal();
    const Phase alice_eff = alice_phase + h.alice_phase_offset;
    const Phase bob_eff = bob_phase + h.bob_phase_offset;

    const detail::JointSampler sampler(
        quantum::joint_table(quantum::StateModel(config.visibility), alice_eff, bob_eff));
    const bool use_lhv = config.model == SourceModel::lhv;
    const double eta_a = config.detector_efficiency.alice;
    const double eta_b = config.detector_efficiency.bob;
    const double p_pair = config.pair_prob_per_pulse;

    const std::uint64_t blocks = (pulses + pulses_per_block - 1) / pulses_per_block;
    std::vector<std::vector<TimetagRecord>> block_records(blocks);
    std::vector<std::uint64_t> block_pairs(blocks, 0);

    parallel_for(blocks, threads, [&](std::size_t b) {
        Rng rng(seed, {run_index, detail::pulses, b});
        const std::uint64_t begin = b * pulses_per_block;
        const std::uint64_t end = std::min(pulses, begin + pulses_per_block);
        auto& out = block_records[b];
        std::uint64_t pulse = begin;
        for (;;) {
            const std::uint64_t gap = rng.geometric(p_pair);
            if (gap >= end - pulse) break;
            pulse += gap;
            SlotSign a, o;
            if (use_lhv) {
                const lhv::HiddenVariable lambda = lhv::sample(rng);
                a = lhv::alice_outcome(lambda, alice_eff);
                o = lhv::bob_outcome(lambda, bob_eff);
            } else {
                std::tie(a, o) = sampler.draw(rng);
            }
            const double ua = rng.uniform();
            const double ub = rng.uniform();
            ++block_pairs[b];
            if (a.sign == Sign::plus && ua < eta_a)
                out.push_back({Channel::alice_plus, clock.slot_tick(pulse, a.slot)});
            if (o.sign == Sign::plus && ub < eta_b)
                out.push_back({Channel::bob_plus, clock.slot_tick(pulse, o.slot)});
            if (++pulse >= end) break;
        }
    });

    std::size_t total = 0;
    for (const auto& r : block_records) total += r.size();
    stream.records.reserve(total);
    for (std::size_t b = 0; b < blocks; ++b) {
        stream.records.insert(stream.records.end(), block_records[b].begin(), block_records[b].end());
        h.generated_pairs += block_pairs[b];
    }

    if (config.dark_count_rate > 0.0) {
        for (Channel c : {Channel::alice_plus, Channel::bob_plus}) {
            Rng rng(seed, {run_index, detail::darks, static_cast<std::uint64_t>(c)});
            std::poisson_distribution<std::uint64_t> count(config.dark_count_rate * duration);
            const std::uint64_t n = count(rng);
            for (std::uint64_t i = 0; i < n; ++i) stream.records.push_back({c, clock.tick_of(rng.uniform() * duration)});
        }
    }
    detail::sort_records(stream.records);
    return stream;
}

/// One stream per planned run, each on its own random substream keyed by run index.
inline std::vector<TimetagStream> simulate_plan(const ExperimentConfig& config, const RunPlan& plan,
                                                unsigned threads = 1)
{
    std::vector<TimetagStream> streams;
    streams.reserve(plan.runs.size());
    for (std::size_t i = 0; i < plan.runs.size(); ++i) {
        const PlannedRun& r = plan.runs[i];
        streams.push_back(simulate_run(config, r.alice_phase, r.bob_phase, r.duration, r.label, i, threads));
        streams.back().header.start_time = plan.start_time(i);
    }
    return streams;
}

} // namespace timebin::sim

#endif // TIMEBIN_SIMULATOR_HPP
