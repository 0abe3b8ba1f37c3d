#ifndef TIMEBIN_COMMANDS_HPP
#define TIMEBIN_COMMANDS_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "bell.hpp"
#include "config.hpp"
#include "lhv.hpp"
#include "quantum.hpp"
#include "settings.hpp"
#include "simulator.hpp"

namespace timebin {

// ---------------------------------------------------------------------------
// predict

struct Prediction {
    int n = 2;
    double visibility = 1.0;
    double s_qm = 0.0;
    double s_lhv = 0.0;
    double s_classical = 0.0;
    bell::Interval ch_lhv;
    double ch_qm = 0.0;
    double expected = 0.0; ///< V * S_QM
    double critical_visibility = 0.0;
    bool violation_possible = false;
    bool violation_expected = false;

    std::string verdict() const
    {
        if (!violation_possible) return "no violation possible";
        return violation_expected ? "violation expected" : "no violation expected";
    }
};

inline Prediction predict(int n, double visibility)
{
    quantum::StateModel state(visibility);
    const bell::Bounds b = bell::bounds(n);
    Prediction p;
    p.n = n;
    p.visibility = state.visibility();
    p.s_qm = quantum::qm_chained_chsh(n);
    p.s_lhv = b.timebin_chsh;
    p.s_classical = b.classical_chsh;
    p.ch_lhv = b.ch;
    p.ch_qm = quantum::qm_chained_ch(n);
    p.expected = visibility * p.s_qm;
    p.critical_visibility = quantum::critical_visibility(n);
    p.violation_possible = p.s_qm > p.s_lhv;
    p.violation_expected = p.expected > p.s_lhv;
    return p;
}

// ---------------------------------------------------------------------------
// lhv-verify

struct LhvVerification {
    int resolution = 0;
    double tolerance = 0.0;
    double max_deviation = 0.0;
    double max_el_cell = 0.0; ///< largest E-L / L-E cell, exactly 0 by construction
    Phase worst_alice{0.0};
    Phase worst_bob{0.0};
    std::size_t grid_points = 0;

    bool passed() const noexcept { return max_deviation < tolerance && max_el_cell == 0.0; }
};

/// n evenly spaced phases on [0, 2 pi).
inline std::vector<Phase> phase_grid(int n)
{
    if (n < 1) throw invalid_argument("phase grid needs at least one point");
    std::vector<Phase> g;
    for (int i = 0; i < n; ++i) g.emplace_back(two_pi * i / n);
    return g;
}

/// Oracle table against the V = 1 quantum table on every (alice, bob) grid pair.
inline LhvVerification verify_lhv(int resolution, const std::vector<Phase>& grid, double tolerance = 1e-6,
                                  unsigned threads = 1)
{
    const quantum::StateModel pure(1.0);
    std::vector<double> dev(grid.size() * grid.size()), el(grid.size() * grid.size());
    parallel_for(dev.size(), threads, [&](std::size_t k) {
        const Phase a = grid[k / grid.size()], b = grid[k % grid.size()];
        const JointOutcomeTable t = lhv::lhv_table_oracle(a, b, resolution);
        dev[k] = t.max_abs_difference(quantum::joint_table(pure, a, b));
        double m = 0.0;
        for (Sign x : both_signs)
            for (Sign y : both_signs)
                m = std::max({m, t({Slot::early, x}, {Slot::late, y}), t({Slot::late, x}, {Slot::early, y})});
        el[k] = m;
    });
    LhvVerification v;
    v.resolution = resolution;
    v.tolerance = tolerance;
    v.grid_points = dev.size();
    for (std::size_t k = 0; k < dev.size(); ++k) {
        v.max_el_cell = std::max(v.max_el_cell, el[k]);
        if (dev[k] > v.max_deviation) {
            v.max_deviation = dev[k];
            v.worst_alice = grid[k / grid.size()];
            v.worst_bob = grid[k % grid.size()];
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// reproduce-table1

struct ReproductionResult {
    ExperimentConfig config;
    double run_duration = 3.0;
    analysis::PipelineResult pipeline;
    std::uint64_t total_records = 0;
};

/// Simulate every CHSH run of the optimal chained settings and analyze them.
inline ReproductionResult reproduce_table1(int n, const ExperimentConfig& base, double run_duration = 3.0,
                                           unsigned threads = 1)
{
    const ChainedSettings settings = optimal_chained_settings(n);
    const RunPlan plan = build_run_plan(settings, Functional::chsh, run_duration);
    ReproductionResult r;
    r.config = base;
    r.run_duration = run_duration;
    const auto streams = sim::simulate_plan(base, plan, threads);
    for (const auto& s : streams) r.total_records += s.records.size();
    r.pipeline = analysis::full_pipeline(streams, settings, std::nullopt, threads);
    return r;
}

} // namespace timebin

#endif // TIMEBIN_COMMANDS_HPP
