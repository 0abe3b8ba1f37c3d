#ifndef TIMEBIN_SETTINGS_HPP
#define TIMEBIN_SETTINGS_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chain.hpp"
#include "errors.hpp"
#include "phase.hpp"

namespace timebin {

/// N phase settings per side for a chained Bell run.
class ChainedSettings {
public:
    ChainedSettings(std::vector<Phase> alice, std::vector<Phase> bob)
        : alice_(std::move(alice)), bob_(std::move(bob))
    {
        if (alice_.size() < 2) throw invalid_argument("chained settings need n >= 2");
        if (alice_.size() != bob_.size())
            throw invalid_argument("Alice and Bob must have the same number of settings");
    }

    int n() const noexcept { return static_cast<int>(alice_.size()); }
    const std::vector<Phase>& alice_phases() const noexcept { return alice_; }
    const std::vector<Phase>& bob_phases() const noexcept { return bob_; }

    /// 1-based accessors matching the A_k / B_j notation.
    Phase alice(int k) const { return alice_.at(static_cast<std::size_t>(k - 1)); }
    Phase bob(int j) const { return bob_.at(static_cast<std::size_t>(j - 1)); }

private:
    std::vector<Phase> alice_;
    std::vector<Phase> bob_;
};

/// Settings maximizing the chained functional for correlations cos(phiA + phiB).
///
/// Walk the chain A_1, B_2, A_3, ... up to index N, across the A_N B_N term,
/// and back down to ..., A_2, B_1; node m of that path sits at m * pi / (2N).
/// Alice's phase is the position, Bob's is minus the position, so every
/// positive term has phase sum +-pi/(2N) and A_1 B_1 has sum pi/(2N) - pi.
inline ChainedSettings optimal_chained_settings(int n)
{
    if (n < 2) throw invalid_argument("chained Bell test needs n >= 2 settings per side");
    const double step = pi / (2.0 * n);
    std::vector<Phase> alice, bob;
    for (int i = 1; i <= n; ++i) {
        const int a_pos = (i % 2 == 1) ? i - 1 : 2 * n - i;
        const int b_pos = (i % 2 == 0) ? i - 1 : 2 * n - i;
        alice.emplace_back(a_pos * step);
        bob.emplace_back(-b_pos * step);
    }
    return {std::move(alice), std::move(bob)};
}

enum class Functional { chsh, ch1, ch2, ch3, ch4 };

inline Functional functional_from_string(std::string_view s)
{
    if (s == "chsh") return Functional::chsh;
    if (s == "ch1") return Functional::ch1;
    if (s == "ch2") return Functional::ch2;
    if (s == "ch3") return Functional::ch3;
    if (s == "ch4") return Functional::ch4;
    throw invalid_argument("unknown functional '" + std::string(s) + "' (chsh, ch1..ch4)");
}

inline std::string to_string(Functional f)
{
    switch (f) {
    case Functional::chsh: return "chsh";
    case Functional::ch1: return "ch1";
    case Functional::ch2: return "ch2";
    case Functional::ch3: return "ch3";
    case Functional::ch4: return "ch4";
    }
    return "?";
}

/// One measurement run with the single "+" detector on each side.
/// Shifting a phase by pi turns that side's "+" port into the "-" outcome.
struct PlannedRun {
    Phase alice_phase;
    Phase bob_phase;
    double duration = 3.0;
    std::string label;
    TermIndex term;
    Sign alice_outcome = Sign::plus;
    Sign bob_outcome = Sign::plus;
};

struct RunPlan {
    std::vector<PlannedRun> runs;
    double stabilization_gap = 1.0;

    /// Run start time counting the stabilization gaps in between.
    double start_time(std::size_t i) const
    {
        double t = 0.0;
        for (std::size_t r = 0; r < i; ++r) t += runs.at(r).duration + stabilization_gap;
        return t;
    }
};

/// "A3B2_pm": term A_3 B_2, Alice "+" outcome, Bob "-" outcome.
inline std::string run_label(TermIndex t, Sign a, Sign b)
{
    return term_name(t) + "_" + (a == Sign::plus ? "p" : "m") + (b == Sign::plus ? "p" : "m");
}

struct ParsedLabel {
    TermIndex term;
    Sign alice;
    Sign bob;
};

inline std::optional<ParsedLabel> parse_run_label(std::string_view s)
{
    int a = 0, b = 0;
    std::size_t i = 0;
    auto number = [&](int& out) {
        std::size_t start = i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') out = out * 10 + (s[i++] - '0');
        return i > start;
    };
    if (i >= s.size() || s[i++] != 'A' || !number(a)) return std::nullopt;
    if (i >= s.size() || s[i++] != 'B' || !number(b)) return std::nullopt;
    if (s.size() != i + 3 || s[i] != '_') return std::nullopt;
    auto sign = [](char c) -> std::optional<Sign> {
        if (c == 'p') return Sign::plus;
        if (c == 'm') return Sign::minus;
        return std::nullopt;
    };
    auto sa = sign(s[i + 1]);
    auto sb = sign(s[i + 2]);
    if (!sa || !sb) return std::nullopt;
    return ParsedLabel{{a, b}, *sa, *sb};
}

inline PlannedRun make_run(const ChainedSettings& s, TermIndex t, Sign a, Sign b, double duration)
{
    PlannedRun r;
    r.alice_phase = s.alice(t.alice) + (a == Sign::minus ? pi : 0.0);
    r.bob_phase = s.bob(t.bob) + (b == Sign::minus ? pi : 0.0);
    r.duration = duration;
    r.label = run_label(t, a, b);
    r.term = t;
    r.alice_outcome = a;
    r.bob_outcome = b;
    return r;
}

/// Expands a functional into single-detector runs.
/// CHSH: four phase combinations per chained term. CH variant i: one run per
/// joint probability appearing in that variant.
inline RunPlan build_run_plan(const ChainedSettings& settings, Functional functional,
                              double run_duration = 3.0, double stabilization_gap = 1.0)
{
    if (!(run_duration > 0.0)) throw invalid_argument("run duration must be positive");
    if (!(stabilization_gap >= 0.0)) throw invalid_argument("stabilization gap must be >= 0");
    RunPlan plan;
    plan.stabilization_gap = stabilization_gap;
    for (const ChainedTerm& term : chained_terms(settings.n())) {
        if (functional == Functional::chsh) {
            for (Sign a : both_signs)
                for (Sign b : both_signs)
                    plan.runs.push_back(make_run(settings, term.index, a, b, run_duration));
        } else {
            const auto variant = ch_variant_from_int(static_cast<int>(functional));
            const auto [a, b] = ch_outcome(variant, term.role);
            plan.runs.push_back(make_run(settings, term.index, a, b, run_duration));
        }
    }
    return plan;
}

} // namespace timebin

#endif // TIMEBIN_SETTINGS_HPP
