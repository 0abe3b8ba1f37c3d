#ifndef TIMEBIN_LHV_HPP
#define TIMEBIN_LHV_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "outcome.hpp"
#include "parallel.hpp"
#include "phase.hpp"
#include "rng.hpp"

// Local hidden-variable model reproducing the time-bin quantum joint table
// for static settings.
//
// lambda = (theta, r_a, r_b, r_c, r_d), all uniform and independent.
// Alice:  r_a < 1/4 -> E, r_a >= 3/4 -> L, sign from r_d; otherwise M with
//         sign of cos(theta + phiA).
// Bob:    M with sign of cos(phiB - theta) when r_b <= (pi/4)|cos(phiB - theta)|,
//         otherwise E (r_a < 1/2) or L (r_a >= 1/2), sign from r_c.
// <|cos|> = 2/pi fixes the pi/4 amplitude so Bob lands in M half the time.

namespace timebin::lhv {

inline constexpr const char* model_id = "lhv-timebin-5c-v1";

struct HiddenVariable {
    double theta = 0.0;
    double r_a = 0.0;
    double r_b = 0.0;
    double r_c = 0.0;
    double r_d = 0.0;
};

inline constexpr double bob_acceptance_amplitude = pi / 4.0;

inline HiddenVariable sample(Rng& rng) noexcept
{
    HiddenVariable h;
    h.theta = two_pi * rng.uniform();
    h.r_a = rng.uniform();
    h.r_b = rng.uniform();
    h.r_c = rng.uniform();
    h.r_d = rng.uniform();
    return h;
}

inline constexpr Sign sign_of_positive(bool positive) noexcept
{
    return positive ? Sign::plus : Sign::minus;
}

/// Alice's deterministic outcome; reads only lambda and her own phase.
inline SlotSign alice_outcome(const HiddenVariable& h, Phase alice) noexcept
{
    if (h.r_a < 0.25) return {Slot::early, sign_of_positive(h.r_d < 0.5)};
    if (h.r_a >= 0.75) return {Slot::late, sign_of_positive(h.r_d < 0.5)};
    return {Slot::medium, sign_of_positive(std::cos(h.theta + alice.value()) > 0.0)};
}

/// Bob's deterministic outcome; reads only lambda and his own phase.
inline SlotSign bob_outcome(const HiddenVariable& h, Phase bob) noexcept
{
    const double c = std::cos(bob.value() - h.theta);
    if (h.r_b <= bob_acceptance_amplitude * std::abs(c))
        return {Slot::medium, sign_of_positive(c > 0.0)};
    return {h.r_a < 0.5 ? Slot::early : Slot::late, sign_of_positive(h.r_c < 0.5)};
}

/// Hidden-variable integral of every outcome indicator.
///
/// The r components are integrated in closed form. theta uses the midpoint
/// rule on the sub-intervals between zeros of cos(theta + phiA) and
/// cos(phiB - theta), where the integrand is smooth, with `resolution` points
/// shared out in proportion to sub-interval length.
inline JointOutcomeTable lhv_table_oracle(Phase alice, Phase bob, int resolution)
{
    if (resolution < 64) throw invalid_argument("oracle resolution must be >= 64");

    std::vector<double> cuts{0.0, two_pi};
    for (int m = 0; m < 2; ++m) {
        cuts.push_back(normalize_angle(pi / 2.0 - alice.value() + m * pi));
        cuts.push_back(normalize_angle(bob.value() - pi / 2.0 + m * pi));
    }
    std::sort(cuts.begin(), cuts.end());

    JointOutcomeTable t;
    auto add = [&t](SlotSign a, SlotSign b, double w) { t(a, b) += w; };
    const SlotSign e_plus{Slot::early, Sign::plus}, e_minus{Slot::early, Sign::minus};
    const SlotSign l_plus{Slot::late, Sign::plus}, l_minus{Slot::late, Sign::minus};

    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double lo = cuts[c], hi = cuts[c + 1];
        const double len = hi - lo;
        if (len <= 0.0) continue;
        const int points = std::max(1, static_cast<int>(std::lround(resolution * len / two_pi)));
        const double h = len / points;
        for (int i = 0; i < points; ++i) {
            const double theta = lo + (i + 0.5) * h;
            // Each quarter of r_a carries weight 1/4 of this theta slice.
            const double w = 0.25 * h / two_pi;
            const SlotSign a_m{Slot::medium, sign_of_positive(std::cos(theta + alice.value()) > 0.0)};
            const double cb = std::cos(bob.value() - theta);
            const SlotSign b_m{Slot::medium, sign_of_positive(cb > 0.0)};
            const double q = bob_acceptance_amplitude * std::abs(cb);
            const double miss = 1.0 - q;

            // r_a in [0, 1/4): Alice E (sign from r_d), Bob M or E.
            for (SlotSign a : {e_plus, e_minus}) {
                add(a, b_m, w * 0.5 * q);
                add(a, e_plus, w * 0.25 * miss);
                add(a, e_minus, w * 0.25 * miss);
            }
            // r_a in [1/4, 1/2): Alice M, Bob M or E.
            add(a_m, b_m, w * q);
            add(a_m, e_plus, w * 0.5 * miss);
            add(a_m, e_minus, w * 0.5 * miss);
            // r_a in [1/2, 3/4): Alice M, Bob M or L.
            add(a_m, b_m, w * q);
            add(a_m, l_plus, w * 0.5 * miss);
            add(a_m, l_minus, w * 0.5 * miss);
            // r_a in [3/4, 1): Alice L, Bob M or L.
            for (SlotSign a : {l_plus, l_minus}) {
                add(a, b_m, w * 0.5 * q);
                add(a, l_plus, w * 0.25 * miss);
                add(a, l_minus, w * 0.25 * miss);
            }
        }
    }
    return t;
}

/// Monte Carlo frequencies and their binomial standard errors.
struct MonteCarloTable {
    JointOutcomeTable frequency;
    JointOutcomeTable std_error;
    std::array<std::array<std::uint64_t, outcome_count>, outcome_count> counts{};
    std::uint64_t samples = 0;
};

inline constexpr std::uint64_t montecarlo_batch = 1u << 20;

/// Samples lambda uniformly and tallies both parties' outcomes.
/// Batches of 2^20 samples draw from their own substream, so the result
/// depends only on (samples, seed), never on `threads`.
inline MonteCarloTable lhv_montecarlo_table(Phase alice, Phase bob, std::uint64_t samples,
                                            std::uint64_t seed, unsigned threads = 1)
{
    if (samples < 1) throw invalid_argument("need at least one Monte Carlo sample");
    const std::uint64_t batches = (samples + montecarlo_batch - 1) / montecarlo_batch;
    using Counts = std::array<std::array<std::uint64_t, outcome_count>, outcome_count>;
    std::vector<Counts> partial(batches);

    parallel_for(batches, threads, [&](std::size_t b) {
        Rng rng(seed, {0x1a5u, b});
        const std::uint64_t begin = b * montecarlo_batch;
        const std::uint64_t end = std::min(samples, begin + montecarlo_batch);
        Counts c{};
        for (std::uint64_t i = begin; i < end; ++i) {
            const HiddenVariable h = sample(rng);
            ++c[alice_outcome(h, alice).index()][bob_outcome(h, bob).index()];
        }
        partial[b] = c;
    });

    MonteCarloTable out;
    out.samples = samples;
    for (const Counts& c : partial)
        for (std::size_t i = 0; i < outcome_count; ++i)
            for (std::size_t j = 0; j < outcome_count; ++j) out.counts[i][j] += c[i][j];
    const double n = static_cast<double>(samples);
    for (std::size_t i = 0; i < outcome_count; ++i)
        for (std::size_t j = 0; j < outcome_count; ++j) {
            const double f = static_cast<double>(out.counts[i][j]) / n;
            out.frequency.p[i][j] = f;
            out.std_error.p[i][j] = std::sqrt(f * (1.0 - f) / n);
        }
    return out;
}

} // namespace timebin::lhv

#endif // TIMEBIN_LHV_HPP
