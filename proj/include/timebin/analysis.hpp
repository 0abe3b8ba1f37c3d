#ifndef TIMEBIN_ANALYSIS_HPP
#define TIMEBIN_ANALYSIS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "bell.hpp"
#include "chain.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "settings.hpp"
#include "timetag.hpp"
#include "timing.hpp"

namespace timebin::analysis {

// ---------------------------------------------------------------------------
// Histograms

/// Counts per tick offset from the M-slot centre of each event's own pulse.
struct SinglesHistogram {
    Channel channel = Channel::alice_plus;
    std::int64_t min_offset = 0;
    std::vector<std::uint64_t> counts;

    std::uint64_t at(std::int64_t offset) const noexcept
    {
        const std::int64_t i = offset - min_offset;
        return (i < 0 || i >= static_cast<std::int64_t>(counts.size())) ? 0 : counts[static_cast<std::size_t>(i)];
    }

    std::uint64_t total() const noexcept
    {
        std::uint64_t s = 0;
        for (auto c : counts) s += c;
        return s;
    }

    /// Sum over [centre - half_width, centre + half_width].
    std::uint64_t window_sum(std::int64_t centre, int half_width) const noexcept
    {
        std::uint64_t s = 0;
        for (std::int64_t o = centre - half_width; o <= centre + half_width; ++o) s += at(o);
        return s;
    }
};

struct PeakWeights {
    std::uint64_t early = 0;
    std::uint64_t medium = 0;
    std::uint64_t late = 0;
};

/// Folds every record modulo the pulse period; one histogram per channel.
inline std::array<SinglesHistogram, 2> singles_histogram(const TimetagStream& s)
{
    const PulseClock clock(s.header.config);
    const std::int64_t span = clock.max_abs_offset();
    std::array<SinglesHistogram, 2> h;
    for (Channel c : {Channel::alice_plus, Channel::bob_plus}) {
        auto& hc = h[static_cast<int>(c)];
        hc.channel = c;
        hc.min_offset = -span;
        hc.counts.assign(static_cast<std::size_t>(2 * span + 1), 0);
    }
    for (const auto& r : s.records) {
        const std::int64_t o = std::clamp(clock.offset_of(r.tick), -span, span);
        ++h[static_cast<int>(r.channel)].counts[static_cast<std::size_t>(o + span)];
    }
    return h;
}

inline PeakWeights peak_weights(const SinglesHistogram& h, const PulseClock& clock, int half_width)
{
    const std::int64_t d = clock.slot_spacing_ticks();
    return {h.window_sum(-d, half_width), h.window_sum(0, half_width), h.window_sum(d, half_width)};
}

// ---------------------------------------------------------------------------
// Coincidences

struct CoincidenceWindow {
    int center_offset = 0; ///< ticks, relative to the M-slot centre
    int half_width = 5;    ///< ticks
};

struct CoincidenceResult {
    std::uint64_t central_count = 0;
    int max_delta = 0;                      ///< histogram spans [-max_delta, max_delta]
    std::vector<std::uint64_t> delta_tau;   ///< Bob tick minus Alice tick

    std::uint64_t delta_tau_at(int d) const noexcept
    {
        const int i = d + max_delta;
        return (i < 0 || i >= static_cast<int>(delta_tau.size())) ? 0 : delta_tau[static_cast<std::size_t>(i)];
    }
};

namespace detail {

struct PulseEvent {
    std::uint64_t pulse;
    std::uint64_t tick;
};

inline std::vector<PulseEvent> accepted_events(const TimetagStream& s, Channel c, const PulseClock& clock,
                                               std::int64_t centre, int half_width)
{
    std::vector<PulseEvent> out;
    for (const auto& r : s.records) {
        if (r.channel != c) continue;
        const std::int64_t o = clock.offset_of(r.tick) - centre;
        if (o >= -half_width && o <= half_width) out.push_back({clock.pulse_of(r.tick), r.tick});
    }
    return out;
}

/// Walks both pulse-sorted event lists and hands each shared pulse's groups to fn.
template <typename Fn>
void for_each_shared_pulse(const std::vector<PulseEvent>& a, const std::vector<PulseEvent>& b, Fn&& fn)
{
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].pulse < b[j].pulse) { ++i; continue; }
        if (b[j].pulse < a[i].pulse) { ++j; continue; }
        const std::uint64_t p = a[i].pulse;
        std::size_t ie = i, je = j;
        while (ie < a.size() && a[ie].pulse == p) ++ie;
        while (je < b.size() && b[je].pulse == p) ++je;
        fn(i, ie, j, je);
        i = ie;
        j = je;
    }
}

inline CoincidenceResult pair_events(const std::vector<PulseEvent>& alice, const std::vector<PulseEvent>& bob,
                                     int half_width)
{
    CoincidenceResult res;
    res.max_delta = 2 * half_width;
    res.delta_tau.assign(static_cast<std::size_t>(2 * res.max_delta + 1), 0);
    auto record = [&res](std::int64_t d) {
        ++res.central_count;
        ++res.delta_tau[static_cast<std::size_t>(d + res.max_delta)];
    };
    for_each_shared_pulse(alice, bob, [&](std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1) {
        if (i1 - i0 == 1 && j1 - j0 == 1) {
            record(static_cast<std::int64_t>(bob[j0].tick) - static_cast<std::int64_t>(alice[i0].tick));
            return;
        }
        // Greedy by |dtau|; ties go to the earlier Bob event, then the earlier Alice event.
        std::vector<std::tuple<std::int64_t, std::size_t, std::size_t>> cand;
        for (std::size_t i = i0; i < i1; ++i)
            for (std::size_t j = j0; j < j1; ++j) {
                const std::int64_t d = static_cast<std::int64_t>(bob[j].tick) - static_cast<std::int64_t>(alice[i].tick);
                cand.emplace_back(d < 0 ? -d : d, j, i);
            }
        std::sort(cand.begin(), cand.end());
        std::vector<bool> used_a(i1 - i0, false), used_b(j1 - j0, false);
        for (const auto& [abs_d, j, i] : cand) {
            if (used_a[i - i0] || used_b[j - j0]) continue;
            used_a[i - i0] = used_b[j - j0] = true;
            record(static_cast<std::int64_t>(bob[j].tick) - static_cast<std::int64_t>(alice[i].tick));
        }
    });
    return res;
}

} // namespace detail

/// Central-slot coincidences between Alice's and Bob's "+" detectors.
///
/// An event is accepted when it lies within half_width ticks of its pulse's
/// M-slot centre (shifted by center_offset). Accepted events from the same
/// pulse pair up, each event at most once, so |dtau| <= 2 * half_width.
inline CoincidenceResult count_coincidences(const TimetagStream& alice, const TimetagStream& bob,
                                            const CoincidenceWindow& window)
{
    if (alice.header.label != bob.header.label)
        throw invalid_argument("streams belong to different runs: '" + alice.header.label + "' vs '" +
                               bob.header.label + "'");
    if (window.half_width < 0) throw invalid_argument("coincidence half width must be >= 0");
    const PulseClock clock(alice.header.config);
    const auto a = detail::accepted_events(alice, Channel::alice_plus, clock, window.center_offset, window.half_width);
    const auto b = detail::accepted_events(bob, Channel::bob_plus, clock, window.center_offset, window.half_width);
    return detail::pair_events(a, b, window.half_width);
}

/// Same, for one merged stream holding both channels.
inline CoincidenceResult count_coincidences(const TimetagStream& merged, const CoincidenceWindow& window)
{
    return count_coincidences(merged, merged, window);
}

/// Splits a merged stream into (Alice-only, Bob-only) streams sharing its header.
inline std::pair<TimetagStream, TimetagStream> split_by_channel(const TimetagStream& s)
{
    std::pair<TimetagStream, TimetagStream> out{{s.header, {}}, {s.header, {}}};
    for (const auto& r : s.records) (r.channel == Channel::alice_plus ? out.first : out.second).records.push_back(r);
    return out;
}

/// Coincidences broken down by (Alice slot, Bob slot). Counts every pair of
/// accepted events sharing a pulse, without the one-use pairing rule.
using SlotMatrix = std::array<std::array<std::uint64_t, 3>, 3>;

inline SlotMatrix slot_coincidences(const TimetagStream& s, int half_width)
{
    const PulseClock clock(s.header.config);
    const std::int64_t d = clock.slot_spacing_ticks();
    SlotMatrix m{};
    std::array<std::vector<detail::PulseEvent>, 3> a, b;
    for (int slot = 0; slot < 3; ++slot) {
        a[slot] = detail::accepted_events(s, Channel::alice_plus, clock, (slot - 1) * d, half_width);
        b[slot] = detail::accepted_events(s, Channel::bob_plus, clock, (slot - 1) * d, half_width);
    }
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            detail::for_each_shared_pulse(a[x], b[y], [&](std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1) {
                m[x][y] += (i1 - i0) * (j1 - j0);
            });
    return m;
}

// ---------------------------------------------------------------------------
// Estimators

/// Outcome index order for four-run counts: (++, +-, -+, --).
inline constexpr std::size_t outcome_slot(Sign a, Sign b) noexcept
{
    return 2 * static_cast<std::size_t>(a) + static_cast<std::size_t>(b);
}

using FourRunCounts = std::array<std::uint64_t, 4>;

struct ProbabilityEstimate {
    double value = 0.0;
    double std_error = 0.0;
    FourRunCounts counts{};
    std::size_t target = 0;

    std::uint64_t total() const noexcept { return counts[0] + counts[1] + counts[2] + counts[3]; }
};

/// p = C_target / sum(C) over the four phase-shifted runs of one term.
inline ProbabilityEstimate estimate_probability(const FourRunCounts& counts, std::size_t target = 0)
{
    if (target > 3) throw invalid_argument("target run index must be 0..3");
    ProbabilityEstimate e;
    e.counts = counts;
    e.target = target;
    const double total = static_cast<double>(e.total());
    if (total <= 0.0) throw degenerate_data("all four run counts are zero");
    e.value = static_cast<double>(counts[target]) / total;
    e.std_error = std::sqrt(e.value * (1.0 - e.value) / total);
    return e;
}

/// Exact probability with no counting error attached.
inline ProbabilityEstimate exact_probability(double p)
{
    ProbabilityEstimate e;
    e.value = p;
    return e;
}

/// The four joint outcomes of one setting pair.
struct OutcomeEstimates {
    ProbabilityEstimate pp; ///< p(a b)
    ProbabilityEstimate mm; ///< p(abar bbar)
    ProbabilityEstimate mp; ///< p(abar b)
    ProbabilityEstimate pm; ///< p(a bbar)
};

inline OutcomeEstimates outcome_estimates(const FourRunCounts& c)
{
    return {estimate_probability(c, outcome_slot(Sign::plus, Sign::plus)),
            estimate_probability(c, outcome_slot(Sign::minus, Sign::minus)),
            estimate_probability(c, outcome_slot(Sign::minus, Sign::plus)),
            estimate_probability(c, outcome_slot(Sign::plus, Sign::minus))};
}

struct CorrelationEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// <AB> = p(++) + p(--) - p(+-) - p(-+) after renormalizing the four to sum 1.
/// Error from the multinomial covariance: var = (1 - E^2) / total counts.
inline CorrelationEstimate correlation_from_probabilities(const OutcomeEstimates& e)
{
    const double z = e.pp.value + e.mm.value + e.mp.value + e.pm.value;
    if (!(z > 0.0)) throw degenerate_data("outcome probabilities sum to zero");
    CorrelationEstimate c;
    c.value = (e.pp.value + e.mm.value - e.mp.value - e.pm.value) / z;
    const double total = static_cast<double>(e.pp.total());
    if (total > 0.0) c.std_error = std::sqrt(std::max(0.0, 1.0 - c.value * c.value) / total);
    return c;
}

// ---------------------------------------------------------------------------
// Fringe fit

struct FringePoint {
    Phase phase_sum;
    double coincidences = 0.0;
    double duration = 1.0;
};

struct FringeScan {
    std::vector<FringePoint> points;
};

struct FringeFit {
    double visibility = 0.0;
    double phase_offset = 0.0;  ///< phi0 in C(phi) = C0 (1 + V cos(phi + phi0))
    double amplitude = 0.0;     ///< C0 in counts per second
    double visibility_error = 0.0;
    double phase_offset_error = 0.0;
    double amplitude_error = 0.0;
    double contrast_visibility = 0.0; ///< (max - min) / (max + min) of the fitted curve
    double chi2 = 0.0;
    int iterations = 0;
};

namespace detail {

template <std::size_t N>
std::optional<std::array<double, N>> solve(std::array<std::array<double, N>, N> a, std::array<double, N> b)
{
    for (std::size_t c = 0; c < N; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < N; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-300) return std::nullopt;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = 0; r < N; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < N; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::array<double, N> x{};
    for (std::size_t i = 0; i < N; ++i) x[i] = b[i] / a[i][i];
    return x;
}

template <std::size_t N>
std::optional<std::array<std::array<double, N>, N>> invert(const std::array<std::array<double, N>, N>& a)
{
    std::array<std::array<double, N>, N> inv{};
    for (std::size_t c = 0; c < N; ++c) {
        std::array<double, N> e{};
        e[c] = 1.0;
        auto col = solve(a, e);
        if (!col) return std::nullopt;
        for (std::size_t r = 0; r < N; ++r) inv[r][c] = (*col)[r];
    }
    return inv;
}

} // namespace detail

/// Poisson-weighted least-squares fit of C(phi) = C0 (1 + V cos(phi + phi0)).
///
/// Starts from a weighted linear fit on (1, cos, sin), which is the DFT at
/// the fundamental for evenly spaced phases, then refines with
/// Levenberg-Marquardt using model-based weights 1/m_i and V = sin^2(u).
inline FringeFit fit_fringe(const FringeScan& scan)
{
    const auto& pts = scan.points;
    {
        std::vector<double> phases;
        for (const auto& p : pts) {
            if (!(p.duration > 0.0)) throw invalid_argument("fringe point duration must be positive");
            if (!(p.coincidences >= 0.0)) throw invalid_argument("fringe counts must be >= 0");
            phases.push_back(p.phase_sum.value());
        }
        std::sort(phases.begin(), phases.end());
        const auto distinct = std::unique(phases.begin(), phases.end(),
                                          [](double a, double b) { return std::abs(a - b) < 1e-12; }) - phases.begin();
        if (distinct < 4) throw invalid_argument("fringe fit needs at least 4 distinct phases");
    }

    const std::size_t n = pts.size();
    double total_counts = 0.0;
    for (const auto& p : pts) total_counts += p.coincidences;
    if (total_counts <= 0.0) throw degenerate_data("fringe scan has no counts");

    // Linear start: C_i ~ d_i (a + b cos phi + c sin phi), weights 1/max(C_i, 1).
    std::array<std::array<double, 3>, 3> ata{};
    std::array<double, 3> atb{};
    for (const auto& p : pts) {
        const double phi = p.phase_sum.value();
        const std::array<double, 3> row{p.duration, p.duration * std::cos(phi), p.duration * std::sin(phi)};
        const double w = 1.0 / std::max(p.coincidences, 1.0);
        for (int r = 0; r < 3; ++r) {
            atb[r] += w * row[r] * p.coincidences;
            for (int c = 0; c < 3; ++c) ata[r][c] += w * row[r] * row[c];
        }
    }
    auto lin = detail::solve(ata, atb);
    if (!lin || (*lin)[0] <= 0.0) throw fit_failure("fringe fit: degenerate linear start", "");
    double c0 = (*lin)[0];
    double v0 = std::hypot((*lin)[1], (*lin)[2]) / c0;
    double phi0 = std::atan2(-(*lin)[2], (*lin)[1]);
    double u = std::asin(std::sqrt(std::clamp(v0, 1e-6, 1.0 - 1e-6)));

    auto model = [&](double amp, double uu, double ph, const FringePoint& p) {
        const double v = std::sin(uu) * std::sin(uu);
        return p.duration * amp * (1.0 + v * std::cos(p.phase_sum.value() + ph));
    };
    const double weight_floor = 0.5;
    auto chi2_at = [&](double amp, double uu, double ph, const std::vector<double>& w) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = pts[i].coincidences - model(amp, uu, ph, pts[i]);
            s += r * r / w[i];
        }
        return s;
    };

    std::vector<double> w(n);
    double lambda = 1e-3;
    double chi2 = 0.0;
    int iter = 0;
    bool converged = false;
    for (; iter < 500; ++iter) {
        for (std::size_t i = 0; i < n; ++i) w[i] = std::max(model(c0, u, phi0, pts[i]), weight_floor);
        chi2 = chi2_at(c0, u, phi0, w);

        std::array<std::array<double, 3>, 3> jtj{};
        std::array<double, 3> jtr{};
        const double v = std::sin(u) * std::sin(u);
        for (std::size_t i = 0; i < n; ++i) {
            const double phi = pts[i].phase_sum.value() + phi0;
            const double d = pts[i].duration;
            const std::array<double, 3> g{d * (1.0 + v * std::cos(phi)),
                                          d * c0 * std::sin(2.0 * u) * std::cos(phi),
                                          -d * c0 * v * std::sin(phi)};
            const double r = pts[i].coincidences - model(c0, u, phi0, pts[i]);
            for (int a = 0; a < 3; ++a) {
                jtr[a] += g[a] * r / w[i];
                for (int b = 0; b < 3; ++b) jtj[a][b] += g[a] * g[b] / w[i];
            }
        }

        bool improved = false;
        for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
            auto damped = jtj;
            for (int a = 0; a < 3; ++a) damped[a][a] += lambda * std::max(jtj[a][a], 1e-300);
            auto step = detail::solve(damped, jtr);
            if (!step) { lambda *= 10.0; continue; }
            const double nc0 = c0 + (*step)[0], nu = u + (*step)[1], nphi = phi0 + (*step)[2];
            if (nc0 <= 0.0) { lambda *= 10.0; continue; }
            const double nchi2 = chi2_at(nc0, nu, nphi, w);
            if (nchi2 <= chi2) {
                const double rel = std::abs((*step)[0]) / c0 + std::abs((*step)[1]) + std::abs((*step)[2]);
                c0 = nc0; u = nu; phi0 = nphi;
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = true;
                if (rel < 1e-13 || chi2 - nchi2 <= 1e-15 * std::max(chi2, 1e-300)) converged = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!improved) converged = true; // no downhill step left: at a minimum along every damping
        if (converged) break;
    }
    if (!converged) {
        std::ostringstream diag;
        diag << "C0=" << c0 << " V=" << std::sin(u) * std::sin(u) << " phi0=" << phi0 << " chi2=" << chi2;
        throw fit_failure("fringe fit did not converge", diag.str());
    }

    FringeFit fit;
    fit.amplitude = c0;
    fit.visibility = std::sin(u) * std::sin(u);
    fit.phase_offset = angle_difference(phi0, 0.0);
    fit.iterations = iter + 1;
    for (std::size_t i = 0; i < n; ++i) w[i] = std::max(model(c0, u, phi0, pts[i]), weight_floor);
    fit.chi2 = chi2_at(c0, u, phi0, w);

    // Covariance in (C0, V, phi0) directly, so the V error stays finite at V = 0.
    std::array<std::array<double, 3>, 3> info{};
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = pts[i].phase_sum.value() + phi0;
        const double d = pts[i].duration;
        const std::array<double, 3> g{d * (1.0 + fit.visibility * std::cos(phi)), d * c0 * std::cos(phi),
                                      -d * c0 * fit.visibility * std::sin(phi)};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) info[a][b] += g[a] * g[b] / w[i];
    }
    if (auto cov = detail::invert(info)) {
        fit.amplitude_error = std::sqrt(std::max(0.0, (*cov)[0][0]));
        fit.visibility_error = std::sqrt(std::max(0.0, (*cov)[1][1]));
        fit.phase_offset_error = std::sqrt(std::max(0.0, (*cov)[2][2]));
    }
    const double hi = c0 * (1.0 + fit.visibility), lo = c0 * (1.0 - fit.visibility);
    fit.contrast_visibility = (hi - lo) / (hi + lo);
    return fit;
}

// ---------------------------------------------------------------------------
// Full pipeline

struct TermEstimate {
    TermIndex term;
    FourRunCounts counts{}; ///< (++, +-, -+, --)
    OutcomeEstimates probabilities;
    CorrelationEstimate correlation;
};

struct PipelineResult {
    int n = 2;
    CoincidenceWindow window;
    std::vector<TermEstimate> terms;
    std::array<bell::BellReport, 4> ch;
    bell::BellReport chsh;
    double chsh_from_correlations = 0.0;
    double ch_identity = 0.0;       ///< 4 S_CH,1 + 2(N - 1)
    double ch_identity_error = 0.0;
    std::vector<std::string> assumptions;
    std::vector<std::string> model_ids;
};

inline CoincidenceWindow default_window(const TimetagStream& s)
{
    return {0, s.header.config.coincidence_half_width};
}

/// Coincidence counts of many streams, in input order.
inline std::vector<std::uint64_t> central_counts(const std::vector<TimetagStream>& streams,
                                                 std::optional<CoincidenceWindow> window = std::nullopt,
                                                 unsigned threads = 1)
{
    std::vector<std::uint64_t> out(streams.size());
    parallel_for(streams.size(), threads, [&](std::size_t i) {
        out[i] = count_coincidences(streams[i], window.value_or(default_window(streams[i]))).central_count;
    });
    return out;
}

/// Counts -> probabilities -> CH forms and chained CHSH with propagated errors.
///
/// Uses the fair-sampling substitution of single-side probabilities by sums
/// of joint probabilities, and treats runs of different settings as independent.
inline PipelineResult full_pipeline(const std::vector<TimetagStream>& streams, const ChainedSettings& settings,
                                    std::optional<CoincidenceWindow> window = std::nullopt, unsigned threads = 1,
                                    double phase_tolerance = 1e-9)
{
    const int n = settings.n();
    std::map<std::string, std::size_t> by_label;
    for (std::size_t i = 0; i < streams.size(); ++i)
        if (!by_label.emplace(streams[i].header.label, i).second)
            throw invalid_argument("duplicate run label '" + streams[i].header.label + "'");

    const auto terms = chained_terms(n);
    std::vector<std::string> missing;
    for (const auto& t : terms)
        for (Sign a : both_signs)
            for (Sign b : both_signs) {
                const std::string label = run_label(t.index, a, b);
                if (!by_label.count(label)) missing.push_back(label);
            }
    if (!missing.empty()) {
        std::string msg = "run plan not covered, missing runs:";
        for (const auto& m : missing) msg += " " + m;
        throw invalid_argument(msg);
    }

    for (const auto& t : terms)
        for (Sign a : both_signs)
            for (Sign b : both_signs) {
                const PlannedRun want = make_run(settings, t.index, a, b, 1.0);
                const auto& h = streams[by_label.at(want.label)].header;
                if (std::abs(angle_difference(h.alice_phase.value(), want.alice_phase.value())) > phase_tolerance ||
                    std::abs(angle_difference(h.bob_phase.value(), want.bob_phase.value())) > phase_tolerance)
                    throw invalid_argument("run '" + want.label + "' phases do not match the chained settings");
            }

    const auto counts = central_counts(streams, window, threads);

    PipelineResult res;
    res.n = n;
    res.window = window.value_or(streams.empty() ? CoincidenceWindow{} : default_window(streams.front()));
    res.assumptions = {"fair-sampling: p(a_k) = p(a_k b_{k-1}) + p(a_k bbar_{k-1}), p(b_k) likewise",
                       "one '+' detector per side; four phase-shifted runs per correlation term",
                       "runs of different settings independent (no cross-term covariance)"};
    for (const auto& s : streams)
        if (std::find(res.model_ids.begin(), res.model_ids.end(), s.header.model_id) == res.model_ids.end())
            res.model_ids.push_back(s.header.model_id);

    bell::CorrelationSet corr(n);
    bell::ProbabilitySet probs(n);
    double chsh_var = 0.0;
    for (const auto& t : terms) {
        TermEstimate te;
        te.term = t.index;
        for (Sign a : both_signs)
            for (Sign b : both_signs) te.counts[outcome_slot(a, b)] = counts[by_label.at(run_label(t.index, a, b))];
        if (te.counts[0] + te.counts[1] + te.counts[2] + te.counts[3] == 0)
            throw degenerate_data("no coincidences in any run of term " + term_name(t.index));
        te.probabilities = outcome_estimates(te.counts);
        te.correlation = correlation_from_probabilities(te.probabilities);
        corr.set(t.index, te.correlation.value);
        chsh_var += te.correlation.std_error * te.correlation.std_error;
        for (Sign a : both_signs)
            for (Sign b : both_signs)
                probs.set(t.index, a, b, static_cast<double>(te.counts[outcome_slot(a, b)]) /
                                             static_cast<double>(te.probabilities.pp.total()));
        res.terms.push_back(te);
    }

    std::array<double, 4> ch_values{};
    for (ChVariant v : all_ch_variants) {
        const int i = static_cast<int>(v) - 1;
        double var = 0.0;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            const auto [a, b] = ch_outcome(v, terms[k].role);
            const auto e = estimate_probability(res.terms[k].counts, outcome_slot(a, b));
            var += e.std_error * e.std_error;
        }
        ch_values[i] = bell::ch_form(probs, v);
        const auto [lhv_bound, classical] = bell::ch_variant_bounds(n, v);
        const double err = std::sqrt(var);
        res.ch[i] = bell::report(ch_values[i], lhv_bound, err > 0 ? err : 1e-300,
                                 ch_tests_upper_bound(v) ? bell::BoundSense::upper : bell::BoundSense::lower,
                                 classical, "S_CH," + std::to_string(i + 1));
        res.ch[i].std_error = err;
    }

    const bell::Bounds b = bell::bounds(n);
    const double chsh_err = std::sqrt(chsh_var);
    res.chsh = bell::report(bell::chsh_from_ch(ch_values), b.timebin_chsh, chsh_err > 0 ? chsh_err : 1e-300,
                            bell::BoundSense::upper, b.classical_chsh, "S_CHSH");
    res.chsh.std_error = chsh_err;
    res.chsh_from_correlations = bell::chained_chsh(corr);
    res.ch_identity = 4.0 * ch_values[0] + 2.0 * (n - 1);
    res.ch_identity_error = 4.0 * res.ch[0].std_error;
    return res;
}

/// Fringe data from runs at arbitrary phases: phase sum, coincidences, duration.
inline FringeScan fringe_scan_from_streams(const std::vector<TimetagStream>& streams,
                                           std::optional<CoincidenceWindow> window = std::nullopt,
                                           unsigned threads = 1)
{
    const auto counts = central_counts(streams, window, threads);
    FringeScan scan;
    for (std::size_t i = 0; i < streams.size(); ++i) {
        const auto& h = streams[i].header;
        scan.points.push_back({Phase(h.alice_phase.value() + h.bob_phase.value()),
                               static_cast<double>(counts[i]), h.duration});
    }
    return scan;
}

// ---------------------------------------------------------------------------
// Output

inline nlohmann::json to_json(const bell::BellReport& r)
{
    return {{"name", r.name},
            {"statistic", r.statistic},
            {"lhv_bound", r.lhv_bound},
            {"classical_bound", r.classical_bound},
            {"std_error", r.std_error},
            {"violation_sigma", r.violation_sigma},
            {"bound_sense", r.sense == bell::BoundSense::upper ? "upper" : "lower"}};
}

inline nlohmann::json to_json(const PipelineResult& r)
{
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : r.terms)
        terms.push_back({{"term", term_name(t.term)},
                         {"counts", {{"pp", t.counts[0]}, {"pm", t.counts[1]}, {"mp", t.counts[2]}, {"mm", t.counts[3]}}},
                         {"correlation", t.correlation.value},
                         {"correlation_error", t.correlation.std_error}});
    nlohmann::json ch = nlohmann::json::array();
    for (const auto& c : r.ch) ch.push_back(to_json(c));
    return {{"n", r.n},
            {"coincidence_window", {{"center_offset", r.window.center_offset}, {"half_width", r.window.half_width}}},
            {"chsh", to_json(r.chsh)},
            {"ch_forms", ch},
            {"chsh_from_correlations", r.chsh_from_correlations},
            {"ch_identity", r.ch_identity},
            {"ch_identity_error", r.ch_identity_error},
            {"terms", terms},
            {"assumptions", r.assumptions},
            {"model_ids", r.model_ids}};
}

/// Rows i = 1..4 plus the S_CHSH row: i, S_LHV, S, err_S, violation sigma.
inline std::string table1_csv(const PipelineResult& r)
{
    std::ostringstream os;
    os.precision(6);
    os << "i,S_LHV,S,err_S,violation_sigma\n";
    for (int i = 0; i < 4; ++i)
        os << i + 1 << ',' << r.ch[i].lhv_bound << ',' << r.ch[i].statistic << ',' << r.ch[i].std_error << ','
           << r.ch[i].violation_sigma << '\n';
    os << "S_CHSH," << r.chsh.lhv_bound << ',' << r.chsh.statistic << ',' << r.chsh.std_error << ','
       << r.chsh.violation_sigma << '\n';
    return os.str();
}

inline std::string singles_csv(const std::array<SinglesHistogram, 2>& h)
{
    std::ostringstream os;
    os << "offset_ticks,alice_plus,bob_plus\n";
    for (std::size_t i = 0; i < h[0].counts.size(); ++i)
        os << h[0].min_offset + static_cast<std::int64_t>(i) << ',' << h[0].counts[i] << ',' << h[1].counts[i] << '\n';
    return os.str();
}

inline std::string delta_tau_csv(const CoincidenceResult& c)
{
    std::ostringstream os;
    os << "delta_tau_ticks,coincidences\n";
    for (int d = -c.max_delta; d <= c.max_delta; ++d) os << d << ',' << c.delta_tau_at(d) << '\n';
    return os.str();
}

inline std::string fringe_csv(const FringeScan& s)
{
    std::ostringstream os;
    os.precision(10);
    os << "phase_sum,coincidences,duration\n";
    for (const auto& p : s.points) os << p.phase_sum.value() << ',' << p.coincidences << ',' << p.duration << '\n';
    return os.str();
}

} // namespace timebin::analysis

#endif // TIMEBIN_ANALYSIS_HPP
