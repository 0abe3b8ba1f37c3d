// Independent reference computations used only by the tests.
#ifndef TIMEBIN_TESTS_ORACLES_HPP
#define TIMEBIN_TESTS_ORACLES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include <timebin/bell.hpp>
#include <timebin/outcome.hpp>

namespace oracle {

using cd = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

/// Amplitude for a photon in emission bin x (0 = early, 1 = late) to leave an
/// unbalanced interferometer with phase phi through port s (+1 / -1) in slot t.
inline cd arm_amplitude(int x, int t, int s, double phi)
{
    if (t == x) return 0.5;                                 // short arm
    if (t == x + 1) return 0.5 * s * std::polar(1.0, phi); // long arm
    return 0.0;
}

/// rho = V |psi><psi| + (1 - V)/2 (|EE><EE| + |LL><LL|), psi = (|EE> + |LL>)/sqrt 2.
inline timebin::JointOutcomeTable interferometer_table(double v, double phi_a, double phi_b)
{
    using namespace timebin;
    JointOutcomeTable t;
    for (int ta = 0; ta < 3; ++ta)
        for (int sa = 0; sa < 2; ++sa)
            for (int tb = 0; tb < 3; ++tb)
                for (int sb = 0; sb < 2; ++sb) {
                    const int pa = sa == 0 ? 1 : -1, pb = sb == 0 ? 1 : -1;
                    cd coherent = 0.0;
                    double incoherent = 0.0;
                    for (int x = 0; x < 2; ++x) {
                        const cd a = arm_amplitude(x, ta, pa, phi_a) * arm_amplitude(x, tb, pb, phi_b);
                        coherent += a / std::sqrt(2.0);
                        incoherent += 0.5 * std::norm(a);
                    }
                    t(SlotSign{static_cast<Slot>(ta), static_cast<Sign>(sa)},
                      SlotSign{static_cast<Slot>(tb), static_cast<Sign>(sb)}) =
                        v * std::norm(coherent) + (1.0 - v) * incoherent;
                }
    return t;
}

/// Chained functional written out term by term from a correlation function.
template <typename Corr>
double chained_sum(int n, Corr&& e)
{
    double s = e(n, n) - e(1, 1);
    for (int k = 2; k <= n; ++k) s += e(k, k - 1) + e(k - 1, k);
    return s;
}

/// Max chained value over deterministic strategies, by nested assignment vectors.
inline double brute_force_classical(int n)
{
    double best = -1e9;
    std::vector<int> a(n), b(n);
    const int total = 1 << n;
    for (int ma = 0; ma < total; ++ma)
        for (int mb = 0; mb < total; ++mb) {
            for (int k = 0; k < n; ++k) {
                a[k] = (ma >> k) & 1 ? -1 : 1;
                b[k] = (mb >> k) & 1 ? -1 : 1;
            }
            best = std::max(best, chained_sum(n, [&](int k, int j) { return double(a[k - 1] * b[j - 1]); }));
        }
    return best;
}

/// Per-setting-pair outcome distribution p[(k,j)][a][b], for chained pairs.
struct Distribution {
    int n;
    std::map<timebin::TermIndex, std::array<std::array<double, 2>, 2>> p;

    double correlation(timebin::TermIndex t) const
    {
        const auto& q = p.at(t);
        return q[0][0] + q[1][1] - q[0][1] - q[1][0];
    }

    timebin::bell::ProbabilitySet probabilities() const
    {
        timebin::bell::ProbabilitySet s(n);
        for (const auto& [t, q] : p)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) s.set(t, static_cast<timebin::Sign>(a), static_cast<timebin::Sign>(b), q[a][b]);
        return s;
    }

    timebin::bell::CorrelationSet correlations() const
    {
        timebin::bell::CorrelationSet c(n);
        for (const auto& [t, q] : p) c.set(t, correlation(t));
        return c;
    }
};

/// No-signaling: random marginals per setting, joint within the Frechet bounds.
inline Distribution random_no_signaling(int n, std::mt19937_64& gen)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> pa(n + 1), pb(n + 1);
    for (int k = 1; k <= n; ++k) { pa[k] = u(gen); pb[k] = u(gen); }
    Distribution d{n, {}};
    for (const auto& term : timebin::chained_terms(n)) {
        const double x = pa[term.index.alice], y = pb[term.index.bob];
        const double lo = std::max(0.0, x + y - 1.0), hi = std::min(x, y);
        const double pp = lo + u(gen) * (hi - lo);
        d.p[term.index] = {{{pp, x - pp}, {y - pp, 1.0 - x - y + pp}}};
    }
    return d;
}

/// Arbitrary normalized distribution per setting pair (signaling allowed).
inline Distribution random_distribution(int n, std::mt19937_64& gen)
{
    std::exponential_distribution<double> e(1.0);
    Distribution d{n, {}};
    for (const auto& term : timebin::chained_terms(n)) {
        std::array<double, 4> w{e(gen), e(gen), e(gen), e(gen)};
        const double z = w[0] + w[1] + w[2] + w[3];
        d.p[term.index] = {{{w[0] / z, w[1] / z}, {w[2] / z, w[3] / z}}};
    }
    return d;
}

} // namespace oracle

#endif
