#ifndef TIMEBIN_BELL_HPP
#define TIMEBIN_BELL_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chain.hpp"
#include "errors.hpp"
#include "parallel.hpp"

namespace timebin::bell {

/// Correlations <A_k B_j> on the chained index pairs only.
class CorrelationSet {
public:
    explicit CorrelationSet(int n) : n_(n)
    {
        if (n < 2) throw invalid_argument("chained Bell test needs n >= 2 settings per side");
    }

    int n() const noexcept { return n_; }

    void set(TermIndex t, double value)
    {
        if (!is_chained(t))
            throw invalid_argument(term_name(t) + " is not a chained term for n=" + std::to_string(n_));
        if (!(value >= -1.0 && value <= 1.0))
            throw invalid_argument("correlation " + term_name(t) + " outside [-1, 1]");
        values_[t] = value;
    }

    double at(TermIndex t) const
    {
        auto it = values_.find(t);
        if (it == values_.end()) throw invalid_argument("missing correlation " + term_name(t));
        return it->second;
    }

    bool contains(TermIndex t) const { return values_.count(t) != 0; }

    bool is_chained(TermIndex t) const noexcept
    {
        const int k = t.alice, j = t.bob;
        if (k < 1 || j < 1 || k > n_ || j > n_) return false;
        return k == j ? (k == 1 || k == n_) : (k - j == 1 || j - k == 1);
    }

private:
    int n_;
    std::map<TermIndex, double> values_;
};

/// Joint probabilities p(a_k b_j) for chosen (term, Alice sign, Bob sign).
class ProbabilitySet {
public:
    explicit ProbabilitySet(int n) : n_(n)
    {
        if (n < 2) throw invalid_argument("chained Bell test needs n >= 2 settings per side");
    }

    int n() const noexcept { return n_; }

    void set(TermIndex t, Sign a, Sign b, double p)
    {
        if (!(p >= 0.0 && p <= 1.0))
            throw invalid_argument("probability for " + term_name(t) + " outside [0, 1]");
        values_[{t, a, b}] = p;
    }

    double at(TermIndex t, Sign a, Sign b) const
    {
        auto it = values_.find({t, a, b});
        if (it == values_.end())
            throw invalid_argument("missing probability p(" + term_name(t) + ", " +
                                   (a == Sign::plus ? "+" : "-") + (b == Sign::plus ? "+" : "-") + ")");
        return it->second;
    }

private:
    struct Key {
        TermIndex term;
        Sign a;
        Sign b;
        friend auto operator<=>(const Key&, const Key&) = default;
    };
    int n_;
    std::map<Key, double> values_;
};

/// Standard CHSH value <A1B1> - <A2B2> + <A2B1> + <A1B2>.
inline double chsh(const CorrelationSet& c)
{
    if (c.n() != 2) throw invalid_argument("chsh needs exactly n = 2");
    return c.at({1, 1}) - c.at({2, 2}) + c.at({2, 1}) + c.at({1, 2});
}

/// Chained functional <A_N B_N> + sum_{k=2..N}[<A_k B_{k-1}> + <A_{k-1} B_k>] - <A_1 B_1>.
inline double chained_chsh(const CorrelationSet& c)
{
    double s = 0.0;
    for (const ChainedTerm& t : chained_terms(c.n())) s += t.sign() * c.at(t.index);
    return s;
}

/// CH-form chained functional for one of the four outcome relabelings.
inline double ch_form(const ProbabilitySet& p, ChVariant variant)
{
    double s = 0.0;
    for (const ChainedTerm& t : chained_terms(p.n())) {
        const auto [a, b] = ch_outcome(variant, t.role);
        s += (t.role == TermRole::closing ? 1.0 : -1.0) * p.at(t.index, a, b);
    }
    return s;
}

inline double ch_form(const ProbabilitySet& p, int variant)
{
    return ch_form(p, ch_variant_from_int(variant));
}

/// Coefficients of S_CH,1..4 reconstructing the chained CHSH statistic.
/// Fixed by least-squares calibration against chained_chsh on random
/// distributions (see tests/test_bell.cpp).
inline constexpr std::array<double, 4> chsh_from_ch_coefficients{1.0, -1.0, -1.0, 1.0};

inline double chsh_from_ch(const std::array<double, 4>& ch) noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) s += chsh_from_ch_coefficients[i] * ch[i];
    return s;
}

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

struct Bounds {
    int n = 2;
    double classical_chsh = 0.0;  ///< 2N - 2, static LL subensemble / standard Bell test
    double timebin_chsh = 0.0;    ///< 2N - 1, average of LL and trivial EE bound
    double trivial_ee_chsh = 0.0; ///< 2N, term count
    Interval ch;                  ///< [3/4 - N, 1/4]
    Interval ch_ll;               ///< [1 - N, 0]
    Interval ch_ee;               ///< [1/2 - N, 1/2]
};

inline Bounds bounds(int n)
{
    if (n < 2) throw invalid_argument("chained Bell test needs n >= 2 settings per side");
    const double N = n;
    Bounds b;
    b.n = n;
    b.classical_chsh = 2 * N - 2;
    b.trivial_ee_chsh = 2 * N;
    b.timebin_chsh = 0.5 * (b.classical_chsh + b.trivial_ee_chsh);
    b.ch_ll = {1 - N, 0.0};
    b.ch_ee = {0.5 - N, 0.5};
    b.ch = {0.5 * (b.ch_ll.lower + b.ch_ee.lower), 0.5 * (b.ch_ll.upper + b.ch_ee.upper)};
    return b;
}

/// Maximum of the chained functional over all deterministic +-1 strategies.
/// Bit k of an Alice (Bob) mask set means A_k (B_k) = -1.
inline double verify_classical_bound_by_enumeration(int n, unsigned threads = 1)
{
    if (n < 2 || n > 6) throw invalid_argument("enumeration supports 2 <= n <= 6");
    const auto terms = chained_terms(n);
    const std::uint32_t strategies = 1u << n;
    std::vector<int> best(strategies, -1000);

    parallel_for(strategies, threads, [&](std::size_t alice_mask) {
        int local = -1000;
        for (std::uint32_t bob_mask = 0; bob_mask < strategies; ++bob_mask) {
            int s = 0;
            for (const ChainedTerm& t : terms) {
                const int a = (alice_mask >> (t.index.alice - 1)) & 1u;
                const int b = (bob_mask >> (t.index.bob - 1)) & 1u;
                s += t.sign() * ((a ^ b) ? -1 : 1);
            }
            local = std::max(local, s);
        }
        best[alice_mask] = local;
    });
    int m = -1000;
    for (int v : best) m = std::max(m, v);
    return m;
}

enum class BoundSense { upper, lower };

/// Bell statistic against a bound, with significance in standard errors.
struct BellReport {
    std::string name;
    double statistic = 0.0;
    double lhv_bound = 0.0;
    double classical_bound = 0.0;
    double std_error = 0.0;
    double violation_sigma = 0.0;
    BoundSense sense = BoundSense::upper;

    bool violated() const noexcept { return violation_sigma > 0.0; }
};

/// violation_sigma = (statistic - bound) / std_error for upper bounds, negated for lower.
inline BellReport report(double statistic, double lhv_bound, double std_error,
                         BoundSense sense = BoundSense::upper, double classical_bound = NAN,
                         std::string name = {})
{
    if (!(std_error > 0.0)) throw invalid_argument("std_error must be positive");
    BellReport r;
    r.name = std::move(name);
    r.statistic = statistic;
    r.lhv_bound = lhv_bound;
    r.classical_bound = classical_bound;
    r.std_error = std_error;
    r.sense = sense;
    const double excess = sense == BoundSense::upper ? statistic - lhv_bound : lhv_bound - statistic;
    r.violation_sigma = excess / std_error;
    return r;
}

/// LHV and classical bound on CH variant `v` in its violation direction.
inline std::pair<double, double> ch_variant_bounds(int n, ChVariant v)
{
    const Bounds b = bounds(n);
    return ch_tests_upper_bound(v) ? std::pair{b.ch.upper, b.ch_ll.upper}
                                   : std::pair{b.ch.lower, b.ch_ll.lower};
}

} // namespace timebin::bell

#endif // TIMEBIN_BELL_HPP
