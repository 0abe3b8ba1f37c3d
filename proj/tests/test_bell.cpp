#include <gtest/gtest.h>

#include <random>

#include <timebin/bell.hpp>
#include <timebin/quantum.hpp>
#include <timebin/settings.hpp>

#include "oracles.hpp"

using namespace timebin;
using namespace timebin::bell;

namespace {

oracle::Distribution quantum_distribution(int n, double v)
{
    const auto s = optimal_chained_settings(n);
    oracle::Distribution d{n, {}};
    for (const auto& t : chained_terms(n)) {
        const auto q = medium_medium_conditional(
            oracle::interferometer_table(v, s.alice(t.index.alice).value(), s.bob(t.index.bob).value()));
        d.p[t.index] = q;
    }
    return d;
}

CorrelationSet filled(int n, double value)
{
    CorrelationSet c(n);
    for (const auto& t : chained_terms(n)) c.set(t.index, value);
    return c;
}

std::array<double, 4> ch_values(const ProbabilitySet& p)
{
    return {ch_form(p, 1), ch_form(p, 2), ch_form(p, 3), ch_form(p, 4)};
}

} // namespace

TEST(Chsh, AlgebraicMaximum)
{
    CorrelationSet c(2);
    c.set({1, 1}, 1);
    c.set({2, 2}, -1);
    c.set({2, 1}, 1);
    c.set({1, 2}, 1);
    EXPECT_DOUBLE_EQ(chsh(c), 4.0);
    EXPECT_DOUBLE_EQ(chsh(filled(2, 0.0)), 0.0);
    EXPECT_THROW(chsh(filled(3, 0.0)), invalid_argument);
}

TEST(Chsh, QuantumOptimalIsTsirelson)
{
    // Standard CHSH is the chained functional with settings 1 and 2 swapped on both sides.
    const auto d = quantum_distribution(2, 1.0);
    CorrelationSet swapped(2);
    for (const auto& [t, q] : d.p) swapped.set({3 - t.alice, 3 - t.bob}, d.correlation(t));
    EXPECT_NEAR(chsh(swapped), 2 * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(chained_chsh(d.correlations()), 2 * std::sqrt(2.0), 1e-12);
}

TEST(ChainedChsh, Values)
{
    EXPECT_NEAR(chained_chsh(quantum_distribution(3, 1.0).correlations()), 5.196, 1e-3);
    for (int n = 2; n <= 7; ++n) {
        CorrelationSet c = filled(n, 1.0);
        c.set({1, 1}, -1.0);
        EXPECT_DOUBLE_EQ(chained_chsh(c), 2.0 * n);
        EXPECT_NEAR(chained_chsh(quantum_distribution(n, 0.9).correlations()), 0.9 * quantum::qm_chained_chsh(n), 1e-12);
    }
}

TEST(CorrelationSet, Validation)
{
    CorrelationSet c(3);
    EXPECT_THROW(c.set({1, 3}, 0.0), invalid_argument);
    EXPECT_THROW(c.set({2, 2}, 0.0), invalid_argument);
    EXPECT_THROW(c.set({1, 2}, 1.5), invalid_argument);
    EXPECT_THROW(chained_chsh(c), invalid_argument);
    EXPECT_THROW(CorrelationSet(1), invalid_argument);
}

TEST(ChForm, QuantumOptimal)
{
    EXPECT_NEAR(ch_form(quantum_distribution(3, 1.0).probabilities(), 1), 0.2990, 1e-4);
    EXPECT_NEAR(ch_form(quantum_distribution(5, 1.0).probabilities(), 1), 0.3776, 1e-4);
    EXPECT_NEAR(ch_form(quantum_distribution(4, 1.0).probabilities(), ChVariant::plain), quantum::qm_chained_ch(4), 1e-12);
}

TEST(ChForm, ZeroProbabilities)
{
    ProbabilitySet p(3);
    for (const auto& t : chained_terms(3))
        for (Sign a : both_signs)
            for (Sign b : both_signs) p.set(t.index, a, b, 0.0);
    for (int v = 1; v <= 4; ++v) EXPECT_DOUBLE_EQ(ch_form(p, v), 0.0);
    EXPECT_THROW(ch_form(p, 5), invalid_argument);
    EXPECT_THROW(ch_form(ProbabilitySet(3), 1), invalid_argument);
}

TEST(ChForm, VariantsAreOutcomeRelabelings)
{
    std::mt19937_64 gen(5);
    const auto d = oracle::random_distribution(4, gen);
    auto relabeled = [&](bool fa, bool fb) {
        oracle::Distribution r = d;
        for (auto& [t, q] : r.p) {
            const auto o = d.p.at(t);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) q[a][b] = o[fa ? 1 - a : a][fb ? 1 - b : b];
        }
        return ch_form(r.probabilities(), 1);
    };
    const auto p = d.probabilities();
    EXPECT_NEAR(ch_form(p, 2), relabeled(true, false), 1e-15);
    EXPECT_NEAR(ch_form(p, 3), relabeled(false, true), 1e-15);
    EXPECT_NEAR(ch_form(p, 4), relabeled(true, true), 1e-15);
}

TEST(ChshFromCh, VariantsSumToConstant)
{
    // A constant term in the reconstruction would be degenerate with sum_i S_CH,i.
    std::mt19937_64 gen(17);
    for (int n = 2; n <= 6; ++n) {
        const auto ch = ch_values(oracle::random_distribution(n, gen).probabilities());
        EXPECT_NEAR(ch[0] + ch[1] + ch[2] + ch[3], 2.0 - 2.0 * n, 1e-12);
    }
}

TEST(ChshFromCh, LeastSquaresCalibrationRecoversCoefficients)
{
    // Fit S = sum c_i S_CH,i over arbitrary (signaling) distributions by normal equations.
    for (int n : {2, 3, 5}) {
        std::mt19937_64 gen(100 + n);
        std::array<std::array<double, 4>, 4> ata{};
        std::array<double, 4> atb{};
        double rss_scale = 0;
        std::vector<std::pair<std::array<double, 4>, double>> rows;
        for (int s = 0; s < 100; ++s) {
            const auto d = oracle::random_distribution(n, gen);
            const auto ch = ch_values(d.probabilities());
            const double y = chained_chsh(d.correlations());
            rows.emplace_back(ch, y);
            rss_scale += y * y;
            for (int i = 0; i < 4; ++i) {
                atb[i] += ch[i] * y;
                for (int j = 0; j < 4; ++j) ata[i][j] += ch[i] * ch[j];
            }
        }
        for (int c = 0; c < 4; ++c) {
            int piv = c;
            for (int r = c + 1; r < 4; ++r)
                if (std::abs(ata[r][c]) > std::abs(ata[piv][c])) piv = r;
            std::swap(ata[c], ata[piv]);
            std::swap(atb[c], atb[piv]);
            for (int r = 0; r < 4; ++r) {
                if (r == c) continue;
                const double f = ata[r][c] / ata[c][c];
                for (int k = 0; k < 4; ++k) ata[r][k] -= f * ata[c][k];
                atb[r] -= f * atb[c];
            }
        }
        std::array<double, 4> coef{};
        for (int i = 0; i < 4; ++i) {
            coef[i] = atb[i] / ata[i][i];
            EXPECT_NEAR(coef[i], chsh_from_ch_coefficients[i], 1e-9) << "n=" << n << " i=" << i;
        }
        double rss = 0;
        for (const auto& [ch, y] : rows) {
            double fit = 0;
            for (int i = 0; i < 4; ++i) fit += coef[i] * ch[i];
            rss += (fit - y) * (fit - y);
        }
        EXPECT_LT(rss, 1e-18 * rss_scale);
    }
}

TEST(ChshFromCh, ExactOnArbitraryDistributions)
{
    std::mt19937_64 gen(42);
    for (int n = 2; n <= 6; ++n)
        for (int s = 0; s < 20; ++s) {
            const auto d = oracle::random_distribution(n, gen);
            EXPECT_NEAR(chsh_from_ch(ch_values(d.probabilities())), chained_chsh(d.correlations()), 1e-12);
        }
}

TEST(ChshFromCh, CollapsesToSingleChOnNoSignaling)
{
    std::mt19937_64 gen(43);
    for (int s = 0; s < 100; ++s) {
        const int n = 2 + s % 5;
        const auto d = oracle::random_no_signaling(n, gen);
        const auto ch = ch_values(d.probabilities());
        EXPECT_NEAR(4 * ch[0] + 2 * (n - 1), chained_chsh(d.correlations()), 1e-12);
        EXPECT_NEAR(ch[0], ch[3], 1e-12);
        EXPECT_NEAR(ch[1], ch[2], 1e-12);
    }
}

TEST(ChshFromCh, ReportedTableValues)
{
    EXPECT_NEAR(chsh_from_ch({0.289, -2.335, -2.247, 0.293}), 5.163, 0.01);
    EXPECT_NEAR(chsh_from_ch({0.282, -3.299, -3.284, 0.302}), 7.169, 0.01);
    EXPECT_NEAR(chsh_from_ch({0.307, -4.304, -4.331, 0.327}), 9.271, 0.01);
    EXPECT_NEAR(chsh_from_ch(ch_values(quantum_distribution(4, 1.0).probabilities())), 7.391, 1e-3);
}

TEST(Bounds, Values)
{
    EXPECT_EQ(bounds(2).timebin_chsh, 3);
    EXPECT_EQ(bounds(3).timebin_chsh, 5);
    EXPECT_EQ(bounds(3).classical_chsh, 4);
    EXPECT_EQ(bounds(5).ch.upper, 0.25);
    EXPECT_EQ(bounds(5).ch.lower, 0.75 - 5);
    EXPECT_EQ(bounds(4).ch_ll.lower, -3);
    EXPECT_EQ(bounds(4).ch_ee.upper, 0.5);
    EXPECT_EQ(bounds(4).ch_ee.lower, 0.5 - 4);
    EXPECT_EQ(bounds(6).trivial_ee_chsh, 12);
    EXPECT_THROW(bounds(1), invalid_argument);
    EXPECT_EQ(ch_variant_bounds(3, ChVariant::flip_alice).first, -2.25);
    EXPECT_EQ(ch_variant_bounds(3, ChVariant::flip_both).first, 0.25);
    EXPECT_EQ(ch_variant_bounds(3, ChVariant::plain).second, 0.0);
}

TEST(Bounds, EnumerationMatchesBruteForce)
{
    for (int n = 2; n <= 5; ++n) {
        EXPECT_EQ(verify_classical_bound_by_enumeration(n), 2.0 * n - 2) << n;
        EXPECT_EQ(verify_classical_bound_by_enumeration(n), oracle::brute_force_classical(n)) << n;
    }
    EXPECT_EQ(verify_classical_bound_by_enumeration(6, 3), 10.0);
    EXPECT_THROW(verify_classical_bound_by_enumeration(7), invalid_argument);
}

TEST(Report, Sigmas)
{
    EXPECT_NEAR(report(5.163, 5, 0.033).violation_sigma, 4.94, 0.01);
    EXPECT_NEAR(report(9.271, 9, 0.031).violation_sigma, 8.74, 0.01);
    EXPECT_EQ(report(3.0, 3.0, 0.1).violation_sigma, 0.0);
    EXPECT_FALSE(report(3.0, 3.0, 0.1).violated());
    const auto low = report(-2.335, -2.25, 0.020, BoundSense::lower);
    EXPECT_NEAR(low.violation_sigma, 4.25, 1e-9);
    EXPECT_TRUE(low.violated());
    EXPECT_THROW(report(1, 1, 0.0), invalid_argument);
}
