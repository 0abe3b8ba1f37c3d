#ifndef TIMEBIN_CHAIN_HPP
#define TIMEBIN_CHAIN_HPP

#include <compare>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "outcome.hpp"

namespace timebin {

/// Setting pair (A_alice, B_bob), both 1-based.
struct TermIndex {
    int alice = 1;
    int bob = 1;
    friend constexpr auto operator<=>(const TermIndex&, const TermIndex&) = default;
};

/// Position of a term inside the chained functional.
enum class TermRole {
    closing,   ///< <A_N B_N>
    descending, ///< <A_k B_{k-1}>
    ascending, ///< <A_{k-1} B_k>
    negated,   ///< <A_1 B_1>, the only term entering with a minus sign
};

struct ChainedTerm {
    TermIndex index;
    TermRole role;
    int sign() const noexcept { return role == TermRole::negated ? -1 : 1; }
};

/// The 2N terms A_N B_N, {A_k B_{k-1}, A_{k-1} B_k}_{k=2..N}, A_1 B_1 in that order.
inline std::vector<ChainedTerm> chained_terms(int n)
{
    if (n < 2) throw invalid_argument("chained Bell test needs n >= 2 settings per side");
    std::vector<ChainedTerm> terms;
    terms.reserve(2 * static_cast<std::size_t>(n));
    terms.push_back({{n, n}, TermRole::closing});
    for (int k = 2; k <= n; ++k) {
        terms.push_back({{k, k - 1}, TermRole::descending});
        terms.push_back({{k - 1, k}, TermRole::ascending});
    }
    terms.push_back({{1, 1}, TermRole::negated});
    return terms;
}

inline std::string term_name(TermIndex t)
{
    return "A" + std::to_string(t.alice) + "B" + std::to_string(t.bob);
}

/// The four relabelings of the CH-form chained functional.
///
/// Variant 1 is the fair-sampling CH form. Variants 2, 3 and 4 swap the
/// +1/-1 labels of Alice, of Bob, and of both, respectively.
enum class ChVariant { plain = 1, flip_alice = 2, flip_bob = 3, flip_both = 4 };

inline constexpr ChVariant all_ch_variants[] = {ChVariant::plain, ChVariant::flip_alice,
                                                ChVariant::flip_bob, ChVariant::flip_both};

inline ChVariant ch_variant_from_int(int v)
{
    if (v < 1 || v > 4) throw invalid_argument("CH variant must be 1..4");
    return static_cast<ChVariant>(v);
}

/// Outcome pair (Alice sign, Bob sign) whose joint probability a CH variant uses for a term.
inline constexpr std::pair<Sign, Sign> ch_outcome(ChVariant v, TermRole role) noexcept
{
    // Variant 1: p(a_N b_N) - sum[p(a_k bbar_{k-1}) + p(abar_{k-1} b_k)] - p(a_1 b_1)
    std::pair<Sign, Sign> base{Sign::plus, Sign::plus};
    if (role == TermRole::descending) base = {Sign::plus, Sign::minus};
    if (role == TermRole::ascending) base = {Sign::minus, Sign::plus};
    if (v == ChVariant::flip_alice || v == ChVariant::flip_both) base.first = flip(base.first);
    if (v == ChVariant::flip_bob || v == ChVariant::flip_both) base.second = flip(base.second);
    return base;
}

/// Whether LHV violation of a variant shows up above its upper bound (variants
/// 1, 4) or below its lower bound (variants 2, 3) for the quantum-optimal settings.
inline constexpr bool ch_tests_upper_bound(ChVariant v) noexcept
{
    return v == ChVariant::plain || v == ChVariant::flip_both;
}

} // namespace timebin

#endif // TIMEBIN_CHAIN_HPP
