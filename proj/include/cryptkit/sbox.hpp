#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace cryptkit::sbox {

inline constexpr unsigned kMaxVars = 6;

/// Truth table of a Boolean function of n <= 6 variables; bit x of `table`
/// is f(x), and variable x_j is bit j - 1 of the input.
struct BooleanFn {
    unsigned n = 0;
    std::uint64_t table = 0;

    bool at(std::uint32_t x) const noexcept { return (table >> x) & 1u; }
};

/// F : GF(2)^n -> GF(2)^n as a lookup table; coordinate f_k is bit k - 1
/// of the output.
struct VectorBooleanFn {
    unsigned n = 0;
    std::vector<std::uint32_t> values;

    BooleanFn coordinate(unsigned k) const;
};

/// Throws Errc::InvalidArgument for j outside 1..n.
bool essentially_depends(const BooleanFn& f, unsigned j);
/// Algebraic normal form coefficients: bit u is the coefficient of the
/// monomial prod_{j in u} x_j.
std::uint64_t anf(const BooleanFn& f);
bool anf_mentions(const BooleanFn& f, unsigned j);
bool is_balanced(const BooleanFn& f);

bool is_permutation(const VectorBooleanFn& F);
/// Every nonzero linear combination of coordinates is balanced.
bool all_components_balanced(const VectorBooleanFn& F);
/// Every coordinate essentially depends on every variable.
bool is_super_dependent(const VectorBooleanFn& F);

/// x -> perm(F(x ^ c)), where output bit i of perm(y) is bit out_perm[i] of y.
VectorBooleanFn rearrange(const VectorBooleanFn& F, const std::vector<unsigned>& out_perm, std::uint32_t c);

/// Exhaustive count over all (2^n)! permutations in lexicographic order.
/// Throws Errc::TooLarge for n >= 4.
std::uint64_t count_super_dependent_exact(unsigned n, unsigned threads = 1);

/// Balanced n-variable functions depending on all n variables, by the
/// inclusion-exclusion recurrence with |H(0)| = 0. 0 <= k <= 20.
mpz_class h_count(unsigned k);
/// Same count by brute force over all 2^(2^k) functions (k <= 4).
std::uint64_t h_count_bruteforce(unsigned k);

/// Permutations whose first coordinate misses some variable.
mpz_class a1_size(unsigned n);
/// (2^n! - n|A_1|, 2^n! - |A_1|), 1 <= n <= 8.
std::pair<mpz_class, mpz_class> s_bounds(unsigned n);
/// C(2^(n-1), 2^(n-2)), a lower bound for the intersection term d(n, k).
mpz_class d_lower_bound(unsigned n);

struct McEstimate {
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
    double fraction = 0.0;
    double lo = 0.0;  ///< 95% normal-approximation interval
    double hi = 0.0;
};

/// Uniform random permutations (Fisher-Yates) tested for super-dependence.
/// Samples are drawn in chunks with per-chunk seeds, so the result does not
/// depend on the thread count. n <= 6.
McEstimate s_estimate_monte_carlo(unsigned n, std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

} // namespace cryptkit::sbox
