#include "cryptkit/sbox.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <numeric>
#include <thread>

#include "cryptkit/error.hpp"
#include "cryptkit/rng.hpp"

namespace cryptkit::sbox {

namespace {

void check_vars(unsigned n)
{
    if (n > kMaxVars) {
        throw Error(Errc::InvalidArgument, "at most 6 variables");
    }
}

/// Bit j set when some coordinate value changes on flipping input bit j,
/// per coordinate: result[j] is the OR of F(x) ^ F(x ^ e_j).
bool super_dependent_table(const std::uint32_t* v, unsigned n)
{
    const std::uint32_t size = std::uint32_t{1} << n;
    const std::uint32_t full = size - 1;
    for (unsigned j = 0; j < n; ++j) {
        std::uint32_t seen = 0;
        const std::uint32_t e = std::uint32_t{1} << j;
        for (std::uint32_t x = 0; x < size && seen != full; ++x) {
            seen |= v[x] ^ v[x ^ e];
        }
        if (seen != full) {
            return false;
        }
    }
    return true;
}

mpz_class factorial(unsigned long n)
{
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

mpz_class binom(unsigned long n, unsigned long k)
{
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

constexpr std::uint64_t kChunk = 4096;

} // namespace

BooleanFn VectorBooleanFn::coordinate(unsigned k) const
{
    if (k < 1 || k > n) {
        throw Error(Errc::InvalidArgument, "coordinate index out of range");
    }
    check_vars(n);
    BooleanFn f{n, 0};
    for (std::uint32_t x = 0; x < values.size(); ++x) {
        if ((values[x] >> (k - 1)) & 1u) {
            f.table |= std::uint64_t{1} << x;
        }
    }
    return f;
}

bool essentially_depends(const BooleanFn& f, unsigned j)
{
    check_vars(f.n);
    if (j < 1 || j > f.n) {
        throw Error(Errc::InvalidArgument, "variable index out of range");
    }
    const std::uint32_t e = std::uint32_t{1} << (j - 1);
    for (std::uint32_t x = 0; x < (std::uint32_t{1} << f.n); ++x) {
        if (f.at(x) != f.at(x ^ e)) {
            return true;
        }
    }
    return false;
}

std::uint64_t anf(const BooleanFn& f)
{
    check_vars(f.n);
    const std::uint32_t size = std::uint32_t{1} << f.n;
    std::vector<std::uint8_t> a(size);
    for (std::uint32_t x = 0; x < size; ++x) {
        a[x] = f.at(x);
    }
    for (std::uint32_t step = 1; step < size; step <<= 1) {
        for (std::uint32_t x = 0; x < size; ++x) {
            if (x & step) {
                a[x] ^= a[x ^ step];
            }
        }
    }
    std::uint64_t out = 0;
    for (std::uint32_t u = 0; u < size; ++u) {
        out |= std::uint64_t{a[u]} << u;
    }
    return out;
}

bool anf_mentions(const BooleanFn& f, unsigned j)
{
    if (j < 1 || j > f.n) {
        throw Error(Errc::InvalidArgument, "variable index out of range");
    }
    const std::uint64_t coeffs = anf(f);
    for (std::uint32_t u = 0; u < (std::uint32_t{1} << f.n); ++u) {
        if (((coeffs >> u) & 1u) && ((u >> (j - 1)) & 1u)) {
            return true;
        }
    }
    return false;
}

bool is_balanced(const BooleanFn& f)
{
    check_vars(f.n);
    if (f.n == 0) {
        return false;
    }
    const std::uint64_t mask = f.n == 6 ? ~std::uint64_t{0} : (std::uint64_t{1} << (1u << f.n)) - 1;
    return static_cast<unsigned>(std::popcount(f.table & mask)) == (1u << f.n) / 2;
}

bool is_permutation(const VectorBooleanFn& F)
{
    const std::size_t size = std::size_t{1} << F.n;
    if (F.values.size() != size) {
        return false;
    }
    std::vector<bool> seen(size, false);
    for (auto v : F.values) {
        if (v >= size || seen[v]) {
            return false;
        }
        seen[v] = true;
    }
    return true;
}

bool all_components_balanced(const VectorBooleanFn& F)
{
    const std::uint32_t size = std::uint32_t{1} << F.n;
    for (std::uint32_t c = 1; c < size; ++c) {
        std::uint32_t ones = 0;
        for (auto v : F.values) {
            ones += std::popcount(v & c) & 1u;
        }
        if (ones != size / 2) {
            return false;
        }
    }
    return true;
}

bool is_super_dependent(const VectorBooleanFn& F)
{
    if (F.values.size() != (std::size_t{1} << F.n)) {
        throw Error(Errc::InvalidArgument, "table must have 2^n entries");
    }
    return F.n > 0 && super_dependent_table(F.values.data(), F.n);
}

VectorBooleanFn rearrange(const VectorBooleanFn& F, const std::vector<unsigned>& out_perm, std::uint32_t c)
{
    if (out_perm.size() != F.n) {
        throw Error(Errc::InvalidArgument, "output permutation must have n entries");
    }
    VectorBooleanFn out{F.n, std::vector<std::uint32_t>(F.values.size())};
    for (std::uint32_t x = 0; x < F.values.size(); ++x) {
        const std::uint32_t y = F.values[x ^ c];
        std::uint32_t z = 0;
        for (unsigned i = 0; i < F.n; ++i) {
            z |= ((y >> out_perm[i]) & 1u) << i;
        }
        out.values[x] = z;
    }
    return out;
}

std::uint64_t count_super_dependent_exact(unsigned n, unsigned threads)
{
    if (n >= 4) {
        throw Error(Errc::TooLarge, "exhaustive count limited to n <= 3");
    }
    if (n == 0) {
        return 0;
    }
    const std::uint32_t size = std::uint32_t{1} << n;
    // Partition by the first table entry; each worker walks its block of
    // the lexicographic order.
    threads = std::clamp(threads, 1u, size);
    std::vector<std::uint64_t> counts(size, 0);
    auto work = [&](std::uint32_t first) {
        std::vector<std::uint32_t> perm(size);
        std::iota(perm.begin(), perm.end(), 0u);
        std::rotate(perm.begin(), perm.begin() + first, perm.begin() + first + 1);
        std::uint64_t c = 0;
        do {
            c += super_dependent_table(perm.data(), n);
        } while (std::next_permutation(perm.begin() + 1, perm.end()));
        counts[first] = c;
    };
    std::vector<std::thread> pool;
    std::atomic<std::uint32_t> next{0};
    auto runner = [&] {
        for (std::uint32_t f = next++; f < size; f = next++) {
            work(f);
        }
    };
    if (threads == 1) {
        runner();
    } else {
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(runner);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

mpz_class h_count(unsigned k)
{
    if (k > 20) {
        throw Error(Errc::InvalidArgument, "h_count supports k <= 20");
    }
    std::vector<mpz_class> h(k + 1);
    h[0] = 0;
    for (unsigned n = 1; n <= k; ++n) {
        mpz_class v = binom(1UL << n, 1UL << (n - 1));
        for (unsigned j = 0; j < n; ++j) {
            v -= binom(n, j) * h[j];
        }
        h[n] = v;
    }
    return h[k];
}

std::uint64_t h_count_bruteforce(unsigned k)
{
    if (k > 4) {
        throw Error(Errc::TooLarge, "brute force limited to k <= 4");
    }
    const std::uint64_t functions = std::uint64_t{1} << (1u << k);
    std::uint64_t count = 0;
    for (std::uint64_t t = 0; t < functions; ++t) {
        const BooleanFn f{k, t};
        if (!is_balanced(f)) {
            continue;
        }
        bool all = true;
        for (unsigned j = 1; j <= k && all; ++j) {
            all = essentially_depends(f, j);
        }
        count += all;
    }
    return count;
}

mpz_class a1_size(unsigned n)
{
    if (n < 1 || n > 8) {
        throw Error(Errc::InvalidArgument, "n must be in 1..8");
    }
    const mpz_class c = binom(1UL << n, 1UL << (n - 1));
    return factorial(1UL << n) * (c - h_count(n)) / c;
}

std::pair<mpz_class, mpz_class> s_bounds(unsigned n)
{
    const mpz_class total = factorial(1UL << n);
    const mpz_class a1 = a1_size(n);
    return {total - n * a1, total - a1};
}

mpz_class d_lower_bound(unsigned n)
{
    if (n < 2) {
        throw Error(Errc::InvalidArgument, "n must be at least 2");
    }
    return binom(1UL << (n - 1), 1UL << (n - 2));
}

McEstimate s_estimate_monte_carlo(unsigned n, std::uint64_t samples, std::uint64_t seed, unsigned threads)
{
    if (n < 1 || n > kMaxVars) {
        throw Error(Errc::InvalidArgument, "Monte-Carlo supports 1 <= n <= 6");
    }
    const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<std::uint64_t> hits(chunks, 0);
    std::atomic<std::uint64_t> next{0};
    auto runner = [&] {
        std::vector<std::uint32_t> perm(std::size_t{1} << n);
        for (std::uint64_t c = next++; c < chunks; c = next++) {
            Rng rng(split_seed(seed, c));
            const std::uint64_t count = std::min(kChunk, samples - c * kChunk);
            std::uint64_t h = 0;
            for (std::uint64_t s = 0; s < count; ++s) {
                std::iota(perm.begin(), perm.end(), 0u);
                rng.shuffle(perm);
                h += super_dependent_table(perm.data(), n);
            }
            hits[c] = h;
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        runner();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(runner);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    McEstimate est;
    est.samples = samples;
    est.hits = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
    if (samples > 0) {
        est.fraction = static_cast<double>(est.hits) / static_cast<double>(samples);
        const double half = 1.96 * std::sqrt(est.fraction * (1.0 - est.fraction) / static_cast<double>(samples));
        est.lo = std::max(0.0, est.fraction - half);
        est.hi = std::min(1.0, est.fraction + half);
    }
    return est;
}

} // namespace cryptkit::sbox
