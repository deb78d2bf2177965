#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace cryptkit {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

/// An integer modulo `modulus` (>= 2). Products go through 128-bit
/// intermediates so any modulus below 2^64 is safe.
class ResidueInt {
public:
    ResidueInt(i64 value, u64 modulus);

    static ResidueInt from_unsigned(u64 value, u64 modulus);

    u64 value() const noexcept { return value_; }
    u64 modulus() const noexcept { return modulus_; }

    ResidueInt operator+(const ResidueInt& o) const;
    ResidueInt operator-(const ResidueInt& o) const;
    ResidueInt operator*(const ResidueInt& o) const;
    ResidueInt operator-() const;
    ResidueInt pow(u64 exponent) const;

    bool operator==(const ResidueInt&) const = default;

private:
    ResidueInt(u64 value, u64 modulus, bool) noexcept : value_(value), modulus_(modulus) {}
    void check_same_modulus(const ResidueInt& o) const;

    u64 value_;
    u64 modulus_;
};

/// Pairwise-coprime system of congruences x = r_i (mod m_i).
class CrtSystem {
public:
    /// Throws Errc::NonCoprimeModuli when two moduli share a factor.
    explicit CrtSystem(std::vector<std::pair<u64, u64>> residues);

    const std::vector<std::pair<u64, u64>>& residues() const noexcept { return residues_; }
    u64 modulus_product() const noexcept { return product_; }

private:
    std::vector<std::pair<u64, u64>> residues_;
    u64 product_ = 1;
};

u64 mul_mod(u64 a, u64 b, u64 m) noexcept;
u64 pow_mod(u64 base, u64 exponent, u64 m) noexcept;

/// Möbius function; n >= 1.
int moebius(u64 n);

/// Positive divisors of n in increasing order.
std::vector<u64> divisors(u64 n);

/// Prime factorisation as (prime, exponent) pairs, by trial division.
std::vector<std::pair<u64, unsigned>> factorize(u64 n);

ResidueInt crt_solve(const CrtSystem& sys);

/// Throws Errc::NotInvertible when gcd(value, modulus) != 1.
ResidueInt mod_inverse(const ResidueInt& a);

/// All square roots of `a` modulo the prime a.modulus(), ascending.
/// Exhaustive below 1000, Tonelli-Shanks above. Throws Errc::NotPrime.
std::vector<ResidueInt> sqrt_mod_prime(const ResidueInt& a);

/// Deterministic for every 64-bit input: trial division below 2^32,
/// Miller-Rabin with a fixed witness set above.
bool is_prime(u64 n);

/// Probabilistic primality for big integers (Miller-Rabin, `rounds` bases,
/// via GMP). Error probability at most 4^-rounds.
bool is_probable_prime(const mpz_class& n, int rounds = 40);

/// Distinct integer roots of x^3 + a2 x^2 + a1 x + a0, ascending.
std::vector<i64> integer_cubic_roots(i64 a2, i64 a1, i64 a0);

/// Distinct integer roots of the monic polynomial with the given lower
/// coefficients (coeffs[i] multiplies x^i), by rational-root search.
std::vector<i64> integer_roots_monic(const std::vector<i64>& coeffs);

} // namespace cryptkit
