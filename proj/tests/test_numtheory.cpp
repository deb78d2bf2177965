#include <doctest.h>

#include <algorithm>

#include "cryptkit/error.hpp"
#include "cryptkit/numtheory.hpp"
#include "cryptkit/rng.hpp"

using namespace cryptkit;

namespace {

bool throws_code(Errc code, auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

// Independent oracle: square-free check by scanning prime squares.
int moebius_oracle(u64 n)
{
    int sign = 1;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) {
                return 0;
            }
            sign = -sign;
        }
    }
    return n > 1 ? -sign : sign;
}

} // namespace

TEST_CASE("moebius examples")
{
    CHECK(moebius(1) == 1);
    CHECK(moebius(4) == 0);
    CHECK(moebius(6) == 1);
    CHECK(moebius(2) == -1);
    CHECK(moebius(30) == -1);
    for (u64 n = 1; n <= 2000; ++n) {
        REQUIRE(moebius(n) == moebius_oracle(n));
    }
}

TEST_CASE("divisor sums of the Moebius function vanish above 1")
{
    for (u64 n = 1; n <= 10000; ++n) {
        int sum = 0;
        for (u64 d : divisors(n)) {
            sum += moebius(d);
        }
        REQUIRE(sum == (n == 1 ? 1 : 0));
    }
}

TEST_CASE("divisors and factorize")
{
    CHECK(divisors(12) == std::vector<u64>{1, 2, 3, 4, 6, 12});
    CHECK(divisors(1) == std::vector<u64>{1});
    const auto f = factorize(2022);
    REQUIRE(f.size() == 3);
    CHECK(f[0] == std::pair<u64, unsigned>{2, 1});
    CHECK(f[1] == std::pair<u64, unsigned>{3, 1});
    CHECK(f[2] == std::pair<u64, unsigned>{337, 1});
}

TEST_CASE("residue arithmetic avoids overflow")
{
    const ResidueInt a(11, 30), b(22, 30), c(9, 30), d(14, 30);
    CHECK((a * b + c * d).value() == (11 * 22 + 9 * 14) % 30);
    const u64 big = (u64{1} << 63) + 25;
    const auto x = ResidueInt::from_unsigned(big - 1, big);
    CHECK((x * x).value() == 1);
    CHECK(ResidueInt(-1, 7).value() == 6);
    CHECK(throws_code(Errc::InvalidArgument, [] { (void)(ResidueInt(1, 5) + ResidueInt(1, 7)); }));
}

TEST_CASE("crt_solve examples")
{
    CHECK(crt_solve(CrtSystem({{0, 2}, {0, 3}, {0, 337}})).value() == 0);
    CHECK(crt_solve(CrtSystem({{1, 2}, {1, 3}, {1, 337}})).value() == 1);
    // oracle: scan 0..2021
    u64 expected = 0;
    for (u64 v = 0; v < 2022; ++v) {
        if (v % 2 == 1 && v % 3 == 2 && v % 337 == 5) {
            expected = v;
        }
    }
    const auto r = crt_solve(CrtSystem({{1, 2}, {2, 3}, {5, 337}}));
    CHECK(r.value() == expected);
    CHECK(r.modulus() == 2022);
    CHECK(throws_code(Errc::NonCoprimeModuli, [] { CrtSystem({{1, 4}, {1, 6}}); }));
}

TEST_CASE("crt round trip on random values")
{
    Rng rng(11);
    const std::vector<std::vector<u64>> systems = {{2, 3, 337}, {7, 11, 13, 17}, {4294967291ULL, 65521}};
    for (const auto& mods : systems) {
        u64 prod = 1;
        for (u64 m : mods) {
            prod *= m;
        }
        for (int t = 0; t < 500; ++t) {
            const u64 v = rng.below(prod);
            std::vector<std::pair<u64, u64>> res;
            for (u64 m : mods) {
                res.emplace_back(v % m, m);
            }
            REQUIRE(crt_solve(CrtSystem(res)).value() == v);
        }
    }
}

TEST_CASE("mod_inverse")
{
    CHECK(mod_inverse(ResidueInt(1, 37)).value() == 1);
    CHECK(mod_inverse(ResidueInt(5, 22)).value() == 9);
    CHECK(throws_code(Errc::NotInvertible, [] { (void)mod_inverse(ResidueInt(4, 30)); }));
    Rng rng(5);
    for (int t = 0; t < 2000; ++t) {
        const u64 m = 2 + rng.below(1'000'000'000'000ULL);
        const u64 a = rng.below(m);
        try {
            const auto inv = mod_inverse(ResidueInt::from_unsigned(a, m));
            REQUIRE((inv * ResidueInt::from_unsigned(a, m)).value() == 1 % m);
        } catch (const Error& e) {
            REQUIRE(e.code() == Errc::NotInvertible);
            REQUIRE(std::gcd(a, m) != 1);
        }
    }
}

TEST_CASE("sqrt_mod_prime matches exhaustive squaring below 200")
{
    for (u64 p = 2; p < 200; ++p) {
        if (!is_prime(p)) {
            continue;
        }
        for (u64 a = 0; a < p; ++a) {
            std::vector<u64> oracle;
            for (u64 x = 0; x < p; ++x) {
                if (x * x % p == a) {
                    oracle.push_back(x);
                }
            }
            std::vector<u64> got;
            for (const auto& r : sqrt_mod_prime(ResidueInt::from_unsigned(a, p))) {
                got.push_back(r.value());
            }
            REQUIRE(got == oracle);
        }
    }
}

TEST_CASE("sqrt_mod_prime above the brute-force range")
{
    const u64 p = 1'000'000'007ULL;
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        const u64 x = rng.below(p);
        const auto roots = sqrt_mod_prime(ResidueInt::from_unsigned(mul_mod(x, x, p), p));
        REQUIRE(!roots.empty());
        for (const auto& r : roots) {
            REQUIRE(mul_mod(r.value(), r.value(), p) == mul_mod(x, x, p));
        }
        REQUIRE(std::any_of(roots.begin(), roots.end(), [&](const ResidueInt& r) { return r.value() == x; }));
    }
    CHECK(sqrt_mod_prime(ResidueInt(4, 37)).size() == 2);
    CHECK(throws_code(Errc::NotPrime, [] { (void)sqrt_mod_prime(ResidueInt(4, 35)); }));
}

TEST_CASE("is_prime against trial division and known values")
{
    for (u64 n = 0; n < 5000; ++n) {
        bool oracle = n >= 2;
        for (u64 d = 2; d * d <= n; ++d) {
            if (n % d == 0) {
                oracle = false;
                break;
            }
        }
        REQUIRE(is_prime(n) == oracle);
    }
    CHECK(is_prime(18446744073709551557ULL));
    CHECK_FALSE(is_prime(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
    CHECK_FALSE(is_prime(18446744073709551557ULL - 2));
    CHECK(is_probable_prime(mpz_class("170141183460469231731687303715884105727")));
    CHECK_FALSE(is_probable_prime(mpz_class("170141183460469231731687303715884105729")));
}

TEST_CASE("integer cubic roots satisfy the polynomial exactly")
{
    CHECK(integer_cubic_roots(-342, 1691, -2022) == std::vector<i64>{2, 3, 337});
    CHECK(integer_cubic_roots(-6, 11, -6) == std::vector<i64>{1, 2, 3});
    CHECK(integer_cubic_roots(0, 0, 1) == std::vector<i64>{-1});
    Rng rng(9);
    for (int t = 0; t < 300; ++t) {
        const i64 a2 = rng.between(-500, 500), a1 = rng.between(-5000, 5000), a0 = rng.between(-50000, 50000);
        for (i64 r : integer_cubic_roots(a2, a1, a0)) {
            const mpz_class x = static_cast<long>(r);
            REQUIRE(x * x * x + a2 * x * x + a1 * x + a0 == 0);
        }
    }
    // planted roots are found
    for (int t = 0; t < 100; ++t) {
        const i64 r1 = rng.between(-100, 100), r2 = rng.between(-100, 100), r3 = rng.between(-100, 100);
        const auto roots = integer_cubic_roots(-(r1 + r2 + r3), r1 * r2 + r1 * r3 + r2 * r3, -r1 * r2 * r3);
        for (i64 r : {r1, r2, r3}) {
            REQUIRE(std::find(roots.begin(), roots.end(), r) != roots.end());
        }
    }
}
