#include "cryptkit/numtheory.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "cryptkit/error.hpp"

namespace cryptkit {

namespace {

using i128 = __int128;

void require_modulus(u64 modulus)
{
    if (modulus < 2) {
        throw Error(Errc::InvalidArgument, "modulus must be >= 2, got " + std::to_string(modulus));
    }
}

bool miller_rabin_witness(u64 n, u64 a, u64 d, unsigned s)
{
    u64 x = pow_mod(a % n, d, n);
    if (x == 1 || x == n - 1 || x == 0) {
        return false;
    }
    for (unsigned r = 1; r < s; ++r) {
        x = mul_mod(x, x, n);
        if (x == n - 1) {
            return false;
        }
    }
    return true;
}

} // namespace

u64 mul_mod(u64 a, u64 b, u64 m) noexcept
{
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 pow_mod(u64 base, u64 exponent, u64 m) noexcept
{
    u64 result = 1 % m;
    base %= m;
    while (exponent != 0) {
        if (exponent & 1) {
            result = mul_mod(result, base, m);
        }
        base = mul_mod(base, base, m);
        exponent >>= 1;
    }
    return result;
}

ResidueInt::ResidueInt(i64 value, u64 modulus)
{
    require_modulus(modulus);
    modulus_ = modulus;
    const i128 r = static_cast<i128>(value) % static_cast<i128>(modulus);
    value_ = static_cast<u64>(r < 0 ? r + static_cast<i128>(modulus) : r);
}

ResidueInt ResidueInt::from_unsigned(u64 value, u64 modulus)
{
    require_modulus(modulus);
    return ResidueInt(value % modulus, modulus, true);
}

void ResidueInt::check_same_modulus(const ResidueInt& o) const
{
    if (o.modulus_ != modulus_) {
        throw Error(Errc::InvalidArgument, "mixed moduli " + std::to_string(modulus_) + " and " +
                                               std::to_string(o.modulus_));
    }
}

ResidueInt ResidueInt::operator+(const ResidueInt& o) const
{
    check_same_modulus(o);
    return ResidueInt(static_cast<u64>((static_cast<u128>(value_) + o.value_) % modulus_), modulus_, true);
}

ResidueInt ResidueInt::operator-(const ResidueInt& o) const
{
    check_same_modulus(o);
    return *this + (-o);
}

ResidueInt ResidueInt::operator-() const
{
    return ResidueInt(value_ == 0 ? 0 : modulus_ - value_, modulus_, true);
}

ResidueInt ResidueInt::operator*(const ResidueInt& o) const
{
    check_same_modulus(o);
    return ResidueInt(mul_mod(value_, o.value_, modulus_), modulus_, true);
}

ResidueInt ResidueInt::pow(u64 exponent) const
{
    return ResidueInt(pow_mod(value_, exponent, modulus_), modulus_, true);
}

CrtSystem::CrtSystem(std::vector<std::pair<u64, u64>> residues) : residues_(std::move(residues))
{
    for (std::size_t i = 0; i < residues_.size(); ++i) {
        require_modulus(residues_[i].second);
        for (std::size_t j = i + 1; j < residues_.size(); ++j) {
            if (std::gcd(residues_[i].second, residues_[j].second) != 1) {
                throw Error(Errc::NonCoprimeModuli, "gcd(" + std::to_string(residues_[i].second) + ", " +
                                                        std::to_string(residues_[j].second) + ") > 1");
            }
        }
        const u128 next = static_cast<u128>(product_) * residues_[i].second;
        if (next > UINT64_MAX) {
            throw Error(Errc::RangeError, "modulus product exceeds 64 bits");
        }
        product_ = static_cast<u64>(next);
    }
}

int moebius(u64 n)
{
    if (n == 0) {
        throw Error(Errc::InvalidArgument, "moebius(0) is undefined");
    }
    int sign = 1;
    for (const auto& [p, e] : factorize(n)) {
        if (e > 1) {
            return 0;
        }
        sign = -sign;
    }
    return sign;
}

std::vector<std::pair<u64, unsigned>> factorize(u64 n)
{
    std::vector<std::pair<u64, unsigned>> out;
    for (u64 p = 2; p <= n / p; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            unsigned e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            out.emplace_back(p, e);
        }
    }
    if (n > 1) {
        out.emplace_back(n, 1);
    }
    return out;
}

std::vector<u64> divisors(u64 n)
{
    std::vector<u64> out{1};
    for (const auto& [p, e] : factorize(n)) {
        const std::size_t base = out.size();
        u64 pk = 1;
        for (unsigned k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) {
                out.push_back(out[i] * pk);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

ResidueInt crt_solve(const CrtSystem& sys)
{
    const u64 big = sys.modulus_product();
    if (big < 2) {
        throw Error(Errc::InvalidArgument, "empty CRT system");
    }
    ResidueInt acc = ResidueInt::from_unsigned(0, big);
    for (const auto& [r, m] : sys.residues()) {
        const u64 rest = big / m;
        const u64 inv = mod_inverse(ResidueInt::from_unsigned(rest % m, m)).value();
        const u64 term = mul_mod(mul_mod(r % m, inv, m), rest, big);
        acc = acc + ResidueInt::from_unsigned(term, big);
    }
    return acc;
}

ResidueInt mod_inverse(const ResidueInt& a)
{
    i128 r0 = a.modulus(), r1 = a.value();
    i128 t0 = 0, t1 = 1;
    while (r1 != 0) {
        const i128 q = r0 / r1;
        r0 -= q * r1;
        std::swap(r0, r1);
        t0 -= q * t1;
        std::swap(t0, t1);
    }
    if (r0 != 1) {
        throw Error(Errc::NotInvertible, "gcd(" + std::to_string(a.value()) + ", " + std::to_string(a.modulus()) +
                                             ") != 1");
    }
    const i128 m = a.modulus();
    i128 inv = t0 % m;
    if (inv < 0) {
        inv += m;
    }
    return ResidueInt::from_unsigned(static_cast<u64>(inv), a.modulus());
}

std::vector<ResidueInt> sqrt_mod_prime(const ResidueInt& a)
{
    const u64 p = a.modulus();
    if (!is_prime(p)) {
        throw Error(Errc::NotPrime, std::to_string(p) + " is not prime");
    }
    std::vector<u64> roots;
    if (a.value() == 0) {
        roots.push_back(0);
    } else if (p == 2) {
        roots.push_back(a.value());
    } else if (p < 1000) {
        for (u64 x = 1; x < p; ++x) {
            if (x * x % p == a.value()) {
                roots.push_back(x);
            }
        }
    } else if (pow_mod(a.value(), (p - 1) / 2, p) == 1) {
        // Tonelli-Shanks.
        u64 q = p - 1;
        unsigned s = 0;
        while ((q & 1) == 0) {
            q >>= 1;
            ++s;
        }
        u64 z = 2;
        while (pow_mod(z, (p - 1) / 2, p) != p - 1) {
            ++z;
        }
        u64 c = pow_mod(z, q, p);
        u64 x = pow_mod(a.value(), (q + 1) / 2, p);
        u64 t = pow_mod(a.value(), q, p);
        unsigned m = s;
        while (t != 1) {
            unsigned i = 0;
            u64 t2 = t;
            while (t2 != 1) {
                t2 = mul_mod(t2, t2, p);
                ++i;
            }
            u64 b = c;
            for (unsigned j = 0; j + i + 1 < m; ++j) {
                b = mul_mod(b, b, p);
            }
            x = mul_mod(x, b, p);
            c = mul_mod(b, b, p);
            t = mul_mod(t, c, p);
            m = i;
        }
        roots.push_back(std::min(x, p - x));
        roots.push_back(std::max(x, p - x));
    }
    std::vector<ResidueInt> out;
    out.reserve(roots.size());
    for (u64 r : roots) {
        out.push_back(ResidueInt::from_unsigned(r, p));
    }
    return out;
}

bool is_prime(u64 n)
{
    if (n < 2) {
        return false;
    }
    if (n < (u64{1} << 32)) {
        if (n % 2 == 0) {
            return n == 2;
        }
        for (u64 d = 3; d * d <= n; d += 2) {
            if (n % d == 0) {
                return false;
            }
        }
        return true;
    }
    if (n % 2 == 0) {
        return false;
    }
    u64 d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // Sufficient for every n < 3.3 * 10^24.
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (miller_rabin_witness(n, a, d, s)) {
            return false;
        }
    }
    return true;
}

bool is_probable_prime(const mpz_class& n, int rounds)
{
    return mpz_probab_prime_p(n.get_mpz_t(), rounds) != 0;
}

std::vector<i64> integer_roots_monic(const std::vector<i64>& coeffs)
{
    // Strip factors of x first so the constant term is nonzero.
    std::size_t shift = 0;
    while (shift < coeffs.size() && coeffs[shift] == 0) {
        ++shift;
    }
    std::set<i64> roots;
    if (shift > 0) {
        roots.insert(0);
    }
    if (shift < coeffs.size()) {
        const std::vector<i64> rest(coeffs.begin() + static_cast<std::ptrdiff_t>(shift), coeffs.end());
        const i64 a0 = rest.front();
        const u64 mag = a0 < 0 ? static_cast<u64>(-(a0 + 1)) + 1 : static_cast<u64>(a0);
        for (u64 d : divisors(mag)) {
            for (int sign : {1, -1}) {
                const mpz_class x = sign * mpz_class(static_cast<unsigned long>(d));
                mpz_class acc = 1;  // Horner on the monic polynomial.
                for (auto it = rest.rbegin(); it != rest.rend(); ++it) {
                    acc = acc * x + mpz_class(static_cast<long>(*it));
                }
                if (acc == 0) {
                    roots.insert(sign * static_cast<i64>(d));
                }
            }
        }
    }
    return {roots.begin(), roots.end()};
}

std::vector<i64> integer_cubic_roots(i64 a2, i64 a1, i64 a0)
{
    return integer_roots_monic({a0, a1, a2});
}

} // namespace cryptkit
