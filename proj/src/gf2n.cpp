#include "cryptkit/gf2n.hpp"

#include <array>
#include <bit>
#include <string>

#include "cryptkit/error.hpp"
#include "cryptkit/numtheory.hpp"

namespace cryptkit {

namespace {

// Lowest-weight irreducible polynomial of each degree, smallest first.
constexpr std::array<std::uint32_t, 25> kReductionPolys = {
    0,        0x3,      0x7,      0xb,      0x13,      0x25,     0x43,     0x83,     0x11b,
    0x203,    0x409,    0x805,    0x1009,   0x201b,    0x4021,   0x8003,   0x1002b,  0x20009,
    0x40009,  0x80027,  0x100009, 0x200005, 0x400003,  0x800021, 0x100001b,
};

int poly_degree(std::uint64_t p) noexcept
{
    return p == 0 ? -1 : static_cast<int>(std::bit_width(p)) - 1;
}

std::uint64_t poly_mod(std::uint64_t a, std::uint64_t b) noexcept
{
    const int db = poly_degree(b);
    for (int da = poly_degree(a); da >= db; da = poly_degree(a)) {
        a ^= b << (da - db);
    }
    return a;
}

void check_degree(unsigned n)
{
    if (n < 1 || n > GF2nField::max_degree) {
        throw Error(Errc::InvalidArgument, "field degree must be in 1..24, got " + std::to_string(n));
    }
}

} // namespace

std::uint32_t default_reduction_poly(unsigned n)
{
    check_degree(n);
    return kReductionPolys[n];
}

bool is_irreducible_gf2(std::uint32_t poly)
{
    const int deg = poly_degree(poly);
    if (deg < 1) {
        return false;
    }
    for (std::uint64_t d = 2; poly_degree(d) <= deg / 2; ++d) {
        if (poly_mod(poly, d) == 0) {
            return false;
        }
    }
    return true;
}

GF2nField::GF2nField(unsigned n) : GF2nField(n, default_reduction_poly(n)) {}

GF2nField::GF2nField(unsigned n, std::uint32_t reduction_poly) : n_(n), poly_(reduction_poly)
{
    check_degree(n);
    if (poly_degree(reduction_poly) != static_cast<int>(n) || !is_irreducible_gf2(reduction_poly)) {
        throw Error(Errc::InvalidArgument, "reduction polynomial is not an irreducible of degree " +
                                               std::to_string(n));
    }
}

std::uint32_t GF2nField::mul(std::uint32_t a, std::uint32_t b) const noexcept
{
    std::uint64_t product = 0;
    std::uint64_t aa = a;
    while (b != 0) {
        if (b & 1) {
            product ^= aa;
        }
        aa <<= 1;
        b >>= 1;
    }
    return static_cast<std::uint32_t>(poly_mod(product, poly_));
}

std::uint32_t GF2nField::pow(std::uint32_t a, std::uint64_t e) const noexcept
{
    std::uint32_t result = 1;
    while (e != 0) {
        if (e & 1) {
            result = mul(result, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    return result;
}

std::uint32_t GF2nField::frobenius(std::uint32_t a, unsigned k) const noexcept
{
    for (unsigned i = 0; i < k; ++i) {
        a = mul(a, a);
    }
    return a;
}

GF2nElem::GF2nElem(const GF2nField& field, std::uint32_t bits) : field_(field), bits_(bits)
{
    if (bits >= field.size()) {
        throw Error(Errc::InvalidArgument, "element " + std::to_string(bits) + " does not fit in GF(2^" +
                                               std::to_string(field.degree()) + ")");
    }
}

int trace(const GF2nElem& a)
{
    const GF2nField& f = a.field();
    std::uint32_t acc = 0;
    std::uint32_t term = a.bits();
    for (unsigned i = 0; i < f.degree(); ++i) {
        acc ^= term;
        term = f.square(term);
    }
    // The trace lies in the prime field, so acc is 0 or 1.
    return static_cast<int>(acc);
}

int bob_symbol(const GF2nElem& a)
{
    return 1 - trace(a);
}

bool in_proper_subfield(const GF2nElem& a)
{
    const GF2nField& f = a.field();
    const unsigned n = f.degree();
    for (u64 k : divisors(n)) {
        if (k == n) {
            continue;
        }
        if (f.frobenius(a.bits(), static_cast<unsigned>(k)) == a.bits()) {
            return true;
        }
    }
    return false;
}

std::vector<bool> quadratic_image(const GF2nField& field)
{
    std::vector<bool> hit(field.size(), false);
    for (std::uint32_t x = 0; x < field.size(); ++x) {
        hit[field.square(x) ^ x] = true;
    }
    return hit;
}

BSetCounts count_b_sets(unsigned n)
{
    if (n < 1 || n > 60) {
        throw Error(Errc::InvalidArgument, "count_b_sets supports 1 <= n <= 60");
    }
    unsigned t = 0;
    u64 m = n;
    while (m % 2 == 0) {
        m /= 2;
        ++t;
    }
    BSetCounts out;
    out.n = n;
    std::int64_t full = 0;
    for (u64 d : divisors(n)) {
        full += moebius(d) * (std::int64_t{1} << (n / d));
    }
    std::int64_t odd = 0;
    for (u64 d : divisors(m)) {
        odd += moebius(d) * (std::int64_t{1} << ((m / d) << t));
    }
    out.outside_subfields = full;
    out.b0 = odd / 2;
    out.b1 = full - out.b0;
    out.b0_all_divisor_sum = full / 2;
    return out;
}

BSetCounts count_b_sets_exhaustive(unsigned n)
{
    if (n < 1 || n > 20) {
        throw Error(Errc::TooLarge, "exhaustive classification supports 1 <= n <= 20");
    }
    const GF2nField field(n);
    const std::vector<bool> image = quadratic_image(field);
    BSetCounts out;
    out.n = n;
    for (std::uint32_t a = 0; a < field.size(); ++a) {
        if (in_proper_subfield(GF2nElem(field, a))) {
            continue;
        }
        ++out.outside_subfields;
        if (image[a]) {
            ++out.b1;
        } else {
            ++out.b0;
        }
    }
    out.b0_all_divisor_sum = count_b_sets(n).b0_all_divisor_sum;
    return out;
}

} // namespace cryptkit
