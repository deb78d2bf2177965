#pragma once

#include <cstdint>
#include <vector>

namespace cryptkit {

/// GF(2^n) for 1 <= n <= 24, elements packed as polynomial bitmasks and
/// reduced by a fixed irreducible polynomial per degree.
class GF2nField {
public:
    static constexpr unsigned max_degree = 24;

    /// Uses the built-in low-weight irreducible polynomial for degree n.
    explicit GF2nField(unsigned n);

    /// Throws Errc::InvalidArgument if `reduction_poly` does not have degree
    /// n or is reducible over GF(2).
    GF2nField(unsigned n, std::uint32_t reduction_poly);

    unsigned degree() const noexcept { return n_; }
    std::uint32_t reduction_poly() const noexcept { return poly_; }
    std::uint32_t size() const noexcept { return std::uint32_t{1} << n_; }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept;
    std::uint32_t square(std::uint32_t a) const noexcept { return mul(a, a); }
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const noexcept;
    /// a^(2^k), i.e. k applications of the Frobenius map.
    std::uint32_t frobenius(std::uint32_t a, unsigned k) const noexcept;

    bool operator==(const GF2nField&) const = default;

private:
    unsigned n_;
    std::uint32_t poly_;
};

/// Built-in reduction polynomial for degree n (bit i = coefficient of x^i).
std::uint32_t default_reduction_poly(unsigned n);

/// Irreducibility over GF(2) by trial division with every polynomial of
/// degree <= deg/2.
bool is_irreducible_gf2(std::uint32_t poly);

class GF2nElem {
public:
    GF2nElem(const GF2nField& field, std::uint32_t bits);

    std::uint32_t bits() const noexcept { return bits_; }
    const GF2nField& field() const noexcept { return field_; }

    GF2nElem operator+(const GF2nElem& o) const { return {field_, bits_ ^ o.bits_}; }
    GF2nElem operator*(const GF2nElem& o) const { return {field_, field_.mul(bits_, o.bits_)}; }
    GF2nElem square() const { return {field_, field_.square(bits_)}; }

    bool operator==(const GF2nElem& o) const noexcept { return bits_ == o.bits_ && field_ == o.field_; }

private:
    GF2nField field_;
    std::uint32_t bits_;
};

/// Absolute trace a + a^2 + ... + a^(2^(n-1)), as 0 or 1.
int trace(const GF2nElem& a);

/// 1 iff a = x^2 + x has a solution in the field. Evaluated via the trace.
int bob_symbol(const GF2nElem& a);

/// True iff a lies in GF(2^k) for some proper divisor k of n.
bool in_proper_subfield(const GF2nElem& a);

/// Membership table of the image {x^2 + x : x in field}, indexed by element
/// bits. Computed by enumerating every x.
std::vector<bool> quadratic_image(const GF2nField& field);

struct BSetCounts {
    unsigned n = 0;
    /// Elements outside every proper subfield.
    std::int64_t outside_subfields = 0;
    /// Non-representable elements outside the proper subfields.
    std::int64_t b0 = 0;
    /// Representable elements outside the proper subfields.
    std::int64_t b1 = 0;
    /// (1/2) * sum over all d | n of mu(d) 2^(n/d). Agrees with b0 only
    /// when n is odd; reported for comparison.
    std::int64_t b0_all_divisor_sum = 0;
};

/// Closed form for 1 <= n <= 60: b0 sums mu(d) 2^((m/d) 2^t) / 2 over the
/// divisors d of the odd part m of n = m 2^t.
BSetCounts count_b_sets(unsigned n);

/// Exhaustive classification of all 2^n field elements (n <= 20), using
/// quadratic_image and the Frobenius subfield test.
BSetCounts count_b_sets_exhaustive(unsigned n);

} // namespace cryptkit
