#pragma once

#include <cstdint>
#include <optional>
#include <ostream>

#include <Eigen/Core>

namespace cryptkit {

/// Element of the prime field GF(P), usable as an Eigen scalar.
template <std::uint32_t P>
class Fp {
    static_assert(P >= 2 && P < (1u << 16), "products must fit in 32 bits");

public:
    static constexpr std::uint32_t modulus = P;

    constexpr Fp() noexcept = default;
    constexpr Fp(int v) noexcept  // NOLINT: implicit, Eigen builds scalars from literals
        : v_(static_cast<std::uint32_t>(((v % static_cast<int>(P)) + static_cast<int>(P)) % static_cast<int>(P)))
    {
    }

    static constexpr Fp from_raw(std::uint32_t reduced) noexcept
    {
        Fp f;
        f.v_ = reduced;
        return f;
    }

    constexpr std::uint32_t value() const noexcept { return v_; }

    constexpr Fp operator+(Fp o) const noexcept
    {
        const std::uint32_t s = v_ + o.v_;
        return from_raw(s >= P ? s - P : s);
    }
    constexpr Fp operator-(Fp o) const noexcept { return from_raw(v_ >= o.v_ ? v_ - o.v_ : v_ + P - o.v_); }
    constexpr Fp operator-() const noexcept { return from_raw(v_ == 0 ? 0 : P - v_); }
    constexpr Fp operator*(Fp o) const noexcept { return from_raw(v_ * o.v_ % P); }
    constexpr Fp operator/(Fp o) const noexcept { return *this * o.inverse(); }
    constexpr Fp& operator+=(Fp o) noexcept { return *this = *this + o; }
    constexpr Fp& operator-=(Fp o) noexcept { return *this = *this - o; }
    constexpr Fp& operator*=(Fp o) noexcept { return *this = *this * o; }
    constexpr Fp& operator/=(Fp o) noexcept { return *this = *this / o; }

    constexpr Fp pow(std::uint64_t e) const noexcept
    {
        Fp base = *this, acc = from_raw(1 % P);
        while (e != 0) {
            if (e & 1) {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        return acc;
    }

    /// Fermat inverse; the inverse of zero is reported as zero.
    constexpr Fp inverse() const noexcept { return pow(P - 2); }

    constexpr bool operator==(const Fp&) const noexcept = default;

    friend std::ostream& operator<<(std::ostream& os, Fp f) { return os << f.v_; }

private:
    std::uint32_t v_ = 0;
};

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Solves A x = b over a field scalar by Gauss-Jordan elimination.
/// Returns nullopt when A is singular.
template <class Scalar>
std::optional<VectorX<Scalar>> solve_linear(MatrixX<Scalar> a, VectorX<Scalar> b)
{
    const Eigen::Index n = a.rows();
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = col;
        while (pivot < n && a(pivot, col) == Scalar(0)) {
            ++pivot;
        }
        if (pivot == n) {
            return std::nullopt;
        }
        if (pivot != col) {
            a.row(pivot).swap(a.row(col));
            std::swap(b(pivot), b(col));
        }
        const Scalar inv = Scalar(1) / a(col, col);
        a.row(col) *= inv;
        b(col) *= inv;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r != col && a(r, col) != Scalar(0)) {
                const Scalar f = a(r, col);
                a.row(r) -= f * a.row(col);
                b(r) -= f * b(col);
            }
        }
    }
    return b;
}

} // namespace cryptkit

namespace Eigen {

template <std::uint32_t P>
struct NumTraits<cryptkit::Fp<P>> : GenericNumTraits<cryptkit::Fp<P>> {
    using Real = cryptkit::Fp<P>;
    using NonInteger = cryptkit::Fp<P>;
    using Nested = cryptkit::Fp<P>;
    using Literal = cryptkit::Fp<P>;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 0,
        RequireInitialization = 1,
        ReadCost = 1,
        AddCost = 2,
        MulCost = 4,
    };
    // Used by Eigen's stream formatting.
    static constexpr int digits10() { return 0; }
    static constexpr int max_digits10() { return 0; }
};

} // namespace Eigen
