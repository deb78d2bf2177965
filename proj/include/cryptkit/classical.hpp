#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace cryptkit {

/// Ordered symbol set with a bijection symbol <-> index in [0, size).
class Alphabet {
public:
    /// Throws Errc::InvalidArgument on duplicate symbols.
    explicit Alphabet(std::string_view symbols);

    /// A..Z, 0..9, space.
    static const Alphabet& base37();
    /// A..Z, 0, 1, ',', '!'.
    static const Alphabet& hill30();

    int size() const noexcept { return static_cast<int>(symbols_.size()); }
    /// Throws Errc::InvalidSymbol.
    int code(char c) const;
    char symbol(int code) const;
    bool contains(char c) const noexcept { return index_[static_cast<unsigned char>(c)] >= 0; }

    std::vector<int> encode(std::string_view text) const;
    std::string decode(const std::vector<int>& codes) const;

private:
    std::string symbols_;
    std::array<int, 256> index_;
};

// ---------------------------------------------------------------------------
// Polybius square

enum class IjPreference { I, J };

struct PolybiusGrid {
    /// Row-major 5x5 layout; the merged I/J cell holds 'I'.
    std::string letters = "ABCDEFGHIKLMNOPQRSTUVWXYZ";
    /// Optional read order over a board of digit/dot cells, as (row, col).
    std::vector<std::pair<int, int>> path;

    /// Throws Errc::InvalidArgument unless `letters` holds 25 distinct letters.
    void validate() const;
};

/// Decodes "rc." groups (row, column digits 1..5, each followed by '.').
/// Whitespace is ignored.
std::string polybius_decode(std::string_view cipher, const PolybiusGrid& grid = {},
                            IjPreference pref = IjPreference::I);

std::string polybius_encode(std::string_view plain, const PolybiusGrid& grid = {});

/// Reads the characters of `board` along `grid.path`.
std::string read_board_path(const std::vector<std::string>& board, const PolybiusGrid& grid);

// ---------------------------------------------------------------------------
// Wallet splitting

/// Number of splits n with total - n = target * (n + 1), if any.
std::optional<std::uint64_t> wallet_feasible(std::uint64_t total, std::uint64_t target);

/// Splits wallets (each split costs one coin) until none exceeds `target`;
/// returns the final wallet contents. Used to check feasibility answers.
std::vector<std::uint64_t> simulate_wallet_splits(std::uint64_t total, std::uint64_t target);

// ---------------------------------------------------------------------------
// Quadratic cipher over Z_37

struct QuadCipherKey {
    int a = 0;
    int b = 0;
    int c = 0;

    int apply(int x) const noexcept;
    bool operator==(const QuadCipherKey&) const = default;
};

inline constexpr int kQuadModulus = 37;

/// f(x - y) - 2 f(x) f(y) + f(1 + xy) == 1 (mod 37) for all x, y.
bool satisfies_functional_equation(const QuadCipherKey& key);

/// Exhaustive search over all 37^3 keys for the unique non-constant key
/// satisfying the functional equation.
QuadCipherKey quad_key_recover();

std::string quad_encrypt(std::string_view plain, const QuadCipherKey& key,
                         const Alphabet& alphabet = Alphabet::base37());

/// Per-position plaintext options (square roots of 2y + 36 mapped back to
/// symbols). Throws Errc::NonResidue if some position has no preimage.
std::vector<std::vector<char>> quad_decrypt_options(std::string_view cipher, const QuadCipherKey& key,
                                                    const Alphabet& alphabet = Alphabet::base37());

using PlaintextScorer = std::function<double(std::string_view)>;

/// Every plaintext consistent with the ciphertext; ranked by `scorer`
/// (descending, stable) when one is supplied.
std::vector<std::string> quad_decrypt(std::string_view cipher, const QuadCipherKey& key,
                                      const Alphabet& alphabet = Alphabet::base37(),
                                      const PlaintextScorer& scorer = {});

// ---------------------------------------------------------------------------
// Hidden primes

struct HiddenPrimes {
    std::int64_t p1 = 0, p2 = 0, p3 = 0;
    std::int64_t quotient = 0;
};

/// Roots of x^3 + a2 x^2 + a1 x + a0 must be three primes p1 < p2 < p3
/// with (p1 + p3) / p2 a prime; otherwise throws Errc::CheckFailed.
HiddenPrimes hidden_primes(std::int64_t a2 = -342, std::int64_t a1 = 1691, std::int64_t a0 = -2022);

// ---------------------------------------------------------------------------
// PIN elimination

struct PinTrace {
    std::vector<int> universe;
    /// Codes whose digit sum is shared with another code.
    std::vector<int> after_sum_hint;
    /// Codes whose product-digit-sum is shared with another code.
    std::vector<int> product_hint_ambiguous;
    /// Intersection of the two lists above.
    std::vector<int> after_product_hint;
};

PinTrace pin_trace();
/// Throws Errc::AmbiguousPin if elimination does not leave one code.
int pin_solve();

// ---------------------------------------------------------------------------
// 2x2 Hill cipher

using IntMat2 = Eigen::Matrix<std::int64_t, 2, 2>;

/// 2x2 matrix over Z_modulus with entries kept reduced.
class Mat2 {
public:
    Mat2(const IntMat2& entries, std::int64_t modulus);
    Mat2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, std::int64_t modulus);

    static Mat2 identity(std::int64_t modulus) { return {1, 0, 0, 1, modulus}; }

    const IntMat2& entries() const noexcept { return m_; }
    std::int64_t modulus() const noexcept { return modulus_; }
    std::int64_t operator()(int r, int c) const { return m_(r, c); }

    std::int64_t det() const;
    /// Throws Errc::NotInvertible when det is not a unit.
    Mat2 inverse() const;
    Mat2 reduced(std::int64_t modulus) const { return {m_, modulus}; }

    Mat2 operator*(const Mat2& o) const;
    Mat2 operator+(const Mat2& o) const;
    bool operator==(const Mat2& o) const { return modulus_ == o.modulus_ && m_ == o.m_; }

private:
    IntMat2 m_;
    std::int64_t modulus_;
};

/// Packs symbols s0 s1 s2 s3 column-major: [[s0, s2], [s1, s3]].
Mat2 pack_block(std::string_view block, const Alphabet& alphabet);
std::string unpack_block(const Mat2& m, const Alphabet& alphabet);

std::string hill_encrypt(std::string_view plain, const Mat2& key, const Alphabet& alphabet = Alphabet::hill30());
std::string hill_decrypt(std::string_view cipher, const Mat2& decrypt_key,
                         const Alphabet& alphabet = Alphabet::hill30());

struct HillCandidate {
    Mat2 decrypt;
    /// Binary lift: decrypt = base + 15 * lift (mod 30).
    Mat2 lift;
    std::string plaintext;
};

struct HillRecovery {
    /// Inverse of the key modulo 15, from the known block.
    Mat2 base_mod15;
    /// Lifts consistent with the known block and invertible modulo 30.
    std::vector<HillCandidate> candidates;
};

/// Known-plaintext attack on the Z_30 Hill cipher when the known ciphertext
/// block is singular modulo 30: solve modulo 15, then lift over all 16
/// binary matrices. Candidates are ranked by `scorer` when supplied.
/// Throws Errc::Mod15Singular, Errc::KnownBlockInconsistent, Errc::BadLength.
HillRecovery hill_known_plaintext_recover(std::string_view cipher, int block_index, std::string_view known_block,
                                          const PlaintextScorer& scorer = {},
                                          const Alphabet& alphabet = Alphabet::hill30());

/// Heuristic plausibility score: minus the number of non-letter symbols
/// that are followed by a letter (punctuation inside words).
double interior_punctuation_score(std::string_view text);

} // namespace cryptkit
