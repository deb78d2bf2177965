#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <gmpxx.h>

namespace cryptkit::feistel {

/// Binary 4x4 matrix acting word-wise: output word i is the XOR of the input
/// words j with entry (i, j) = 1. Row/column 0 corresponds to x3.
using BinaryMatrix = Eigen::Matrix<std::uint8_t, 4, 4>;

/// (x3, x2, x1, x0); index 0 holds x3.
using Block = std::array<std::uint32_t, 4>;

/// (k1, k0).
using RoundKey = std::array<std::uint32_t, 2>;

/// Rows (x3+x2+x0, x3+x1+x0, x2+x1+x0, x3+x2+x1).
BinaryMatrix matrix_a1();
/// Rows (x3+x2+x1, x3+x2+x0, x3+x1+x0, x2+x1+x0).
BinaryMatrix matrix_a2();

bool invertible_gf2(const BinaryMatrix& a);
/// min over nonzero x in GF(2)^4 of wt(x) + wt(A x).
int branch_number(const BinaryMatrix& a);
/// Largest branch number over all invertible binary 4x4 matrices.
int max_binary_branch_number();

struct FeistelParams {
    unsigned m = 2;
    BinaryMatrix matrix = matrix_a1();
    std::vector<std::uint32_t> sbox;
    unsigned rounds = 1;

    std::uint32_t mask() const noexcept { return (std::uint32_t{1} << m) - 1; }
    /// Throws Errc::InvalidArgument on a malformed matrix or table.
    void validate() const;
};

/// Uniform random permutation table on m-bit words.
std::vector<std::uint32_t> random_sbox(unsigned m, std::uint64_t seed);
bool sbox_is_bijective(const std::vector<std::uint32_t>& sbox);
/// b(x ^ y) ^ b(x) ^ b(y) ^ b(0) == 0 for all x, y.
bool sbox_is_affine(const std::vector<std::uint32_t>& sbox);

Block round(const Block& x, const RoundKey& key, const FeistelParams& params);
/// Round 1 first. Throws Errc::InvalidArgument when keys.size() != rounds.
Block encrypt(const Block& x, const std::vector<RoundKey>& keys, const FeistelParams& params);

/// Every key's round function is a bijection on blocks (m <= 3).
bool round_is_permutation(const FeistelParams& params);

Block xor_blocks(const Block& a, const Block& b) noexcept;
std::uint32_t pack(const Block& b, unsigned m) noexcept;
Block unpack(std::uint32_t v, unsigned m) noexcept;

/// Exact differential probability averaged over every input and every
/// tuple of independent uniform round keys. Uses the one-round transition
/// counts chained over the rounds (exact because the key enters each round
/// as a uniform mask on the S-box inputs).
mpq_class diff_probability(const Block& delta, const Block& eps, const FeistelParams& params);

/// Same quantity by enumerating every input and every key tuple directly.
/// Throws Errc::TooLarge when the enumeration exceeds `work_bound` rounds.
mpq_class diff_probability_direct(const Block& delta, const Block& eps, const FeistelParams& params,
                                  std::uint64_t work_bound = std::uint64_t{1} << 28);

/// Output-difference distribution from delta after all rounds, as exact
/// probabilities indexed by packed difference.
std::vector<mpq_class> diff_distribution(const Block& delta, const FeistelParams& params);

struct SampledProbability {
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
    double estimate() const noexcept { return samples ? static_cast<double>(hits) / static_cast<double>(samples) : 0.0; }
};

/// Random inputs and random round keys; an estimate only.
SampledProbability diff_probability_sampled(const Block& delta, const Block& eps, const FeistelParams& params,
                                            std::uint64_t samples, std::uint64_t seed);

using DiffPredicate = std::function<bool(const Block&)>;

/// W(eps) = {a : a3 ^ a1 = eps} minus zero.
DiffPredicate w_eps_set(std::uint32_t eps);
/// {(0, d, d, t)} minus zero.
DiffPredicate w_diag_set();

struct Counterexample {
    unsigned round = 0;  ///< 1-based round at which the difference left the set
    Block input{};
    Block delta{};
    RoundKey key{};
    Block output_delta{};
};

struct InvariantReport {
    bool pass = false;
    std::string method;
    std::uint64_t pairs_traced = 0;
    std::size_t set_size = 0;
    bool sbox_bijective = false;
    bool sbox_affine = false;
    std::optional<Counterexample> counterexample;
};

enum class TraceMode {
    /// Each round: every input x, every difference reached so far, every
    /// round key.
    PerRound,
    /// Each round: every difference reached so far and every pair of
    /// S-box inputs (x3 ^ k1, x1 ^ k0). The output difference of a round
    /// depends on (x, k) only through these two words, so this covers the
    /// same cases with 2^(4m) fewer evaluations.
    SboxInputs,
    /// Every input pushed through every tuple of round keys.
    FullKeyTuple,
};

/// Checks that every difference in `set` stays in `set` for all rounds.
/// Throws Errc::TooLarge when the requested enumeration is out of reach.
InvariantReport verify_invariant(const FeistelParams& params, const DiffPredicate& set,
                                 TraceMode mode = TraceMode::PerRound, unsigned threads = 1);

/// verify_invariant on W(eps); holds for every S-box under matrix_a1().
InvariantReport verify_w_eps(const FeistelParams& params, std::uint32_t eps, TraceMode mode = TraceMode::PerRound,
                             unsigned threads = 1);
/// verify_invariant on {(0, d, d, t)}; holds for every S-box under matrix_a2().
InvariantReport verify_diagonal(const FeistelParams& params, TraceMode mode = TraceMode::PerRound,
                                unsigned threads = 1);

/// Differences reachable from `from` after all rounds (the support of the
/// exact distribution).
std::vector<Block> reachable_differences(const FeistelParams& params, const DiffPredicate& from);

/// True when no difference in `from` reaches any difference in `to`, i.e.
/// every such differential has probability 0.
bool is_impossible(const FeistelParams& params, const DiffPredicate& from, const DiffPredicate& to);

} // namespace cryptkit::feistel
