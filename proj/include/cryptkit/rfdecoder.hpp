#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cryptkit/fp.hpp"

namespace cryptkit {

/// Rational-function interpolation with errors over Z_2022 = Z_2 x Z_3 x Z_337.
namespace rf {

inline constexpr std::uint32_t kModulus = 2022;
inline constexpr std::uint32_t kBigPrime = 337;
using F337 = Fp<kBigPrime>;

struct DataPoint {
    int index = 0;
    std::uint32_t x = 0;
    std::uint32_t y = 0;

    bool operator==(const DataPoint&) const = default;
};

/// Monic f, g of equal degree d over Z_2022; alpha[j], beta[j] are the
/// coefficients of x^j for j < d.
struct RationalFnKey {
    std::vector<std::uint32_t> alpha;
    std::vector<std::uint32_t> beta;

    std::size_t degree() const noexcept { return alpha.size(); }
    std::uint32_t eval_numerator(std::uint32_t x, std::uint32_t modulus = kModulus) const;
    std::uint32_t eval_denominator(std::uint32_t x, std::uint32_t modulus = kModulus) const;
    /// g(x) is a unit modulo `modulus` for every x in [0, modulus).
    bool denominator_invertible_everywhere(std::uint32_t modulus = kModulus) const;
    /// The key with every coefficient reduced modulo m.
    RationalFnKey reduced(std::uint32_t m) const;

    bool operator==(const RationalFnKey&) const = default;
};

/// y * g(x) == f(x) (mod 2022), evaluated directly.
bool satisfies(const RationalFnKey& key, const DataPoint& p);
std::size_t satisfied_count(const RationalFnKey& key, const std::vector<DataPoint>& points);

/// Same-ratio test: f1/g1 == f2/g2 as functions on Z_2022 (requires both
/// denominators invertible everywhere).
bool same_fraction(const RationalFnKey& a, const RationalFnKey& b);

/// Parses "i,x,y" lines, sorted by index. Blank lines and one leading
/// header line (three fields, no digits) are skipped. Throws Errc::ParseError (with line number) or Errc::RangeError.
std::vector<DataPoint> parse_points(std::istream& in);
std::vector<DataPoint> load_points(const std::filesystem::path& path);
void write_points(std::ostream& out, const std::vector<DataPoint>& points);

/// A fraction modulo a small prime m (2 or 3), represented by its value
/// table r[x] = f(x)/g(x) on the m field points. Every (f, g) pair of monic
/// degree-d polynomials with g nowhere zero collapses to one such table.
struct SmallModCandidate {
    std::uint32_t modulus = 0;
    std::vector<std::uint32_t> ratio;
    /// Number of (f-table, g-table) pairs with this ratio.
    std::size_t equivalent_pairs = 0;
    std::vector<int> satisfied;  ///< indices into the point list
};

/// All ratio tables modulo m in {2, 3}, ranked by satisfied count
/// (descending; ties by table order).
std::vector<SmallModCandidate> enumerate_small_modulus(const std::vector<DataPoint>& points, std::uint32_t m);

struct Mod6Candidate {
    SmallModCandidate mod2;
    SmallModCandidate mod3;
    std::vector<int> satisfied;
};

/// Products of the mod-2 and mod-3 tables, ranked by joint satisfied count.
std::vector<Mod6Candidate> combine_mod6(const std::vector<SmallModCandidate>& mod2,
                                        const std::vector<SmallModCandidate>& mod3);

/// Generator columns (-1, -x, ..., -x^(d-1), y, y x, ..., y x^(d-1)) and
/// target v_i = y x^d - x^d over GF(337), for the retained indices.
struct LinearCodeInstance {
    MatrixX<F337> generator;  ///< 2d rows, one column per retained index
    RowVectorX<F337> target;
    std::vector<int> indices;

    Eigen::Index length() const noexcept { return generator.cols(); }
    Eigen::Index dimension() const noexcept { return generator.rows(); }
};

LinearCodeInstance build_code(const std::vector<DataPoint>& points, const std::vector<int>& indices,
                              std::size_t degree = 16);

/// Positions where s * G differs from -v.
std::size_t codeword_distance(const LinearCodeInstance& code, const RowVectorX<F337>& s);

enum class IsdVariant {
    /// Plain sampling: accept only when every sampled equation is correct.
    PooledGauss,
    /// Also repairs one or two wrong sampled equations per sample.
    LeeBrickell,
};

struct IsdOptions {
    std::size_t max_errors = 0;
    std::uint64_t budget = 1'000'000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    IsdVariant variant = IsdVariant::PooledGauss;
};

struct IsdResult {
    RowVectorX<F337> solution;
    std::uint64_t iteration = 0;  ///< zero-based index of the successful sample
    std::size_t errors = 0;
};

/// Information-set decoding: iteration t draws `dimension` coordinates
/// uniformly with a stream seeded by (seed, t) and solves the square system;
/// a sample is accepted when s * G is within max_errors of -v. Singular
/// samples are skipped and count against the budget.
///
/// The LeeBrickell variant draws one extra anchor coordinate and a few probe
/// coordinates, and also tries correcting one sampled equation, or two
/// sampled equations whose correction keeps the anchor satisfied. The first
/// `dimension` draws of each iteration are the same in both variants.
///
/// With several threads the lowest successful iteration wins, so the result
/// depends only on (code, options).
std::optional<IsdResult> isd_decode(const LinearCodeInstance& code, const IsdOptions& options);

struct SolveParams {
    std::size_t degree = 16;
    std::size_t need = 90;
    std::uint64_t budget = 1'000'000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    /// Mod-6 combinations tried in rank order before giving up.
    std::size_t max_mod6_candidates = 3;
    IsdVariant variant = IsdVariant::PooledGauss;
};

struct KeyCandidate {
    RationalFnKey key;
    std::size_t satisfied = 0;          ///< recounted over Z_2022
    std::size_t mod6_satisfied = 0;     ///< |I|
    std::size_t mod6_rank = 0;
    std::size_t equivalent_forms = 0;   ///< (f, g) table pairs mod 6 with this ratio
    std::uint64_t isd_iterations = 0;   ///< samples drawn, including the successful one
};

struct SolveReport {
    std::vector<KeyCandidate> candidates;
    std::vector<Mod6Candidate> mod6_ranking;
    std::uint64_t total_isd_iterations = 0;
};

/// Full pipeline. Throws Errc::NoCandidate when nothing verifies.
SolveReport solve_full(const std::vector<DataPoint>& points, const SolveParams& params = {});

struct SynthInstance {
    std::vector<DataPoint> points;
    RationalFnKey key;
    std::vector<int> correct;  ///< indices of points that satisfy the key
};

SynthInstance synth_instance(std::uint64_t seed, std::size_t n_points = 324, std::size_t n_correct = 90,
                             std::size_t degree = 16);

/// Largest d meeting the Varshamov condition
/// sum_{i=0}^{d-2} C(n-1, i) (q-1)^i < q^(n-k), i.e. the distance a random
/// [n, k] linear code over GF(q) is expected to reach.
std::size_t gv_distance(std::size_t n, std::size_t k, std::uint64_t q);

} // namespace rf
} // namespace cryptkit
