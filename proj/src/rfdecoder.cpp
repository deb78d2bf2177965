#include "cryptkit/rfdecoder.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <fstream>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

#include <gmpxx.h>

#include "cryptkit/error.hpp"
#include "cryptkit/numtheory.hpp"
#include "cryptkit/rng.hpp"

namespace cryptkit::rf {

namespace {

std::uint32_t eval_monic(const std::vector<std::uint32_t>& coeffs, std::uint32_t x, std::uint32_t m)
{
    std::uint64_t acc = 1;
    const std::uint64_t xm = x % m;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = (acc * xm + *it) % m;
    }
    return static_cast<std::uint32_t>(acc);
}

std::uint32_t inverse_mod(std::uint32_t a, std::uint32_t m)
{
    return static_cast<std::uint32_t>(mod_inverse(ResidueInt::from_unsigned(a, m)).value());
}

/// Lower coefficients (degree < m) of a monic degree-d polynomial over
/// GF(m) whose values on 0..m-1 are `table`.
std::vector<std::uint32_t> monic_with_table(const std::vector<std::uint32_t>& table, std::uint32_t m,
                                            std::size_t degree)
{
    std::vector<std::uint32_t> coeffs(degree, 0);
    std::uint32_t combos = 1;
    for (std::uint32_t i = 0; i < m; ++i) {
        combos *= m;
    }
    for (std::uint32_t code = 0; code < combos; ++code) {
        std::uint32_t c = code;
        for (std::uint32_t j = 0; j < m; ++j) {
            coeffs[j] = c % m;
            c /= m;
        }
        bool ok = true;
        for (std::uint32_t x = 0; x < m && ok; ++x) {
            ok = eval_monic(coeffs, x, m) == table[x];
        }
        if (ok) {
            return coeffs;
        }
    }
    throw Error(Errc::CheckFailed, "no monic polynomial with the requested value table");
}

std::vector<int> intersect_sorted(const std::vector<int>& a, const std::vector<int>& b)
{
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool parse_u32(std::string_view field, std::uint32_t& out)
{
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size() && !field.empty();
}

// Dense row-major k x (k+1) system over GF(337) for the plain sampling
// loop.
bool solve_dense(std::vector<std::uint32_t>& aug, std::size_t k, std::vector<std::uint32_t>& x)
{
    constexpr std::uint32_t p = kBigPrime;
    const std::size_t w = k + 1;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        while (pivot < k && aug[pivot * w + col] == 0) {
            ++pivot;
        }
        if (pivot == k) {
            return false;
        }
        if (pivot != col) {
            std::swap_ranges(aug.begin() + static_cast<std::ptrdiff_t>(pivot * w + col),
                             aug.begin() + static_cast<std::ptrdiff_t>(pivot * w + w),
                             aug.begin() + static_cast<std::ptrdiff_t>(col * w + col));
        }
        const std::uint32_t inv = F337::from_raw(aug[col * w + col]).inverse().value();
        std::uint32_t* prow = &aug[col * w];
        for (std::size_t j = col; j < w; ++j) {
            prow[j] = prow[j] * inv % p;
        }
        for (std::size_t r = col + 1; r < k; ++r) {
            std::uint32_t* row = &aug[r * w];
            const std::uint32_t f = row[col];
            if (f == 0) {
                continue;
            }
            const std::uint32_t nf = p - f;
            for (std::size_t j = col; j < w; ++j) {
                row[j] = (row[j] + nf * prow[j]) % p;
            }
        }
    }
    x.assign(k, 0);
    for (std::size_t i = k; i-- > 0;) {
        std::uint32_t acc = aug[i * w + k];
        for (std::size_t j = i + 1; j < k; ++j) {
            acc = (acc + (p - aug[i * w + j]) * x[j]) % p;
        }
        x[i] = acc;
    }
    return true;
}

// Gauss-Jordan inverse of a dense row-major k x k matrix over GF(337).
// The decoder works on raw arrays because Eigen expressions over Fp are
// too slow for ~10^6 samples. `a` is destroyed.
bool invert_dense(std::vector<std::uint32_t>& a, std::size_t k, std::vector<std::uint32_t>& inv)
{
    constexpr std::uint32_t p = kBigPrime;
    inv.assign(k * k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        inv[i * k + i] = 1;
    }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        while (pivot < k && a[pivot * k + col] == 0) {
            ++pivot;
        }
        if (pivot == k) {
            return false;
        }
        if (pivot != col) {
            std::swap_ranges(&a[pivot * k], &a[pivot * k + k], &a[col * k]);
            std::swap_ranges(&inv[pivot * k], &inv[pivot * k + k], &inv[col * k]);
        }
        const std::uint32_t s = F337::from_raw(a[col * k + col]).inverse().value();
        std::uint32_t* prow = &a[col * k];
        std::uint32_t* pinv = &inv[col * k];
        for (std::size_t j = 0; j < k; ++j) {
            prow[j] = prow[j] * s % p;
            pinv[j] = pinv[j] * s % p;
        }
        for (std::size_t r = 0; r < k; ++r) {
            const std::uint32_t f = a[r * k + col];
            if (r == col || f == 0) {
                continue;
            }
            const std::uint32_t nf = p - f;
            std::uint32_t* row = &a[r * k];
            std::uint32_t* irow = &inv[r * k];
            for (std::size_t j = 0; j < k; ++j) {
                row[j] = (row[j] + nf * prow[j]) % p;
                irow[j] = (irow[j] + nf * pinv[j]) % p;
            }
        }
    }
    return true;
}

constexpr std::size_t kProbeEquations = 10;

const std::array<std::uint32_t, kBigPrime>& inverse_table()
{
    static const auto table = [] {
        std::array<std::uint32_t, kBigPrime> t{};
        for (std::uint32_t v = 1; v < kBigPrime; ++v) {
            t[v] = F337::from_raw(v).inverse().value();
        }
        return t;
    }();
    return table;
}

// Largest bucket of a value histogram over GF(337), reset through a
// generation stamp so that each use costs only the values touched.
class Histogram {
public:
    void clear()
    {
        ++gen_;
        best_count_ = 0;
        best_value_ = 0;
    }
    void add(std::uint32_t v)
    {
        if (stamp_[v] != gen_) {
            stamp_[v] = gen_;
            count_[v] = 0;
        }
        const std::uint32_t c = ++count_[v];
        if (c > best_count_ || (c == best_count_ && v < best_value_)) {
            best_count_ = c;
            best_value_ = v;
        }
    }
    std::uint32_t best_count() const noexcept { return best_count_; }
    std::uint32_t best_value() const noexcept { return best_value_; }

private:
    std::array<std::uint32_t, kBigPrime> count_{};
    std::array<std::uint32_t, kBigPrime> stamp_{};
    std::uint32_t gen_ = 0;
    std::uint32_t best_count_ = 0;
    std::uint32_t best_value_ = 0;
};

} // namespace

// ---------------------------------------------------------------------------

std::uint32_t RationalFnKey::eval_numerator(std::uint32_t x, std::uint32_t modulus) const
{
    return eval_monic(alpha, x, modulus);
}

std::uint32_t RationalFnKey::eval_denominator(std::uint32_t x, std::uint32_t modulus) const
{
    return eval_monic(beta, x, modulus);
}

bool RationalFnKey::denominator_invertible_everywhere(std::uint32_t modulus) const
{
    for (std::uint32_t x = 0; x < modulus; ++x) {
        if (std::gcd(eval_denominator(x, modulus), modulus) != 1) {
            return false;
        }
    }
    return true;
}

RationalFnKey RationalFnKey::reduced(std::uint32_t m) const
{
    RationalFnKey out = *this;
    for (auto& a : out.alpha) {
        a %= m;
    }
    for (auto& b : out.beta) {
        b %= m;
    }
    return out;
}

bool satisfies(const RationalFnKey& key, const DataPoint& p)
{
    const std::uint64_t lhs = static_cast<std::uint64_t>(p.y) * key.eval_denominator(p.x) % kModulus;
    return lhs == key.eval_numerator(p.x);
}

std::size_t satisfied_count(const RationalFnKey& key, const std::vector<DataPoint>& points)
{
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [&](const DataPoint& p) { return satisfies(key, p); }));
}

bool same_fraction(const RationalFnKey& a, const RationalFnKey& b)
{
    for (std::uint32_t x = 0; x < kModulus; ++x) {
        const std::uint64_t lhs = static_cast<std::uint64_t>(a.eval_numerator(x)) * b.eval_denominator(x) % kModulus;
        const std::uint64_t rhs = static_cast<std::uint64_t>(b.eval_numerator(x)) * a.eval_denominator(x) % kModulus;
        if (lhs != rhs) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------

std::vector<DataPoint> parse_points(std::istream& in)
{
    std::vector<DataPoint> out;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (auto pos = rest.find(','); pos != std::string_view::npos; pos = rest.find(',')) {
            fields.push_back(rest.substr(0, pos));
            rest.remove_prefix(pos + 1);
        }
        fields.push_back(rest);
        std::uint32_t v[3] = {};
        const bool numeric = fields.size() == 3 && parse_u32(fields[0], v[0]) && parse_u32(fields[1], v[1]) &&
                             parse_u32(fields[2], v[2]);
        if (!numeric) {
            const bool has_digit = line.find_first_of("0123456789") != std::string::npos;
            if (first_content && fields.size() == 3 && !has_digit) {
                first_content = false;  // header
                continue;
            }
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected i,x,y");
        }
        first_content = false;
        if (v[1] >= kModulus || v[2] >= kModulus) {
            throw Error(Errc::RangeError, "line " + std::to_string(line_no) + ": value >= 2022");
        }
        out.push_back({static_cast<int>(v[0]), v[1], v[2]});
    }
    std::stable_sort(out.begin(), out.end(), [](const DataPoint& a, const DataPoint& b) { return a.index < b.index; });
    return out;
}

std::vector<DataPoint> load_points(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::ParseError, "cannot open " + path.string());
    }
    return parse_points(in);
}

void write_points(std::ostream& out, const std::vector<DataPoint>& points)
{
    out << "i,x,y\n";
    for (const auto& p : points) {
        out << p.index << ',' << p.x << ',' << p.y << '\n';
    }
}

// ---------------------------------------------------------------------------

std::vector<SmallModCandidate> enumerate_small_modulus(const std::vector<DataPoint>& points, std::uint32_t m)
{
    if (m != 2 && m != 3) {
        throw Error(Errc::InvalidArgument, "small modulus must be 2 or 3");
    }
    std::uint32_t tables = 1, nonzero_tables = 1;
    for (std::uint32_t i = 0; i < m; ++i) {
        tables *= m;
        nonzero_tables *= m - 1;
    }
    std::vector<SmallModCandidate> out;
    for (std::uint32_t code = 0; code < tables; ++code) {
        SmallModCandidate cand;
        cand.modulus = m;
        std::uint32_t c = code;
        for (std::uint32_t x = 0; x < m; ++x) {
            cand.ratio.push_back(c % m);
            c /= m;
        }
        // Each of the nowhere-zero g tables pairs with exactly one f table.
        cand.equivalent_pairs = nonzero_tables;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].y % m == cand.ratio[points[i].x % m]) {
                cand.satisfied.push_back(static_cast<int>(i));
            }
        }
        out.push_back(std::move(cand));
    }
    std::stable_sort(out.begin(), out.end(), [](const SmallModCandidate& a, const SmallModCandidate& b) {
        return a.satisfied.size() > b.satisfied.size();
    });
    return out;
}

std::vector<Mod6Candidate> combine_mod6(const std::vector<SmallModCandidate>& mod2,
                                        const std::vector<SmallModCandidate>& mod3)
{
    std::vector<Mod6Candidate> out;
    for (const auto& a : mod2) {
        for (const auto& b : mod3) {
            out.push_back({a, b, intersect_sorted(a.satisfied, b.satisfied)});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Mod6Candidate& a, const Mod6Candidate& b) {
        return a.satisfied.size() > b.satisfied.size();
    });
    return out;
}

// ---------------------------------------------------------------------------

LinearCodeInstance build_code(const std::vector<DataPoint>& points, const std::vector<int>& indices,
                              std::size_t degree)
{
    const auto d = static_cast<Eigen::Index>(degree);
    LinearCodeInstance code;
    code.indices = indices;
    code.generator.resize(2 * d, static_cast<Eigen::Index>(indices.size()));
    code.target.resize(static_cast<Eigen::Index>(indices.size()));
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(indices.size()); ++c) {
        const DataPoint& p = points.at(static_cast<std::size_t>(indices[static_cast<std::size_t>(c)]));
        const F337 x(static_cast<int>(p.x % kBigPrime));
        const F337 y(static_cast<int>(p.y % kBigPrime));
        F337 xp(1);
        for (Eigen::Index j = 0; j < d; ++j) {
            code.generator(j, c) = -xp;
            code.generator(d + j, c) = y * xp;
            xp *= x;
        }
        code.target(c) = y * xp - xp;
    }
    return code;
}

std::size_t codeword_distance(const LinearCodeInstance& code, const RowVectorX<F337>& s)
{
    const RowVectorX<F337> word = s * code.generator;
    std::size_t dist = 0;
    for (Eigen::Index c = 0; c < word.size(); ++c) {
        if (word(c) != -code.target(c)) {
            ++dist;
        }
    }
    return dist;
}

std::optional<IsdResult> isd_decode(const LinearCodeInstance& code, const IsdOptions& options)
{
    constexpr std::uint32_t p = kBigPrime;
    const std::size_t n = static_cast<std::size_t>(code.length());
    const std::size_t k = static_cast<std::size_t>(code.dimension());
    if (k == 0 || n <= k || options.max_errors >= n - k) {
        throw Error(Errc::InvalidArgument, "isd_decode needs max_errors < length - dimension");
    }
    // Coordinate-major copy of G^T with the negated target appended: row c
    // is the equation sum_j s_j G(j, c) = -v_c.
    const std::size_t w = k + 1;
    std::vector<std::uint32_t> rows(n * w);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t j = 0; j < k; ++j) {
            rows[c * w + j] = code.generator(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)).value();
        }
        rows[c * w + k] = (-code.target(static_cast<Eigen::Index>(c))).value();
    }
    const auto& inv_of = inverse_table();
    const std::size_t need = n - options.max_errors;
    const bool lee_brickell = options.variant == IsdVariant::LeeBrickell;

    const unsigned threads = std::max(1u, options.threads);
    std::atomic<std::uint64_t> best{options.budget};
    std::vector<std::optional<IsdResult>> found(threads);

    auto worker = [&](unsigned tid) {
        std::vector<std::uint32_t> perm(n), a(k * k), a_inv, sol(k), trial(k), coeff(k * n), resid(n), acc(k);
        std::vector<std::uint32_t> aug(k * w);
        Histogram hist;
        auto publish = [&](std::uint64_t t, std::size_t errors) {
            IsdResult r;
            r.solution.resize(static_cast<Eigen::Index>(k));
            for (std::size_t j = 0; j < k; ++j) {
                r.solution(static_cast<Eigen::Index>(j)) = F337::from_raw(trial[j]);
            }
            r.iteration = t;
            r.errors = errors;
            found[tid] = std::move(r);
            std::uint64_t cur = best.load();
            while (t < cur && !best.compare_exchange_weak(cur, t)) {
            }
        };

        auto mismatches = [&](const std::vector<std::uint32_t>& s) {
            std::size_t errors = 0;
            for (std::size_t c = 0; c < n; ++c) {
                const std::uint32_t* row = &rows[c * w];
                std::uint32_t dot = 0;
                for (std::size_t j = 0; j < k; ++j) {
                    dot += row[j] * s[j];
                }
                errors += dot % p != row[k];
            }
            return errors;
        };
        // sol + d1 * (column i1 of A^-1) + d2 * (column i2 of A^-1)
        auto shifted = [&](std::size_t i1, std::uint32_t d1, std::size_t i2, std::uint32_t d2) {
            for (std::size_t l = 0; l < k; ++l) {
                trial[l] = (sol[l] + d1 * a_inv[l * k + i1] + d2 * a_inv[l * k + i2]) % p;
            }
            return mismatches(trial);
        };

        for (std::uint64_t t = tid; t < options.budget; t += threads) {
            if (t > best.load(std::memory_order_relaxed)) {
                return;
            }
            Rng rng(split_seed(options.seed, t));
            std::iota(perm.begin(), perm.end(), 0u);
            const std::size_t drawn = lee_brickell ? std::min(n, k + 1 + kProbeEquations) : k;
            for (std::size_t i = 0; i < drawn; ++i) {
                std::swap(perm[i], perm[i + rng.below(n - i)]);
            }
            if (!lee_brickell) {
                for (std::size_t i = 0; i < k; ++i) {
                    std::copy_n(&rows[perm[i] * w], w, &aug[i * w]);
                }
                if (!solve_dense(aug, k, trial)) {
                    continue;
                }
                const std::size_t e = mismatches(trial);
                if (e <= options.max_errors) {
                    publish(t, e);
                    return;
                }
                continue;
            }
            for (std::size_t i = 0; i < k; ++i) {
                std::copy_n(&rows[perm[i] * w], k, &a[i * k]);
            }
            if (!invert_dense(a, k, a_inv)) {
                continue;
            }
            for (std::size_t l = 0; l < k; ++l) {
                std::uint32_t dot = 0;
                for (std::size_t i = 0; i < k; ++i) {
                    dot += a_inv[l * k + i] * rows[perm[i] * w + k];
                }
                sol[l] = dot % p;
            }
            // coeff(i, c): weight of sample equation i in the prediction of
            // equation c; resid(c): target minus prediction.
            std::size_t prange_errors = 0;
            for (std::size_t c = 0; c < n; ++c) {
                const std::uint32_t* row = &rows[c * w];
                std::fill(acc.begin(), acc.end(), 0u);
                std::uint32_t dot = 0;
                for (std::size_t l = 0; l < k; ++l) {
                    const std::uint32_t f = row[l];
                    const std::uint32_t* inv_row = &a_inv[l * k];
                    for (std::size_t i = 0; i < k; ++i) {
                        acc[i] += f * inv_row[i];
                    }
                    dot += f * sol[l];
                }
                for (std::size_t i = 0; i < k; ++i) {
                    coeff[i * n + c] = acc[i] % p;
                }
                resid[c] = (row[k] + p - dot % p) % p;
                prange_errors += resid[c] != 0;
            }

            std::optional<std::size_t> errors;
            if (prange_errors <= options.max_errors) {
                errors = prange_errors;
                trial = sol;
            }
            // One wrong sample equation i: shift its target by d, which
            // fixes every c with resid(c) = d * coeff(i, c).
            for (std::size_t i = 0; i < k && !errors; ++i) {
                const std::uint32_t* ci = &coeff[i * n];
                std::size_t fixed = 0;
                hist.clear();
                for (std::size_t c = 0; c < n; ++c) {
                    if (ci[c] == 0) {
                        fixed += resid[c] == 0;
                    } else if (resid[c] != 0) {
                        hist.add(resid[c] * inv_of[ci[c]] % p);
                    }
                }
                if (fixed + hist.best_count() >= need) {
                    const std::size_t e = shifted(i, hist.best_value(), i, 0);
                    if (e <= options.max_errors) {
                        errors = e;
                    }
                }
            }
            // Two wrong sample equations i < j, assuming the anchor equation
            // perm[k] is correct: the shifts (di, dj) lie on its line, which
            // every other equation meets in at most one point. Points hit
            // twice by a few probe equations are then counted in full.
            const std::size_t anchor = perm[k];
            const std::size_t probes = std::min(kProbeEquations, n - k - 1);
            std::array<std::uint32_t, kProbeEquations> hits{};
            for (std::size_t i = 0; i < k && !errors; ++i) {
                const std::uint32_t* ci = &coeff[i * n];
                for (std::size_t j = i + 1; j < k && !errors; ++j) {
                    const std::uint32_t* cj = &coeff[j * n];
                    const std::uint32_t ai = ci[anchor], aj = cj[anchor], ra = resid[anchor];
                    if (ai == 0 && aj == 0) {
                        continue;
                    }
                    // (di, dj) = base + lambda * dir along the anchor line
                    std::uint32_t base_i = 0, base_j = 0, dir_i = 0, dir_j = 0;
                    if (aj != 0) {
                        base_j = ra * inv_of[aj] % p;
                        dir_i = 1;
                        dir_j = (p - ai) * inv_of[aj] % p;
                    } else {
                        base_i = ra * inv_of[ai] % p;
                        dir_j = 1;
                    }
                    auto meet = [&](std::size_t c, std::uint32_t& lambda) {
                        const std::uint32_t slope = (dir_i * ci[c] + dir_j * cj[c]) % p;
                        if (slope == 0) {
                            return false;
                        }
                        const std::uint32_t rhs = (resid[c] + 2 * p * p - base_i * ci[c] - base_j * cj[c]) % p;
                        lambda = rhs * inv_of[slope] % p;
                        return true;
                    };
                    std::size_t hit_count = 0;
                    for (std::size_t m = 0; m < probes; ++m) {
                        std::uint32_t lambda = 0;
                        if (meet(perm[k + 1 + m], lambda)) {
                            hits[hit_count++] = lambda;
                        }
                    }
                    std::sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(hit_count));
                    for (std::size_t m = 1; m < hit_count && !errors; ++m) {
                        if (hits[m] != hits[m - 1] || (m >= 2 && hits[m] == hits[m - 2])) {
                            continue;
                        }
                        const std::uint32_t di = (base_i + hits[m] * dir_i) % p;
                        const std::uint32_t dj = (base_j + hits[m] * dir_j) % p;
                        std::size_t fixed = 0;
                        for (std::size_t c = 0; c < n; ++c) {
                            fixed += (di * ci[c] + dj * cj[c]) % p == resid[c];
                        }
                        if (fixed < need) {
                            continue;
                        }
                        const std::size_t e = shifted(i, di, j, dj);
                        if (e <= options.max_errors) {
                            errors = e;
                        }
                    }
                }
            }
            if (errors) {
                publish(t, *errors);
                return;
            }
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned tid = 0; tid < threads; ++tid) {
            pool.emplace_back(worker, tid);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    std::optional<IsdResult> out;
    for (auto& f : found) {
        if (f && (!out || f->iteration < out->iteration)) {
            out = std::move(f);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

SolveReport solve_full(const std::vector<DataPoint>& points, const SolveParams& params)
{
    if (points.size() < params.need) {
        throw Error(Errc::NoCandidate, "fewer points than the required number of matches");
    }
    if (params.degree < 3) {
        throw Error(Errc::InvalidArgument, "degree must be at least 3");
    }
    const auto mod2 = enumerate_small_modulus(points, 2);
    const auto mod3 = enumerate_small_modulus(points, 3);
    SolveReport report;
    report.mod6_ranking = combine_mod6(mod2, mod3);
    const std::size_t k = 2 * params.degree;

    for (std::size_t rank = 0; rank < std::min(params.max_mod6_candidates, report.mod6_ranking.size()); ++rank) {
        const Mod6Candidate& cand = report.mod6_ranking[rank];
        const std::size_t len = cand.satisfied.size();
        if (len < params.need || len <= k || len - params.need >= len - k) {
            break;  // ranking is descending; later entries are no better
        }
        const LinearCodeInstance code = build_code(points, cand.satisfied, params.degree);
        IsdOptions opts;
        opts.max_errors = len - params.need;
        opts.budget = params.budget;
        opts.seed = split_seed(params.seed, rank);
        opts.threads = params.threads;
        opts.variant = params.variant;
        const auto decoded = isd_decode(code, opts);
        report.total_isd_iterations += decoded ? decoded->iteration + 1 : params.budget;
        if (!decoded) {
            continue;
        }

        const std::vector<std::uint32_t> ones2(2, 1), ones3(3, 1);
        const auto f2 = monic_with_table(cand.mod2.ratio, 2, params.degree);
        const auto g2 = monic_with_table(ones2, 2, params.degree);
        const auto f3 = monic_with_table(cand.mod3.ratio, 3, params.degree);
        const auto g3 = monic_with_table(ones3, 3, params.degree);

        RationalFnKey key;
        key.alpha.resize(params.degree);
        key.beta.resize(params.degree);
        for (std::size_t j = 0; j < params.degree; ++j) {
            const auto a337 = decoded->solution(static_cast<Eigen::Index>(j)).value();
            const auto b337 = decoded->solution(static_cast<Eigen::Index>(params.degree + j)).value();
            key.alpha[j] = static_cast<std::uint32_t>(crt_solve(CrtSystem({{f2[j], 2}, {f3[j], 3}, {a337, 337}})).value());
            key.beta[j] = static_cast<std::uint32_t>(crt_solve(CrtSystem({{g2[j], 2}, {g3[j], 3}, {b337, 337}})).value());
        }
        const std::size_t count = satisfied_count(key, points);
        if (count >= params.need && key.denominator_invertible_everywhere()) {
            KeyCandidate kc;
            kc.key = std::move(key);
            kc.satisfied = count;
            kc.mod6_satisfied = len;
            kc.mod6_rank = rank;
            kc.equivalent_forms = cand.mod2.equivalent_pairs * cand.mod3.equivalent_pairs;
            kc.isd_iterations = decoded->iteration + 1;
            report.candidates.push_back(std::move(kc));
            break;
        }
    }
    if (report.candidates.empty()) {
        throw Error(Errc::NoCandidate, "no mod-6 table and decoded mod-337 solution verified");
    }
    return report;
}

// ---------------------------------------------------------------------------

SynthInstance synth_instance(std::uint64_t seed, std::size_t n_points, std::size_t n_correct, std::size_t degree)
{
    if (n_correct > n_points) {
        throw Error(Errc::InvalidArgument, "n_correct exceeds n_points");
    }
    Rng rng(seed);
    SynthInstance inst;
    inst.key.alpha.resize(degree);
    inst.key.beta.resize(degree);
    for (auto& a : inst.key.alpha) {
        a = static_cast<std::uint32_t>(rng.below(kModulus));
    }
    do {
        for (auto& b : inst.key.beta) {
            b = static_cast<std::uint32_t>(rng.below(kModulus));
        }
    } while (!inst.key.denominator_invertible_everywhere());

    std::vector<int> order(n_points);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<bool> correct(n_points, false);
    for (std::size_t i = 0; i < n_correct; ++i) {
        correct[static_cast<std::size_t>(order[i])] = true;
    }

    inst.points.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        DataPoint& p = inst.points[i];
        p.index = static_cast<int>(i + 1);
        p.x = static_cast<std::uint32_t>(rng.below(kModulus));
        const std::uint32_t exact = static_cast<std::uint32_t>(
            static_cast<std::uint64_t>(inst.key.eval_numerator(p.x)) *
            inverse_mod(inst.key.eval_denominator(p.x), kModulus) % kModulus);
        if (correct[i]) {
            p.y = exact;
            inst.correct.push_back(static_cast<int>(i));
        } else {
            do {
                p.y = static_cast<std::uint32_t>(rng.below(kModulus));
            } while (p.y == exact);
        }
    }
    return inst;
}

std::size_t gv_distance(std::size_t n, std::size_t k, std::uint64_t q)
{
    if (k == 0 || k > n || q < 2) {
        throw Error(Errc::InvalidArgument, "gv_distance needs 1 <= k <= n and q >= 2");
    }
    mpz_class bound;
    mpz_ui_pow_ui(bound.get_mpz_t(), q, n - k);
    mpz_class volume = 0, binom = 1, power = 1;  // C(n-1, i) and (q-1)^i
    std::size_t d = 1;
    // Grow d while sum_{i=0}^{d-1} C(n-1, i)(q-1)^i < q^(n-k); then the
    // condition holds for d itself and fails for d + 1.
    for (std::size_t i = 0; i + 1 <= n; ++i) {
        volume += binom * power;
        if (volume >= bound) {
            break;
        }
        d = i + 2;
        binom = binom * static_cast<unsigned long>(n - 1 - i) / static_cast<unsigned long>(i + 1);
        power *= static_cast<unsigned long>(q - 1);
    }
    return std::min(d, n - k + 1);
}

} // namespace cryptkit::rf
