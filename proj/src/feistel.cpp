#include "cryptkit/feistel.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <thread>

#include "cryptkit/error.hpp"
#include "cryptkit/rng.hpp"

namespace cryptkit::feistel {

namespace {

BinaryMatrix from_rows(std::initializer_list<std::array<int, 4>> rows)
{
    BinaryMatrix a;
    int i = 0;
    for (const auto& r : rows) {
        for (int j = 0; j < 4; ++j) {
            a(i, j) = static_cast<std::uint8_t>(r[static_cast<std::size_t>(j)]);
        }
        ++i;
    }
    return a;
}

Block apply_matrix(const BinaryMatrix& a, const Block& y) noexcept
{
    Block out{};
    for (int i = 0; i < 4; ++i) {
        std::uint32_t acc = 0;
        for (int j = 0; j < 4; ++j) {
            if (a(i, j)) {
                acc ^= y[static_cast<std::size_t>(j)];
            }
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

unsigned apply_bits(const BinaryMatrix& a, unsigned x)
{
    // bit 3 - i of x is word i
    Block y{};
    for (std::size_t i = 0; i < 4; ++i) {
        y[i] = (x >> (3 - i)) & 1u;
    }
    const Block out = apply_matrix(a, y);
    unsigned r = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        r |= out[i] << (3 - i);
    }
    return r;
}

/// ddt[d * size + a] = #{u : b(u ^ d) ^ b(u) = a}
std::vector<std::uint32_t> word_ddt(const FeistelParams& p)
{
    const std::uint32_t size = p.mask() + 1;
    std::vector<std::uint32_t> ddt(static_cast<std::size_t>(size) * size, 0);
    for (std::uint32_t d = 0; d < size; ++d) {
        for (std::uint32_t u = 0; u < size; ++u) {
            ++ddt[d * size + (p.sbox[u ^ d] ^ p.sbox[u])];
        }
    }
    return ddt;
}

/// One-round output differences from delta: calls sink(eps_packed, weight)
/// where weight counts S-box input pairs (u, v) out of 2^(2m).
template <class Sink>
void one_round_transitions(const Block& delta, const FeistelParams& p, const std::vector<std::uint32_t>& ddt,
                           Sink&& sink)
{
    const std::uint32_t size = p.mask() + 1;
    for (std::uint32_t a = 0; a < size; ++a) {
        const std::uint32_t wa = ddt[delta[0] * size + a];
        if (!wa) {
            continue;
        }
        for (std::uint32_t c = 0; c < size; ++c) {
            const std::uint32_t wc = ddt[delta[2] * size + c];
            if (!wc) {
                continue;
            }
            const Block out = apply_matrix(p.matrix, {delta[0], delta[1] ^ a, delta[2], delta[3] ^ c});
            sink(pack(out, p.m), std::uint64_t{wa} * wc);
        }
    }
}

std::uint64_t checked_pow2(unsigned bits, std::uint64_t bound)
{
    if (bits >= 63 || (std::uint64_t{1} << bits) > bound) {
        throw Error(Errc::TooLarge, "exhaustive enumeration exceeds the work bound");
    }
    return std::uint64_t{1} << bits;
}

} // namespace

BinaryMatrix matrix_a1()
{
    return from_rows({{1, 1, 0, 1}, {1, 0, 1, 1}, {0, 1, 1, 1}, {1, 1, 1, 0}});
}

BinaryMatrix matrix_a2()
{
    return from_rows({{1, 1, 1, 0}, {1, 1, 0, 1}, {1, 0, 1, 1}, {0, 1, 1, 1}});
}

bool invertible_gf2(const BinaryMatrix& a)
{
    std::vector<bool> seen(16, false);
    for (unsigned x = 0; x < 16; ++x) {
        const unsigned y = apply_bits(a, x);
        if (seen[y]) {
            return false;
        }
        seen[y] = true;
    }
    return true;
}

int branch_number(const BinaryMatrix& a)
{
    int best = 8;
    for (unsigned x = 1; x < 16; ++x) {
        best = std::min(best, std::popcount(x) + std::popcount(apply_bits(a, x)));
    }
    return best;
}

int max_binary_branch_number()
{
    int best = 0;
    for (unsigned code = 0; code < (1u << 16); ++code) {
        BinaryMatrix a;
        for (int i = 0; i < 16; ++i) {
            a(i / 4, i % 4) = static_cast<std::uint8_t>((code >> i) & 1u);
        }
        if (invertible_gf2(a)) {
            best = std::max(best, branch_number(a));
        }
    }
    return best;
}

void FeistelParams::validate() const
{
    if (m < 1 || m > 8) {
        throw Error(Errc::InvalidArgument, "subblock width must be in 1..8");
    }
    if ((matrix.array() > 1).any()) {
        throw Error(Errc::InvalidArgument, "matrix entries must be 0 or 1");
    }
    if (sbox.size() != (std::size_t{1} << m)) {
        throw Error(Errc::InvalidArgument, "S-box table must have 2^m entries");
    }
    if (std::any_of(sbox.begin(), sbox.end(), [&](std::uint32_t v) { return v > mask(); })) {
        throw Error(Errc::InvalidArgument, "S-box entries must be < 2^m");
    }
    if (rounds < 1) {
        throw Error(Errc::InvalidArgument, "at least one round");
    }
}

std::vector<std::uint32_t> random_sbox(unsigned m, std::uint64_t seed)
{
    std::vector<std::uint32_t> t(std::size_t{1} << m);
    std::iota(t.begin(), t.end(), 0u);
    Rng rng(seed);
    rng.shuffle(t);
    return t;
}

bool sbox_is_bijective(const std::vector<std::uint32_t>& sbox)
{
    std::vector<bool> seen(sbox.size(), false);
    for (auto v : sbox) {
        if (v >= sbox.size() || seen[v]) {
            return false;
        }
        seen[v] = true;
    }
    return true;
}

bool sbox_is_affine(const std::vector<std::uint32_t>& sbox)
{
    for (std::size_t x = 0; x < sbox.size(); ++x) {
        for (std::size_t y = 0; y < sbox.size(); ++y) {
            if ((sbox[x ^ y] ^ sbox[x] ^ sbox[y] ^ sbox[0]) != 0) {
                return false;
            }
        }
    }
    return true;
}

Block round(const Block& x, const RoundKey& key, const FeistelParams& p)
{
    const std::uint32_t mk = p.mask();
    const Block y{x[0], x[1] ^ p.sbox[(x[0] ^ key[0]) & mk], x[2], x[3] ^ p.sbox[(x[2] ^ key[1]) & mk]};
    return apply_matrix(p.matrix, y);
}

Block encrypt(const Block& x, const std::vector<RoundKey>& keys, const FeistelParams& p)
{
    if (keys.size() != p.rounds) {
        throw Error(Errc::InvalidArgument, "need one key per round");
    }
    Block s = x;
    for (const auto& k : keys) {
        s = round(s, k, p);
    }
    return s;
}

bool round_is_permutation(const FeistelParams& p)
{
    if (p.m > 3) {
        throw Error(Errc::TooLarge, "bijectivity check limited to m <= 3");
    }
    const std::uint32_t words = p.mask() + 1;
    const std::uint32_t blocks = std::uint32_t{1} << (4 * p.m);
    for (std::uint32_t k1 = 0; k1 < words; ++k1) {
        for (std::uint32_t k0 = 0; k0 < words; ++k0) {
            std::vector<bool> seen(blocks, false);
            for (std::uint32_t v = 0; v < blocks; ++v) {
                const std::uint32_t out = pack(round(unpack(v, p.m), {k1, k0}, p), p.m);
                if (seen[out]) {
                    return false;
                }
                seen[out] = true;
            }
        }
    }
    return true;
}

Block xor_blocks(const Block& a, const Block& b) noexcept
{
    return {a[0] ^ b[0], a[1] ^ b[1], a[2] ^ b[2], a[3] ^ b[3]};
}

std::uint32_t pack(const Block& b, unsigned m) noexcept
{
    return (b[0] << (3 * m)) | (b[1] << (2 * m)) | (b[2] << m) | b[3];
}

Block unpack(std::uint32_t v, unsigned m) noexcept
{
    const std::uint32_t mk = (std::uint32_t{1} << m) - 1;
    return {(v >> (3 * m)) & mk, (v >> (2 * m)) & mk, (v >> m) & mk, v & mk};
}

// ---------------------------------------------------------------------------

std::vector<mpq_class> diff_distribution(const Block& delta, const FeistelParams& p)
{
    p.validate();
    if (p.m > 4) {
        throw Error(Errc::TooLarge, "exact distribution limited to m <= 4");
    }
    const std::size_t blocks = std::size_t{1} << (4 * p.m);
    const auto ddt = word_ddt(p);
    std::vector<mpz_class> cur(blocks, 0), next(blocks, 0);
    cur[pack(delta, p.m)] = 1;
    for (unsigned r = 0; r < p.rounds; ++r) {
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t d = 0; d < blocks; ++d) {
            if (cur[d] == 0) {
                continue;
            }
            one_round_transitions(unpack(static_cast<std::uint32_t>(d), p.m), p, ddt,
                                  [&](std::uint32_t e, std::uint64_t w) { next[e] += cur[d] * static_cast<unsigned long>(w); });
        }
        std::swap(cur, next);
    }
    mpz_class denom;
    mpz_ui_pow_ui(denom.get_mpz_t(), 2, 2UL * p.m * p.rounds);
    std::vector<mpq_class> out(blocks);
    for (std::size_t e = 0; e < blocks; ++e) {
        out[e] = mpq_class(cur[e], denom);
        out[e].canonicalize();
    }
    return out;
}

mpq_class diff_probability(const Block& delta, const Block& eps, const FeistelParams& p)
{
    return diff_distribution(delta, p)[pack(eps, p.m)];
}

mpq_class diff_probability_direct(const Block& delta, const Block& eps, const FeistelParams& p,
                                  std::uint64_t work_bound)
{
    p.validate();
    const std::uint64_t tuples = checked_pow2(2 * p.m * p.rounds, work_bound);
    const std::uint64_t inputs = checked_pow2(4 * p.m, work_bound);
    if (tuples * inputs > work_bound / p.rounds) {
        throw Error(Errc::TooLarge, "exhaustive enumeration exceeds the work bound");
    }
    const std::uint32_t mk = p.mask();
    std::uint64_t hits = 0;
    std::vector<RoundKey> keys(p.rounds);
    for (std::uint64_t t = 0; t < tuples; ++t) {
        for (unsigned r = 0; r < p.rounds; ++r) {
            const std::uint64_t bits = t >> (2 * p.m * r);
            keys[r] = {static_cast<std::uint32_t>(bits >> p.m) & mk, static_cast<std::uint32_t>(bits) & mk};
        }
        for (std::uint64_t v = 0; v < inputs; ++v) {
            const Block x = unpack(static_cast<std::uint32_t>(v), p.m);
            if (xor_blocks(encrypt(x, keys, p), encrypt(xor_blocks(x, delta), keys, p)) == eps) {
                ++hits;
            }
        }
    }
    mpq_class out(mpz_class(std::to_string(hits)), mpz_class(std::to_string(tuples * inputs)));
    out.canonicalize();
    return out;
}

SampledProbability diff_probability_sampled(const Block& delta, const Block& eps, const FeistelParams& p,
                                            std::uint64_t samples, std::uint64_t seed)
{
    p.validate();
    Rng rng(seed);
    const std::uint64_t words = std::uint64_t{p.mask()} + 1;
    SampledProbability out;
    out.samples = samples;
    std::vector<RoundKey> keys(p.rounds);
    for (std::uint64_t s = 0; s < samples; ++s) {
        Block x;
        for (auto& w : x) {
            w = static_cast<std::uint32_t>(rng.below(words));
        }
        for (auto& k : keys) {
            k = {static_cast<std::uint32_t>(rng.below(words)), static_cast<std::uint32_t>(rng.below(words))};
        }
        if (xor_blocks(encrypt(x, keys, p), encrypt(xor_blocks(x, delta), keys, p)) == eps) {
            ++out.hits;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

DiffPredicate w_eps_set(std::uint32_t eps)
{
    return [eps](const Block& a) { return a != Block{} && (a[0] ^ a[2]) == eps; };
}

DiffPredicate w_diag_set()
{
    return [](const Block& a) { return a != Block{} && a[0] == 0 && a[1] == a[2]; };
}

namespace {

struct TraceResult {
    std::vector<bool> reached;
    std::uint64_t pairs = 0;
    std::optional<Counterexample> counterexample;
};

// One round for the differences at positions lo, lo + stride, ... of
// `current`: every input x and key, or every S-box input pair.
TraceResult trace_round(const FeistelParams& p, const std::vector<std::uint32_t>& current, const DiffPredicate& set,
                        unsigned round_no, bool all_inputs, std::size_t lo, std::size_t stride)
{
    const std::uint32_t words = p.mask() + 1;
    const std::uint32_t blocks = std::uint32_t{1} << (4 * p.m);
    TraceResult res;
    res.reached.assign(blocks, false);
    auto visit = [&](const Block& x, const Block& delta, const RoundKey& k) {
        const Block out = xor_blocks(round(x, k, p), round(xor_blocks(x, delta), k, p));
        ++res.pairs;
        if (!set(out)) {
            res.counterexample = Counterexample{round_no, x, delta, k, out};
            return false;
        }
        res.reached[pack(out, p.m)] = true;
        return true;
    };
    for (std::size_t i = lo; i < current.size(); i += stride) {
        const Block delta = unpack(current[i], p.m);
        if (all_inputs) {
            for (std::uint32_t v = 0; v < blocks; ++v) {
                const Block x = unpack(v, p.m);
                for (std::uint32_t k1 = 0; k1 < words; ++k1) {
                    for (std::uint32_t k0 = 0; k0 < words; ++k0) {
                        if (!visit(x, delta, {k1, k0})) {
                            return res;
                        }
                    }
                }
            }
        } else {
            for (std::uint32_t u = 0; u < words; ++u) {
                for (std::uint32_t w = 0; w < words; ++w) {
                    if (!visit({u, 0, w, 0}, delta, {0, 0})) {
                        return res;
                    }
                }
            }
        }
    }
    return res;
}

InvariantReport verify_full_tuple(const FeistelParams& p, const std::vector<std::uint32_t>& start,
                                  const DiffPredicate& set, InvariantReport rep)
{
    const std::uint64_t bound = std::uint64_t{1} << 30;
    const std::uint64_t tuples = checked_pow2(2 * p.m * p.rounds, bound);
    const std::uint64_t inputs = checked_pow2(4 * p.m, bound);
    if (tuples * inputs * start.size() * p.rounds > bound) {
        throw Error(Errc::TooLarge, "full key-tuple tracing exceeds the work bound");
    }
    rep.method = "full key-tuple trace";
    const std::uint32_t mk = p.mask();
    for (std::uint32_t d : start) {
        const Block delta = unpack(d, p.m);
        for (std::uint64_t t = 0; t < tuples; ++t) {
            for (std::uint64_t v = 0; v < inputs; ++v) {
                Block a = unpack(static_cast<std::uint32_t>(v), p.m);
                Block b = xor_blocks(a, delta);
                for (unsigned r = 0; r < p.rounds; ++r) {
                    const std::uint64_t bits = t >> (2 * p.m * r);
                    const RoundKey k{static_cast<std::uint32_t>(bits >> p.m) & mk, static_cast<std::uint32_t>(bits) & mk};
                    const Block in_delta = xor_blocks(a, b);
                    const Block in_a = a;
                    a = round(a, k, p);
                    b = round(b, k, p);
                    ++rep.pairs_traced;
                    const Block out = xor_blocks(a, b);
                    if (!set(out)) {
                        rep.counterexample = Counterexample{r + 1, in_a, in_delta, k, out};
                        rep.pass = false;
                        return rep;
                    }
                }
            }
        }
    }
    rep.pass = true;
    return rep;
}

} // namespace

InvariantReport verify_invariant(const FeistelParams& p, const DiffPredicate& set, TraceMode mode, unsigned threads)
{
    p.validate();
    if (p.m > 4) {
        throw Error(Errc::TooLarge, "exhaustive verification limited to m <= 4");
    }
    InvariantReport rep;
    rep.sbox_bijective = sbox_is_bijective(p.sbox);
    rep.sbox_affine = sbox_is_affine(p.sbox);
    const std::uint32_t blocks = std::uint32_t{1} << (4 * p.m);
    std::vector<std::uint32_t> current;
    for (std::uint32_t v = 0; v < blocks; ++v) {
        if (set(unpack(v, p.m))) {
            current.push_back(v);
        }
    }
    rep.set_size = current.size();
    if (current.empty()) {
        throw Error(Errc::InvalidArgument, "difference set is empty");
    }
    if (mode == TraceMode::FullKeyTuple) {
        return verify_full_tuple(p, current, set, rep);
    }
    const bool all_inputs = mode == TraceMode::PerRound;
    if (all_inputs && p.m > 3) {
        throw Error(Errc::TooLarge, "per-round tracing of every input limited to m <= 3");
    }
    rep.method = all_inputs ? "per-round trace of every input, reached difference and round key"
                            : "per-round trace of every reached difference and S-box input pair";
    threads = std::max(1u, threads);
    for (unsigned r = 1; r <= p.rounds; ++r) {
        std::vector<TraceResult> parts(threads);
        if (threads == 1) {
            parts[0] = trace_round(p, current, set, r, all_inputs, 0, 1);
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t) {
                pool.emplace_back([&, t] { parts[t] = trace_round(p, current, set, r, all_inputs, t, threads); });
            }
            for (auto& th : pool) {
                th.join();
            }
        }
        std::vector<bool> reached(blocks, false);
        for (auto& part : parts) {
            rep.pairs_traced += part.pairs;
            if (part.counterexample && !rep.counterexample) {
                rep.counterexample = part.counterexample;
            }
            for (std::uint32_t v = 0; v < blocks; ++v) {
                if (part.reached[v]) {
                    reached[v] = true;
                }
            }
        }
        if (rep.counterexample) {
            rep.pass = false;
            return rep;
        }
        current.clear();
        for (std::uint32_t v = 0; v < blocks; ++v) {
            if (reached[v]) {
                current.push_back(v);
            }
        }
    }
    rep.pass = true;
    return rep;
}

InvariantReport verify_w_eps(const FeistelParams& p, std::uint32_t eps, TraceMode mode, unsigned threads)
{
    if (eps > p.mask()) {
        throw Error(Errc::InvalidArgument, "eps must be an m-bit word");
    }
    return verify_invariant(p, w_eps_set(eps), mode, threads);
}

InvariantReport verify_diagonal(const FeistelParams& p, TraceMode mode, unsigned threads)
{
    return verify_invariant(p, w_diag_set(), mode, threads);
}

std::vector<Block> reachable_differences(const FeistelParams& p, const DiffPredicate& from)
{
    p.validate();
    if (p.m > 4) {
        throw Error(Errc::TooLarge, "reachability limited to m <= 4");
    }
    const std::uint32_t blocks = std::uint32_t{1} << (4 * p.m);
    const auto ddt = word_ddt(p);
    std::vector<bool> cur(blocks, false);
    for (std::uint32_t v = 0; v < blocks; ++v) {
        cur[v] = from(unpack(v, p.m));
    }
    for (unsigned r = 0; r < p.rounds; ++r) {
        std::vector<bool> next(blocks, false);
        for (std::uint32_t v = 0; v < blocks; ++v) {
            if (cur[v]) {
                one_round_transitions(unpack(v, p.m), p, ddt, [&](std::uint32_t e, std::uint64_t) { next[e] = true; });
            }
        }
        cur.swap(next);
    }
    std::vector<Block> out;
    for (std::uint32_t v = 0; v < blocks; ++v) {
        if (cur[v]) {
            out.push_back(unpack(v, p.m));
        }
    }
    return out;
}

bool is_impossible(const FeistelParams& p, const DiffPredicate& from, const DiffPredicate& to)
{
    const auto reached = reachable_differences(p, from);
    return std::none_of(reached.begin(), reached.end(), to);
}

} // namespace cryptkit::feistel
