#include <doctest.h>

#include "cryptkit/error.hpp"
#include "cryptkit/feistel.hpp"
#include "cryptkit/rng.hpp"

using namespace cryptkit;
using namespace cryptkit::feistel;

namespace {

FeistelParams make(unsigned m, unsigned rounds, const BinaryMatrix& a, std::uint64_t sbox_seed)
{
    FeistelParams p;
    p.m = m;
    p.rounds = rounds;
    p.matrix = a;
    p.sbox = random_sbox(m, sbox_seed);
    return p;
}

Block random_block(Rng& rng, unsigned m)
{
    Block b;
    for (auto& w : b) {
        w = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << m));
    }
    return b;
}

std::vector<RoundKey> random_keys(Rng& rng, unsigned m, unsigned rounds)
{
    std::vector<RoundKey> keys(rounds);
    for (auto& k : keys) {
        k = {static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << m)),
             static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << m))};
    }
    return keys;
}

// An arbitrary table (not necessarily a permutation), for the claims that
// hold for every S-box.
std::vector<std::uint32_t> random_table(Rng& rng, unsigned m)
{
    std::vector<std::uint32_t> t(std::size_t{1} << m);
    for (auto& v : t) {
        v = static_cast<std::uint32_t>(rng.below(t.size()));
    }
    return t;
}

void check_counterexample(const FeistelParams& p, const DiffPredicate& set, const Counterexample& c)
{
    CHECK(set(c.delta));
    const Block out = xor_blocks(round(c.input, c.key, p), round(xor_blocks(c.input, c.delta), c.key, p));
    CHECK(out == c.output_delta);
    CHECK_FALSE(set(c.output_delta));
    CHECK(c.round >= 1);
    CHECK(c.round <= p.rounds);
}

} // namespace

TEST_CASE("matrix row actions")
{
    Rng rng(1);
    FeistelParams p;
    p.m = 4;
    p.sbox.assign(16, 0);  // zero S-box: the round is the bare matrix
    for (int t = 0; t < 100; ++t) {
        const Block x = random_block(rng, 4);
        const auto [x3, x2, x1, x0] = x;
        p.matrix = matrix_a1();
        CHECK(round(x, {0, 0}, p) == Block{x3 ^ x2 ^ x0, x3 ^ x1 ^ x0, x2 ^ x1 ^ x0, x3 ^ x2 ^ x1});
        p.matrix = matrix_a2();
        CHECK(round(x, {0, 0}, p) == Block{x3 ^ x2 ^ x1, x3 ^ x2 ^ x0, x3 ^ x1 ^ x0, x2 ^ x1 ^ x0});
    }
}

TEST_CASE("round formula and zero fixed point")
{
    FeistelParams p;
    p.m = 2;
    p.sbox = {0, 1, 2, 3};
    CHECK(round({0, 0, 0, 0}, {0, 0}, p) == Block{0, 0, 0, 0});

    Rng rng(2);
    p = make(3, 1, matrix_a2(), 5);
    for (int t = 0; t < 100; ++t) {
        const Block x = random_block(rng, 3);
        const RoundKey k = random_keys(rng, 3, 1)[0];
        FeistelParams bare = p;
        bare.sbox.assign(8, 0);
        const Block injected{x[0], x[1] ^ p.sbox[x[0] ^ k[0]], x[2], x[3] ^ p.sbox[x[2] ^ k[1]]};
        CHECK(round(x, k, p) == round(injected, {0, 0}, bare));
    }
}

TEST_CASE("encryption composes rounds, round 1 first")
{
    Rng rng(3);
    const FeistelParams p1 = make(3, 1, matrix_a1(), 9);
    FeistelParams p2 = p1;
    p2.rounds = 2;
    for (int t = 0; t < 100; ++t) {
        const Block x = random_block(rng, 3);
        const auto keys = random_keys(rng, 3, 2);
        CHECK(encrypt(x, {keys[0]}, p1) == round(x, keys[0], p1));
        CHECK(encrypt(x, keys, p2) == round(round(x, keys[0], p2), keys[1], p2));
    }
    CHECK_THROWS_AS(encrypt({0, 0, 0, 0}, {{0, 0}}, p2), Error);
}

TEST_CASE("golden vectors, m = 3, five rounds")
{
    FeistelParams p = make(3, 5, matrix_a1(), 2022);
    CHECK(p.sbox == std::vector<std::uint32_t>{1, 4, 7, 6, 2, 3, 5, 0});
    struct Vector {
        Block in;
        std::vector<RoundKey> keys;
        Block out;
    };
    const std::vector<Vector> vectors = {
        {{0, 5, 7, 7}, {{7, 5}, {1, 2}, {7, 1}, {7, 2}, {5, 1}}, {6, 0, 1, 7}},
        {{7, 0, 1, 4}, {{4, 5}, {6, 2}, {2, 4}, {6, 6}, {3, 3}}, {2, 2, 4, 1}},
        {{4, 7, 0, 6}, {{0, 4}, {0, 5}, {5, 3}, {4, 0}, {6, 1}}, {4, 5, 0, 4}},
        {{3, 1, 2, 5}, {{2, 4}, {3, 5}, {1, 1}, {3, 6}, {0, 5}}, {0, 2, 1, 6}},
    };
    for (const auto& v : vectors) {
        CHECK(encrypt(v.in, v.keys, p) == v.out);
    }
}

TEST_CASE("parameter validation")
{
    FeistelParams p = make(2, 1, matrix_a1(), 1);
    CHECK_NOTHROW(p.validate());
    p.sbox.push_back(0);
    CHECK_THROWS_AS(p.validate(), Error);
    p = make(2, 1, matrix_a1(), 1);
    p.sbox[0] = 4;
    CHECK_THROWS_AS(p.validate(), Error);
    p = make(2, 0, matrix_a1(), 1);
    CHECK_THROWS_AS(p.validate(), Error);
    p = make(2, 1, matrix_a1(), 1);
    p.matrix(0, 0) = 2;
    CHECK_THROWS_AS(p.validate(), Error);
    p.m = 9;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("S-box flags")
{
    CHECK(sbox_is_bijective({0, 1, 2, 3}));
    CHECK(sbox_is_affine({0, 1, 2, 3}));
    CHECK(sbox_is_affine({3, 2, 1, 0}));
    CHECK_FALSE(sbox_is_bijective({0, 0, 1, 1}));
    CHECK_FALSE(sbox_is_affine({1, 4, 7, 6, 2, 3, 5, 0}));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CHECK(sbox_is_bijective(random_sbox(4, seed)));
    }
}

TEST_CASE("branch numbers")
{
    CHECK(branch_number(matrix_a1()) == 4);
    CHECK(branch_number(matrix_a2()) == 4);
    CHECK(max_binary_branch_number() == 4);
    CHECK(branch_number(BinaryMatrix::Identity()) == 2);
    CHECK(invertible_gf2(matrix_a1()));
    CHECK(invertible_gf2(matrix_a2()));
    CHECK_FALSE(invertible_gf2(BinaryMatrix::Ones()));
}

TEST_CASE("each round is a permutation of blocks for every key, m <= 3")
{
    Rng rng(4);
    for (unsigned m = 1; m <= 3; ++m) {
        for (const auto& a : {matrix_a1(), matrix_a2()}) {
            FeistelParams p = make(m, 1, a, m);
            CHECK(round_is_permutation(p));
            p.sbox = random_table(rng, m);  // arbitrary, not bijective in general
            CHECK(round_is_permutation(p));
        }
    }
}

TEST_CASE("exact distributions sum to one")
{
    Rng rng(5);
    for (unsigned m = 1; m <= 3; ++m) {
        for (unsigned rounds = 1; rounds <= 2; ++rounds) {
            const FeistelParams p = make(m, rounds, matrix_a1(), 10 + m);
            for (int t = 0; t < 3; ++t) {
                const Block delta = random_block(rng, m);
                const auto dist = diff_distribution(delta, p);
                CHECK(dist.size() == (std::size_t{1} << (4 * m)));
                mpq_class total = 0;
                for (const auto& q : dist) {
                    CHECK(q >= 0);
                    total += q;
                }
                CHECK(total == 1);
            }
        }
    }
}

TEST_CASE("linear cipher propagates a difference with probability one")
{
    FeistelParams p;
    p.m = 2;
    p.rounds = 3;
    p.matrix = BinaryMatrix::Identity();
    p.sbox.assign(4, 0);
    CHECK(diff_probability({1, 2, 3, 0}, {1, 2, 3, 0}, p) == 1);
    CHECK(diff_probability({1, 2, 3, 0}, {1, 2, 3, 1}, p) == 0);
}

TEST_CASE("Markov chaining agrees with direct enumeration")
{
    Rng rng(6);
    for (unsigned m = 1; m <= 2; ++m) {
        for (unsigned rounds = 1; rounds <= 2; ++rounds) {
            for (const auto& a : {matrix_a1(), matrix_a2()}) {
                FeistelParams p = make(m, rounds, a, 20 + m + rounds);
                p.sbox = random_table(rng, m);
                for (int t = 0; t < 4; ++t) {
                    const Block d = random_block(rng, m), e = random_block(rng, m);
                    REQUIRE(diff_probability(d, e, p) == diff_probability_direct(d, e, p));
                }
            }
        }
    }
    const FeistelParams big = make(3, 3, matrix_a1(), 1);
    CHECK_THROWS_AS(diff_probability_direct({1, 0, 0, 0}, {1, 0, 0, 0}, big, 1000), Error);
}

TEST_CASE("sampled estimates approach the exact probability")
{
    const FeistelParams p = make(2, 2, matrix_a1(), 31);
    const Block d{1, 0, 1, 2};
    const auto dist = diff_distribution(d, p);
    std::size_t best = 0;
    for (std::size_t i = 1; i < dist.size(); ++i) {
        if (dist[i] > dist[best]) {
            best = i;
        }
    }
    const Block e = unpack(static_cast<std::uint32_t>(best), 2);
    const auto s = diff_probability_sampled(d, e, p, 40000, 3);
    CHECK(s.samples == 40000);
    CHECK(std::abs(s.estimate() - dist[best].get_d()) < 0.02);
}

TEST_CASE("W(eps) sets: the worked instances")
{
    const FeistelParams p = make(2, 2, matrix_a1(), 7);
    const auto w0 = w_eps_set(0), w1 = w_eps_set(1);
    for (std::uint32_t v = 1; v < 256; ++v) {
        const Block d = unpack(v, 2);
        if (!w0(d)) {
            continue;
        }
        mpq_class inside = 0;
        const auto dist = diff_distribution(d, p);
        for (std::uint32_t u = 0; u < 256; ++u) {
            if (w0(unpack(u, 2))) {
                inside += dist[u];
            }
            if (w1(unpack(u, 2))) {
                REQUIRE(dist[u] == 0);
            }
        }
        REQUIRE(inside == 1);
    }
    CHECK(is_impossible(p, w0, w1));
    CHECK_FALSE(is_impossible(p, w0, w0));
}

TEST_CASE("W(eps) invariance under the first matrix: 20 tables, every eps, m 1..3, 1..3 rounds")
{
    Rng rng(8);
    for (unsigned m = 1; m <= 3; ++m) {
        for (unsigned rounds = 1; rounds <= 3; ++rounds) {
            for (int table = 0; table < 20; ++table) {
                FeistelParams p = make(m, rounds, matrix_a1(), 0);
                p.sbox = table % 2 ? random_sbox(m, rng.next()) : random_table(rng, m);
                for (std::uint32_t eps = 0; eps <= p.mask(); ++eps) {
                    const auto r = verify_w_eps(p, eps, TraceMode::SboxInputs);
                    REQUIRE(r.pass);
                    REQUIRE_FALSE(r.counterexample);
                }
            }
        }
    }
}

TEST_CASE("diagonal invariance under the second matrix: 20 tables, m 1..3, 1..3 rounds")
{
    Rng rng(9);
    for (unsigned m = 1; m <= 3; ++m) {
        for (unsigned rounds = 1; rounds <= 3; ++rounds) {
            for (int table = 0; table < 20; ++table) {
                FeistelParams p = make(m, rounds, matrix_a2(), 0);
                p.sbox = table % 2 ? random_sbox(m, rng.next()) : random_table(rng, m);
                const auto r = verify_diagonal(p, TraceMode::SboxInputs);
                REQUIRE(r.pass);
                REQUIRE(r.set_size == (std::size_t{1} << (2 * m)) - 1);
            }
        }
    }
}

TEST_CASE("trace modes agree where each is feasible")
{
    Rng rng(10);
    for (unsigned m = 1; m <= 2; ++m) {
        for (unsigned rounds = 1; rounds <= 2; ++rounds) {
            for (const auto& a : {matrix_a1(), matrix_a2()}) {
                FeistelParams p = make(m, rounds, a, 0);
                p.sbox = random_table(rng, m);
                for (const auto& set : {w_eps_set(0), w_eps_set(1), w_diag_set()}) {
                    const bool per_round = verify_invariant(p, set, TraceMode::PerRound).pass;
                    CHECK(verify_invariant(p, set, TraceMode::SboxInputs).pass == per_round);
                    if (m == 1 || rounds == 1) {
                        CHECK(verify_invariant(p, set, TraceMode::FullKeyTuple).pass == per_round);
                    }
                    CHECK(verify_invariant(p, set, TraceMode::PerRound, 3).pass == per_round);
                }
            }
        }
    }
    // the per-round trace at m = 3 for one table
    const FeistelParams p = make(3, 2, matrix_a1(), 44);
    CHECK(verify_w_eps(p, 5, TraceMode::PerRound).pass);
}

TEST_CASE("swapping the matrices breaks both invariants, with checked counterexamples")
{
    for (unsigned m = 1; m <= 3; ++m) {
        const FeistelParams wrong1 = make(m, 2, matrix_a2(), 50 + m);
        const auto r1 = verify_w_eps(wrong1, 0, TraceMode::SboxInputs);
        CHECK_FALSE(r1.pass);
        REQUIRE(r1.counterexample);
        check_counterexample(wrong1, w_eps_set(0), *r1.counterexample);

        const FeistelParams wrong2 = make(m, 2, matrix_a1(), 60 + m);
        const auto r2 = verify_diagonal(wrong2, TraceMode::SboxInputs);
        CHECK_FALSE(r2.pass);
        REQUIRE(r2.counterexample);
        check_counterexample(wrong2, w_diag_set(), *r2.counterexample);
    }
    const FeistelParams wrong = make(2, 2, matrix_a2(), 3);
    const auto r = verify_w_eps(wrong, 1, TraceMode::PerRound);
    REQUIRE(r.counterexample);
    check_counterexample(wrong, w_eps_set(1), *r.counterexample);
}

TEST_CASE("diagonal set: differences outside it are impossible")
{
    Rng rng(11);
    for (unsigned m = 1; m <= 2; ++m) {
        const FeistelParams p = make(m, 3, matrix_a2(), 70 + m);
        const auto w = w_diag_set();
        for (int t = 0; t < 20; ++t) {
            const Block target = random_block(rng, m);
            if (w(target) || target == Block{0, 0, 0, 0}) {
                continue;
            }
            CHECK(is_impossible(p, w, [&](const Block& b) { return b == target; }));
            CHECK(diff_probability({0, 1, 1, 0}, target, p) == 0);
        }
        for (const auto& b : reachable_differences(p, w)) {
            CHECK(w(b));
        }
    }
}

TEST_CASE("reachable differences are the support of the exact distribution")
{
    const FeistelParams p = make(2, 2, matrix_a1(), 80);
    const Block d{1, 2, 3, 0};
    const auto reach = reachable_differences(p, [&](const Block& b) { return b == d; });
    const auto dist = diff_distribution(d, p);
    std::size_t support = 0;
    for (const auto& q : dist) {
        support += q > 0;
    }
    CHECK(reach.size() == support);
    for (const auto& b : reach) {
        CHECK(dist[pack(b, 2)] > 0);
    }
}

TEST_CASE("pack and unpack are inverse")
{
    for (std::uint32_t v = 0; v < 4096; ++v) {
        REQUIRE(pack(unpack(v, 3), 3) == v);
    }
}
