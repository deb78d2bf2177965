#include <doctest.h>

#include <atomic>
#include <numeric>
#include <set>
#include <thread>

#include "cryptkit/error.hpp"
#include "cryptkit/protocols.hpp"

using namespace cryptkit;
using namespace cryptkit::protocols;

namespace {

std::string hex(const std::array<std::uint8_t, 32>& d)
{
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (auto b : d) {
        s += digits[b >> 4];
        s += digits[b & 15];
    }
    return s;
}

const RabinChain& test_chain()
{
    static const RabinChain chain = RabinChain::generate(128, 17, "master-test");
    return chain;
}

const GroupChain& test_group_chain()
{
    static const GroupChain chain = GroupChain::create(SchnorrGroup::generate(160, 512, 5), 9);
    return chain;
}

} // namespace

TEST_CASE("SHA-256 test vectors")
{
    CHECK(hex(sha256("")) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(hex(sha256("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(hash_to_integer("x", 4) == hash_to_integer("x", 4));
    CHECK(hash_to_integer("x", 4) != hash_to_integer("y", 4));
    CHECK(hash_to_integer("x", 40) < mpz_class(1) << 320);
}

TEST_CASE("three-pass worked example")
{
    const auto alice = ShamirParty::with_exponent(23, 5);
    const auto bob = ShamirParty::with_exponent(23, 7);
    CHECK(alice.d == 9);
    CHECK(bob.d == 19);
    const ShamirRun run = shamir_run(alice, bob, 4);
    // 4^5 = 12, 12^7 = 16, 16^9 = 8, 8^19 = 4 (mod 23)
    CHECK(run.transcript.x1 == 12);
    CHECK(run.transcript.x2 == 16);
    CHECK(run.transcript.x3 == 8);
    CHECK(run.recovered == 4);
    CHECK(shamir_run(alice, bob, 2).recovered == 2);
    CHECK_THROWS_AS(shamir_run(alice, bob, 1), Error);
    CHECK_THROWS_AS(shamir_run(alice, bob, 22), Error);
    CHECK_THROWS_AS(ShamirParty::with_exponent(23, 2), Error);
    CHECK_THROWS_AS(ShamirParty::with_exponent(21, 5), Error);
}

TEST_CASE("three-pass recovers every message for p <= 101")
{
    Rng rng(1);
    for (u64 p = 5; p <= 101; ++p) {
        if (!is_prime(p)) {
            continue;
        }
        const auto alice = ShamirParty::sample(p, rng);
        const auto bob = ShamirParty::sample(p, rng);
        REQUIRE(alice.c * alice.d % (p - 1) == 1);
        REQUIRE(std::gcd(alice.c, p - 1) == 1);
        for (u64 m = 2; m <= p - 2; ++m) {
            REQUIRE(shamir_run(alice, bob, m).recovered == m);
        }
    }
}

TEST_CASE("three-pass on 1000 random large instances")
{
    const std::vector<u64> primes = {2147483647ULL, 1000000007ULL, 998244353ULL, 4294967291ULL,
                                     18446744073709551557ULL};
    Rng rng(2);
    for (int t = 0; t < 1000; ++t) {
        const u64 p = primes[rng.below(primes.size())];
        const u64 m = 2 + rng.below(p - 3);
        REQUIRE(shamir_roundtrip(p, m, rng.next()).recovered == m);
    }
}

TEST_CASE("generic three-pass with commuting and non-commuting ciphers")
{
    const auto alice = ShamirParty::with_exponent(101, 7);
    const auto bob = ShamirParty::with_exponent(101, 13);
    const auto exp_run = threepass_generic([&](u64 x) { return alice.encrypt(x); },
                                           [&](u64 x) { return alice.decrypt(x); },
                                           [&](u64 x) { return bob.encrypt(x); },
                                           [&](u64 x) { return bob.decrypt(x); }, 42);
    CHECK(exp_run.success);
    CHECK(exp_run.recovered == 42);

    const u64 ka = 0x5a5a1234, kb = 0x0f0f9876;
    auto xa = [&](u64 x) { return x ^ ka; };
    auto xb = [&](u64 x) { return x ^ kb; };
    const auto xor_run = threepass_generic(xa, xa, xb, xb, 0xdeadbeef);
    CHECK(xor_run.success);

    // a fixed random byte permutation does not commute with XOR
    Rng rng(3);
    std::vector<u64> table(256), inverse(256);
    std::iota(table.begin(), table.end(), 0u);
    rng.shuffle(table);
    for (u64 i = 0; i < 256; ++i) {
        inverse[table[i]] = i;
    }
    auto pa = [&](u64 x) { return table[x & 255]; };
    auto pa_inv = [&](u64 x) { return inverse[x & 255]; };
    auto xb8 = [](u64 x) { return x ^ 0x3c; };
    int failures = 0;
    for (u64 m = 0; m < 256; ++m) {
        failures += !threepass_generic(pa, pa_inv, xb8, xb8, m).success;
    }
    CHECK(failures > 200);
}

TEST_CASE("eavesdropper recovers translation ciphers but not exponentiation")
{
    Rng rng(4);
    for (int t = 0; t < 200; ++t) {
        const u64 m = rng.next() & 0xffffffff, ka = rng.next() & 0xffffffff, kb = rng.next() & 0xffffffff;
        auto xa = [&](u64 x) { return x ^ ka; };
        auto xb = [&](u64 x) { return x ^ kb; };
        const auto run = threepass_generic(xa, xa, xb, xb, m);
        REQUIRE(xor_eavesdrop_attack(run.transcript) == m);

        const GroupOp add = add_mod_2_32();
        auto aa = [&](u64 x) { return add.op(x, ka); };
        auto ad = [&](u64 x) { return add.op(x, add.inverse(ka)); };
        auto ba = [&](u64 x) { return add.op(x, kb); };
        auto bd = [&](u64 x) { return add.op(x, add.inverse(kb)); };
        const auto arun = threepass_generic(aa, ad, ba, bd, m);
        REQUIRE(arun.success);
        REQUIRE(xor_eavesdrop_attack(arun.transcript, add) == m);
    }
    int recovered = 0;
    const u64 p = 2147483647;
    for (int t = 0; t < 200; ++t) {
        const u64 m = 2 + rng.below(p - 3);
        const auto run = shamir_roundtrip(p, m, rng.next());
        REQUIRE(run.recovered == m);
        recovered += xor_eavesdrop_attack(run.transcript, mul_mod_group(p)) == m;
    }
    CHECK(recovered == 0);
}

TEST_CASE("Rabin square roots, small modulus")
{
    const RabinChain chain = RabinChain::from_primes(7, 11, "k");
    CHECK(chain.n == 77);
    const auto roots = rabin_square_roots(chain, 4);
    CHECK(roots == std::array<mpz_class, 4>{2, 9, 68, 75});
    CHECK_THROWS_AS(rabin_square_roots(chain, 3), Error);
    CHECK_THROWS_AS(RabinChain::from_primes(5, 11, "k"), Error);
    CHECK_THROWS_AS(RabinChain::from_primes(7, 7, "k"), Error);
}

TEST_CASE("Rabin key chain")
{
    const RabinChain& chain = test_chain();
    CHECK(chain.p % 4 == 3);
    CHECK(chain.q % 4 == 3);
    CHECK(chain.p != chain.q);
    CHECK(mpz_sizeinbase(chain.n.get_mpz_t(), 2) >= 255);
    for (u64 i = 1; i <= 100; ++i) {
        const RabinKeys keys = rabin_chain_keys(chain, i);
        REQUIRE(keys.pub.index == i);
        REQUIRE(keys.sk * keys.sk % chain.n == keys.pub.pk);
        // the published counter reproduces PK from public data and K
        REQUIRE(rabin_candidate(chain.n, chain.master, i, keys.pub.counter) == keys.pub.pk);
        for (const auto& r : rabin_square_roots(chain, keys.pub.pk)) {
            REQUIRE(r * r % chain.n == keys.pub.pk);
        }
        REQUIRE(keys.sk == rabin_square_roots(chain, keys.pub.pk)[0]);
    }
    const RabinKeys a = rabin_chain_keys(chain, 7), b = rabin_chain_keys(chain, 7);
    CHECK(a.sk == b.sk);
    CHECK(a.pub.counter == b.pub.counter);
    CHECK_THROWS_AS(rabin_chain_keys(chain, 0), Error);
}

TEST_CASE("Rabin signatures")
{
    const RabinChain& chain = test_chain();
    Rng rng(5);
    const RabinKeys k3 = rabin_chain_keys(chain, 3), k4 = rabin_chain_keys(chain, 4);
    for (int t = 0; t < 100; ++t) {
        std::string msg = "payment " + std::to_string(rng.next());
        const mpz_class sig = rabin_sign(chain.n, k3.sk, msg);
        REQUIRE(rabin_verify(chain.n, k3.pub.pk, msg, sig));
        REQUIRE_FALSE(rabin_verify(chain.n, k4.pub.pk, msg, sig));
        msg[rng.below(msg.size())] ^= static_cast<char>(1u << rng.below(8));
        REQUIRE_FALSE(rabin_verify(chain.n, k3.pub.pk, msg, sig));
    }
}

TEST_CASE("group key chain")
{
    const GroupChain& chain = test_group_chain();
    const SchnorrGroup& g = chain.group;
    CHECK_NOTHROW(g.validate());
    CHECK((g.P - 1) % (2 * g.q) == 0);
    mpz_class check;
    mpz_powm(check.get_mpz_t(), g.g.get_mpz_t(), g.q.get_mpz_t(), g.P.get_mpz_t());
    CHECK(check == 1);
    for (u64 i = 1; i <= 100; ++i) {
        const GroupKeys k = group_chain_keys(chain, i);
        mpz_class pk;
        mpz_powm(pk.get_mpz_t(), g.g.get_mpz_t(), k.sk.get_mpz_t(), g.P.get_mpz_t());
        REQUIRE(pk == k.pk);
        REQUIRE(group_public_key(g, chain.pk0, i) == k.pk);
    }
    CHECK_THROWS_AS(group_chain_keys(chain, 0), Error);
}

TEST_CASE("group secret keys are distinct for i <= 10^4")
{
    const GroupChain& chain = test_group_chain();
    std::set<mpz_class> seen;
    for (u64 i = 1; i <= 10000; ++i) {
        seen.insert(chain.sk0 * index_hash(chain.group, i) % chain.group.q);
    }
    CHECK(seen.size() == 10000);
}

TEST_CASE("Schnorr signatures")
{
    const GroupChain& chain = test_group_chain();
    const GroupKeys k5 = group_chain_keys(chain, 5), k6 = group_chain_keys(chain, 6);
    for (int t = 0; t < 20; ++t) {
        const std::string msg = "coin transfer " + std::to_string(t);
        const auto sig = group_sign(chain.group, k5.sk, msg);
        CHECK(group_verify(chain.group, k5.pk, msg, sig));
        CHECK_FALSE(group_verify(chain.group, k6.pk, msg, sig));
        CHECK_FALSE(group_verify(chain.group, k5.pk, msg + "!", sig));
        auto tampered = sig;
        tampered.s = (tampered.s + 1) % chain.group.q;
        CHECK_FALSE(group_verify(chain.group, k5.pk, msg, tampered));
    }
    const auto a = group_sign(chain.group, k5.sk, "m"), b = group_sign(chain.group, k5.sk, "m");
    CHECK(a.r == b.r);
    CHECK(a.s == b.s);
}

TEST_CASE("one leaked coin key exposes the master key")
{
    const GroupChain& chain = test_group_chain();
    for (u64 j : {1ULL, 2ULL, 77ULL, 9999ULL}) {
        const GroupKeys leaked = group_chain_keys(chain, j);
        const mpz_class sk0 = recover_master_from_leak(chain.group, leaked.sk, j);
        CHECK(sk0 == chain.sk0);
        CHECK(sk0 * index_hash(chain.group, 12345) % chain.group.q == group_chain_keys(chain, 12345).sk);
    }
}

TEST_CASE("ledger scenarios, scheme A")
{
    const RabinChain& chain = test_chain();
    CoinLedger ledger(100);
    for (u64 i = 1; i <= 100; ++i) {
        const RabinKeys k = rabin_chain_keys(chain, i);
        const std::string msg = "spend " + std::to_string(i);
        const mpz_class sig = rabin_sign(chain.n, k.sk, msg);
        if (i % 10 == 0) {
            // a signature presented under the wrong coin index
            RabinPublicKey wrong = rabin_chain_keys(chain, i % 100 + 1).pub;
            if (wrong.index <= 100 && ledger.state(wrong.index) == CoinState::Unspent) {
                CHECK(spend_rabin(ledger, chain.n, chain.master, wrong, msg, sig) == SpendOutcome::BadSignature);
                CHECK(ledger.state(wrong.index) == CoinState::Unspent);
            }
        }
        REQUIRE(spend_rabin(ledger, chain.n, chain.master, k.pub, msg, sig) == SpendOutcome::Accepted);
        REQUIRE(spend_rabin(ledger, chain.n, chain.master, k.pub, msg, sig) == SpendOutcome::AlreadySpent);
    }
    CHECK(ledger.spent_count() == 100);
    RabinPublicKey unknown = rabin_chain_keys(chain, 101).pub;
    CHECK(spend_rabin(ledger, chain.n, chain.master, unknown, "x", 1) == SpendOutcome::UnknownCoin);
    // a forged counter yields a different PK, so the signature fails
    CoinLedger fresh(3);
    RabinKeys k = rabin_chain_keys(chain, 2);
    const mpz_class sig = rabin_sign(chain.n, k.sk, "m");
    k.pub.counter += 1;
    CHECK(spend_rabin(fresh, chain.n, chain.master, k.pub, "m", sig) == SpendOutcome::BadSignature);
}

TEST_CASE("ledger scenarios, scheme B")
{
    const GroupChain& chain = test_group_chain();
    CoinLedger ledger(100);
    for (u64 i = 1; i <= 100; ++i) {
        const GroupKeys k = group_chain_keys(chain, i);
        const auto sig = group_sign(chain.group, k.sk, "pay");
        if (i < 100) {
            CHECK(spend_group(ledger, chain.group, chain.pk0, i + 1, "pay", sig) == SpendOutcome::BadSignature);
        }
        REQUIRE(spend_group(ledger, chain.group, chain.pk0, i, "pay", sig) == SpendOutcome::Accepted);
        REQUIRE(spend_group(ledger, chain.group, chain.pk0, i, "pay", sig) == SpendOutcome::AlreadySpent);
    }
    CHECK(spend_group(ledger, chain.group, chain.pk0, 0, "pay", {}) == SpendOutcome::UnknownCoin);
    CHECK(spend_group(ledger, chain.group, chain.pk0, 101, "pay", {}) == SpendOutcome::UnknownCoin);
}

TEST_CASE("ledger is monotone under random operation sequences")
{
    Rng rng(6);
    CoinLedger ledger(20);
    std::vector<bool> spent(21, false);
    for (int t = 0; t < 5000; ++t) {
        const u64 coin = rng.below(23);
        const bool ok = rng.below(2) == 0;
        const SpendOutcome o = ledger.spend(coin, [&] { return ok; });
        if (coin == 0 || coin > 20) {
            REQUIRE(o == SpendOutcome::UnknownCoin);
            REQUIRE_FALSE(ledger.state(coin));
            continue;
        }
        if (!ok) {
            REQUIRE(o == SpendOutcome::BadSignature);
        } else if (spent[coin]) {
            REQUIRE(o == SpendOutcome::AlreadySpent);
        } else {
            REQUIRE(o == SpendOutcome::Accepted);
            spent[coin] = true;
        }
        for (u64 c = 1; c <= 20; ++c) {
            REQUIRE((ledger.state(c) == CoinState::Spent) == spent[c]);
        }
    }
    CHECK(spend_outcome_name(SpendOutcome::AlreadySpent) == "AlreadySpent");
}

TEST_CASE("concurrent double spends: exactly one is accepted")
{
    CoinLedger ledger(50);
    std::atomic<int> accepted{0}, rejected{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            for (u64 coin = 1; coin <= 50; ++coin) {
                const auto o = ledger.spend(coin, [] { return true; });
                if (o == SpendOutcome::Accepted) {
                    ++accepted;
                } else if (o == SpendOutcome::AlreadySpent) {
                    ++rejected;
                }
            }
        });
    }
    for (auto& th : threads) {
        th.join();
    }
    CHECK(accepted == 50);
    CHECK(rejected == 7 * 50);
    CHECK(ledger.spent_count() == 50);
}
