#include "cryptkit/protocols.hpp"

#include <algorithm>
#include <numeric>

#include <openssl/evp.h>

#include "cryptkit/error.hpp"

namespace cryptkit::protocols {

namespace {

std::string be64(u64 v)
{
    std::string out(8, '\0');
    for (int i = 7; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<char>(v & 0xff);
        v >>= 8;
    }
    return out;
}

std::string mpz_bytes(const mpz_class& v)
{
    return v.get_str(16);
}

mpz_class pow_mod(const mpz_class& base, const mpz_class& e, const mpz_class& m)
{
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

mpz_class invert(const mpz_class& a, const mpz_class& m)
{
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
        throw Error(Errc::NotInvertible, "value has no inverse");
    }
    return r;
}

mpz_class random_bits(Rng& rng, unsigned bits)
{
    mpz_class v = 0;
    for (unsigned done = 0; done < bits; done += 64) {
        v <<= 64;
        const u64 word = rng.next();
        v += mpz_class(std::to_string(word));
    }
    if (bits % 64) {
        v >>= 64 - bits % 64;
    }
    return v;
}

mpz_class random_prime_3mod4(Rng& rng, unsigned bits)
{
    for (;;) {
        mpz_class c = random_bits(rng, bits);
        mpz_setbit(c.get_mpz_t(), bits - 1);
        c |= 3;
        while (mpz_sizeinbase(c.get_mpz_t(), 2) == bits) {
            if (is_probable_prime(c)) {
                return c;
            }
            c += 4;
        }
    }
}

mpz_class sqrt_3mod4(const mpz_class& a, const mpz_class& p)
{
    return pow_mod(a, (p + 1) / 4, p);
}

bool is_qr(const mpz_class& a, const mpz_class& p)
{
    return mpz_legendre(a.get_mpz_t(), p.get_mpz_t()) == 1;
}

/// x mod q in [1, q) from a hashed domain, retrying on 0.
mpz_class hash_mod_unit(std::string_view domain, const mpz_class& modulus)
{
    const std::size_t bytes = (mpz_sizeinbase(modulus.get_mpz_t(), 2) + 7) / 8 + 8;
    for (u64 ctr = 0;; ++ctr) {
        std::string prefix(domain);
        prefix += be64(ctr);
        mpz_class v = hash_to_integer(prefix, bytes) % modulus;
        if (v != 0 && gcd(v, modulus) == 1) {
            return v;
        }
    }
}

} // namespace

// ---------------------------------------------------------------------------

ShamirParty ShamirParty::with_exponent(u64 p, u64 c)
{
    if (!is_prime(p)) {
        throw Error(Errc::NotPrime, std::to_string(p) + " is not prime");
    }
    const auto d = mod_inverse(ResidueInt::from_unsigned(c, p - 1));
    return {p, c % (p - 1), d.value()};
}

ShamirParty ShamirParty::sample(u64 p, Rng& rng)
{
    if (!is_prime(p) || p < 5) {
        throw Error(Errc::NotPrime, std::to_string(p) + " is not a usable prime");
    }
    for (;;) {
        const u64 c = 2 + rng.below(p - 3);
        if (std::gcd(c, p - 1) == 1) {
            return with_exponent(p, c);
        }
    }
}

ShamirRun shamir_run(const ShamirParty& alice, const ShamirParty& bob, u64 m)
{
    if (!is_prime(alice.p) || alice.p != bob.p) {
        throw Error(Errc::NotPrime, "parties must share one prime modulus");
    }
    if (m <= 1 || m >= alice.p - 1) {
        throw Error(Errc::BadMessageRange, "message must satisfy 1 < m < p - 1");
    }
    ShamirRun run{alice, bob, {}, 0};
    run.transcript.x1 = alice.encrypt(m);
    run.transcript.x2 = bob.encrypt(run.transcript.x1);
    run.transcript.x3 = alice.decrypt(run.transcript.x2);
    run.recovered = bob.decrypt(run.transcript.x3);
    return run;
}

ShamirRun shamir_roundtrip(u64 p, u64 m, u64 seed)
{
    if (!is_prime(p)) {
        throw Error(Errc::NotPrime, std::to_string(p) + " is not prime");
    }
    if (m <= 1 || m >= p - 1) {
        throw Error(Errc::BadMessageRange, "message must satisfy 1 < m < p - 1");
    }
    Rng rng(seed);
    const ShamirParty a = ShamirParty::sample(p, rng);
    const ShamirParty b = ShamirParty::sample(p, rng);
    return shamir_run(a, b, m);
}

GenericRun threepass_generic(const Cipher& enc_a, const Cipher& dec_a, const Cipher& enc_b, const Cipher& dec_b,
                             u64 m)
{
    GenericRun run;
    run.transcript.x1 = enc_a(m);
    run.transcript.x2 = enc_b(run.transcript.x1);
    run.transcript.x3 = dec_a(run.transcript.x2);
    run.recovered = dec_b(run.transcript.x3);
    run.success = run.recovered == m;
    return run;
}

GroupOp xor_group()
{
    return {[](u64 a, u64 b) { return a ^ b; }, [](u64 a) { return a; }};
}

GroupOp add_mod_2_32()
{
    return {[](u64 a, u64 b) { return (a + b) & 0xffffffffULL; }, [](u64 a) { return (0x100000000ULL - a) & 0xffffffffULL; }};
}

GroupOp mul_mod_group(u64 p)
{
    return {[p](u64 a, u64 b) { return mul_mod(a, b, p); },
            [p](u64 a) { return mod_inverse(ResidueInt::from_unsigned(a, p)).value(); }};
}

u64 xor_eavesdrop_attack(const Transcript& t, const GroupOp& group)
{
    return group.op(group.op(t.x1, t.x3), group.inverse(t.x2));
}

// ---------------------------------------------------------------------------

std::array<std::uint8_t, 32> sha256(std::string_view data)
{
    std::array<std::uint8_t, 32> out{};
    unsigned len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32) {
        throw Error(Errc::CheckFailed, "SHA-256 failed");
    }
    return out;
}

mpz_class hash_to_integer(std::string_view prefix, std::size_t bytes)
{
    std::string stream;
    for (u64 block = 0; stream.size() < bytes; ++block) {
        std::string in(prefix);
        in += be64(block);
        const auto d = sha256(in);
        stream.append(d.begin(), d.end());
    }
    stream.resize(bytes);
    mpz_class v;
    mpz_import(v.get_mpz_t(), bytes, 1, 1, 1, 0, stream.data());
    return v;
}

// ---------------------------------------------------------------------------

RabinChain RabinChain::from_primes(const mpz_class& p, const mpz_class& q, std::string master)
{
    if (p == q || !is_probable_prime(p) || !is_probable_prime(q) || p % 4 != 3 || q % 4 != 3) {
        throw Error(Errc::InvalidArgument, "need distinct primes congruent to 3 mod 4");
    }
    return {p, q, p * q, std::move(master)};
}

RabinChain RabinChain::generate(unsigned prime_bits, u64 seed, std::string master)
{
    if (prime_bits < 8) {
        throw Error(Errc::InvalidArgument, "prime size too small");
    }
    Rng rng(seed);
    const mpz_class p = random_prime_3mod4(rng, prime_bits);
    mpz_class q;
    do {
        q = random_prime_3mod4(rng, prime_bits);
    } while (q == p);
    return from_primes(p, q, std::move(master));
}

mpz_class rabin_candidate(const mpz_class& n, std::string_view master, u64 index, u64 counter)
{
    std::string prefix = "rabin-pk";
    prefix += be64(master.size());
    prefix += master;
    prefix += be64(index);
    prefix += be64(counter);
    const std::size_t bytes = (mpz_sizeinbase(n.get_mpz_t(), 2) + 7) / 8 + 8;
    return hash_to_integer(prefix, bytes) % n;
}

std::array<mpz_class, 4> rabin_square_roots(const RabinChain& chain, const mpz_class& value)
{
    const mpz_class a = value % chain.n;
    if (gcd(a, chain.n) != 1 || !is_qr(a % chain.p, chain.p) || !is_qr(a % chain.q, chain.q)) {
        throw Error(Errc::NonResidue, "value is not a unit quadratic residue modulo N");
    }
    const mpz_class rp = sqrt_3mod4(a % chain.p, chain.p);
    const mpz_class rq = sqrt_3mod4(a % chain.q, chain.q);
    // x = rp (mod p), x = rq (mod q)
    const mpz_class cp = chain.q * invert(chain.q, chain.p);
    const mpz_class cq = chain.p * invert(chain.p, chain.q);
    std::array<mpz_class, 4> roots;
    int i = 0;
    for (int sp : {1, -1}) {
        for (int sq : {1, -1}) {
            mpz_class x = (sp * rp * cp + sq * rq * cq) % chain.n;
            if (x < 0) {
                x += chain.n;
            }
            roots[static_cast<std::size_t>(i++)] = x;
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

RabinKeys rabin_chain_keys(const RabinChain& chain, u64 index)
{
    if (index == 0) {
        throw Error(Errc::InvalidArgument, "coin indices start at 1");
    }
    for (u64 counter = 0;; ++counter) {
        const mpz_class c = rabin_candidate(chain.n, chain.master, index, counter);
        if (gcd(c, chain.n) == 1 && is_qr(c % chain.p, chain.p) && is_qr(c % chain.q, chain.q)) {
            return {{index, counter, c}, rabin_square_roots(chain, c)[0]};
        }
    }
}

mpz_class rabin_message_hash(const mpz_class& n, std::string_view message)
{
    std::string domain = "rabin-msg";
    domain += be64(message.size());
    domain += message;
    return hash_mod_unit(domain, n);
}

mpz_class rabin_sign(const mpz_class& n, const mpz_class& sk, std::string_view message)
{
    return rabin_message_hash(n, message) * sk % n;
}

bool rabin_verify(const mpz_class& n, const mpz_class& pk, std::string_view message, const mpz_class& signature)
{
    if (signature <= 0 || signature >= n) {
        return false;
    }
    const mpz_class h = rabin_message_hash(n, message);
    return signature * signature % n == h * h % n * pk % n;
}

// ---------------------------------------------------------------------------

void SchnorrGroup::validate() const
{
    if (!is_probable_prime(P) || !is_probable_prime(q)) {
        throw Error(Errc::InvalidArgument, "P and q must be prime");
    }
    if ((P - 1) % (2 * q) != 0) {
        throw Error(Errc::InvalidArgument, "2q must divide P - 1");
    }
    if (g <= 1 || g >= P || pow_mod(g, q, P) != 1) {
        throw Error(Errc::InvalidArgument, "g must have order q");
    }
}

SchnorrGroup SchnorrGroup::generate(unsigned q_bits, unsigned p_bits, u64 seed)
{
    if (q_bits < 16 || p_bits < q_bits + 8) {
        throw Error(Errc::InvalidArgument, "group sizes too small");
    }
    Rng rng(seed);
    mpz_class q;
    do {
        q = random_bits(rng, q_bits);
        mpz_setbit(q.get_mpz_t(), q_bits - 1);
        mpz_nextprime(q.get_mpz_t(), q.get_mpz_t());
    } while (mpz_sizeinbase(q.get_mpz_t(), 2) != q_bits);
    const unsigned r_bits = p_bits - q_bits - 1;
    mpz_class P;
    for (;;) {
        mpz_class r = random_bits(rng, r_bits);
        mpz_setbit(r.get_mpz_t(), r_bits - 1);
        P = 2 * q * r + 1;
        if (mpz_sizeinbase(P.get_mpz_t(), 2) == p_bits && is_probable_prime(P)) {
            break;
        }
    }
    const mpz_class cofactor = (P - 1) / q;
    for (mpz_class h = 2;; ++h) {
        const mpz_class g = pow_mod(h, cofactor, P);
        if (g != 1) {
            SchnorrGroup grp{P, q, g};
            grp.validate();
            return grp;
        }
    }
}

GroupChain GroupChain::create(const SchnorrGroup& group, u64 seed)
{
    Rng rng(seed);
    const unsigned bits = static_cast<unsigned>(mpz_sizeinbase(group.q.get_mpz_t(), 2)) + 64;
    const mpz_class sk0 = random_bits(rng, bits) % (group.q - 1) + 1;
    return {group, sk0, pow_mod(group.g, sk0, group.P)};
}

mpz_class index_hash(const SchnorrGroup& group, u64 index)
{
    std::string domain = "coin-index";
    domain += be64(index);
    return hash_mod_unit(domain, group.q);
}

GroupKeys group_chain_keys(const GroupChain& chain, u64 index)
{
    if (index == 0) {
        throw Error(Errc::InvalidArgument, "coin indices start at 1");
    }
    const mpz_class sk = chain.sk0 * index_hash(chain.group, index) % chain.group.q;
    return {pow_mod(chain.group.g, sk, chain.group.P), sk};
}

mpz_class group_public_key(const SchnorrGroup& group, const mpz_class& pk0, u64 index)
{
    return pow_mod(pk0, index_hash(group, index), group.P);
}

namespace {

mpz_class challenge(const SchnorrGroup& group, const mpz_class& r, std::string_view message)
{
    std::string domain = "schnorr-e";
    domain += mpz_bytes(r);
    domain += '|';
    domain += message;
    const std::size_t bytes = (mpz_sizeinbase(group.q.get_mpz_t(), 2) + 7) / 8 + 8;
    return hash_to_integer(domain, bytes) % group.q;
}

} // namespace

SchnorrSignature group_sign(const SchnorrGroup& group, const mpz_class& sk, std::string_view message)
{
    std::string domain = "schnorr-k";
    domain += mpz_bytes(sk);
    domain += '|';
    domain += message;
    const mpz_class k = hash_mod_unit(domain, group.q);
    SchnorrSignature sig;
    sig.r = pow_mod(group.g, k, group.P);
    sig.e = challenge(group, sig.r, message);
    sig.s = (k + sig.e * sk) % group.q;
    return sig;
}

bool group_verify(const SchnorrGroup& group, const mpz_class& pk, std::string_view message,
                  const SchnorrSignature& sig)
{
    if (sig.r <= 0 || sig.r >= group.P || sig.s < 0 || sig.s >= group.q || sig.e < 0 || sig.e >= group.q) {
        return false;
    }
    if (sig.e != challenge(group, sig.r, message)) {
        return false;
    }
    return pow_mod(group.g, sig.s, group.P) == sig.r * pow_mod(pk, sig.e, group.P) % group.P;
}

mpz_class recover_master_from_leak(const SchnorrGroup& group, const mpz_class& sk_j, u64 j)
{
    return sk_j * invert(index_hash(group, j), group.q) % group.q;
}

// ---------------------------------------------------------------------------

std::string_view spend_outcome_name(SpendOutcome o)
{
    switch (o) {
    case SpendOutcome::Accepted: return "accepted";
    case SpendOutcome::BadSignature: return "BadSignature";
    case SpendOutcome::AlreadySpent: return "AlreadySpent";
    case SpendOutcome::UnknownCoin: return "UnknownCoin";
    }
    return "?";
}

CoinLedger::CoinLedger(u64 count) : count_(count)
{
    for (u64 i = 1; i <= count; ++i) {
        states_.emplace(i, CoinState::Unspent);
    }
}

SpendOutcome CoinLedger::spend(u64 coin, const std::function<bool()>& signature_ok)
{
    std::lock_guard lock(mu_);
    const auto it = states_.find(coin);
    if (it == states_.end()) {
        return SpendOutcome::UnknownCoin;
    }
    if (!signature_ok()) {
        return SpendOutcome::BadSignature;
    }
    if (it->second == CoinState::Spent) {
        return SpendOutcome::AlreadySpent;
    }
    it->second = CoinState::Spent;
    return SpendOutcome::Accepted;
}

std::optional<CoinState> CoinLedger::state(u64 coin) const
{
    std::lock_guard lock(mu_);
    const auto it = states_.find(coin);
    if (it == states_.end()) {
        return std::nullopt;
    }
    return it->second;
}

u64 CoinLedger::spent_count() const
{
    std::lock_guard lock(mu_);
    return static_cast<u64>(std::count_if(states_.begin(), states_.end(),
                                          [](const auto& kv) { return kv.second == CoinState::Spent; }));
}

SpendOutcome spend_rabin(CoinLedger& ledger, const mpz_class& n, std::string_view master, const RabinPublicKey& pub,
                         std::string_view message, const mpz_class& signature)
{
    return ledger.spend(pub.index, [&] {
        const mpz_class pk = rabin_candidate(n, master, pub.index, pub.counter);
        return rabin_verify(n, pk, message, signature);
    });
}

SpendOutcome spend_group(CoinLedger& ledger, const SchnorrGroup& group, const mpz_class& pk0, u64 coin,
                         std::string_view message, const SchnorrSignature& signature)
{
    return ledger.spend(coin, [&] { return group_verify(group, group_public_key(group, pk0, coin), message, signature); });
}

} // namespace cryptkit::protocols
