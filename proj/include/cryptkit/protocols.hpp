#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "cryptkit/numtheory.hpp"
#include "cryptkit/rng.hpp"

namespace cryptkit::protocols {

// ---------------------------------------------------------------------------
// Three-pass message transfer

struct Transcript {
    u64 x1 = 0;
    u64 x2 = 0;
    u64 x3 = 0;
};

/// Exponent pair for one party: c * d = 1 (mod p - 1).
struct ShamirParty {
    u64 p = 0;
    u64 c = 0;
    u64 d = 0;

    /// Throws Errc::NotPrime or Errc::NotInvertible.
    static ShamirParty with_exponent(u64 p, u64 c);
    static ShamirParty sample(u64 p, Rng& rng);

    u64 encrypt(u64 x) const noexcept { return pow_mod(x, c, p); }
    u64 decrypt(u64 x) const noexcept { return pow_mod(x, d, p); }
};

struct ShamirRun {
    ShamirParty alice;
    ShamirParty bob;
    Transcript transcript;
    u64 recovered = 0;
};

/// Throws Errc::NotPrime, or Errc::BadMessageRange unless 1 < m < p - 1.
ShamirRun shamir_run(const ShamirParty& alice, const ShamirParty& bob, u64 m);
/// Samples both parties' exponents from `seed`.
ShamirRun shamir_roundtrip(u64 p, u64 m, u64 seed);

using Cipher = std::function<u64(u64)>;

struct GenericRun {
    Transcript transcript;
    u64 recovered = 0;
    bool success = false;
};

/// x1 = encA(m), x2 = encB(x1), x3 = decA(x2), recovered = decB(x3).
GenericRun threepass_generic(const Cipher& enc_a, const Cipher& dec_a, const Cipher& enc_b, const Cipher& dec_b,
                             u64 m);

/// A group operation with inverse, used by the eavesdropper.
struct GroupOp {
    std::function<u64(u64, u64)> op;
    std::function<u64(u64)> inverse;
};

GroupOp xor_group();
/// Addition modulo 2^32.
GroupOp add_mod_2_32();
/// Multiplication in Z_p^*.
GroupOp mul_mod_group(u64 p);

/// x1 o x3 o x2^{-1}.
u64 xor_eavesdrop_attack(const Transcript& t, const GroupOp& group = xor_group());

// ---------------------------------------------------------------------------
// Hashing

std::array<std::uint8_t, 32> sha256(std::string_view data);
/// Deterministic byte stream SHA-256(prefix || block counter) truncated to
/// `bytes`, read big-endian.
mpz_class hash_to_integer(std::string_view prefix, std::size_t bytes);

// ---------------------------------------------------------------------------
// E-coin scheme A: Rabin square roots modulo N = p q

struct RabinChain {
    mpz_class p;
    mpz_class q;
    mpz_class n;
    std::string master;

    /// Throws Errc::InvalidArgument unless p != q are primes = 3 (mod 4).
    static RabinChain from_primes(const mpz_class& p, const mpz_class& q, std::string master);
    /// Two random primes = 3 (mod 4) of `prime_bits` bits each.
    static RabinChain generate(unsigned prime_bits, u64 seed, std::string master);
};

struct RabinPublicKey {
    u64 index = 0;
    u64 counter = 0;
    mpz_class pk;
};

struct RabinKeys {
    RabinPublicKey pub;
    mpz_class sk;
};

/// Candidate PK for (K, i, counter): SHA-256 stream over
/// "rabin-pk" || K || i || counter, reduced mod N. Needs only public data
/// plus the shared master seed.
mpz_class rabin_candidate(const mpz_class& n, std::string_view master, u64 index, u64 counter);

/// The four square roots of a quadratic residue modulo N, ascending.
/// Throws Errc::NonResidue.
std::array<mpz_class, 4> rabin_square_roots(const RabinChain& chain, const mpz_class& value);

/// First counter whose candidate is a unit QR modulo p and q; SK is the
/// smallest root. Throws Errc::InvalidArgument for i = 0.
RabinKeys rabin_chain_keys(const RabinChain& chain, u64 index);

/// Hash of the message into Z_N^* ("rabin-msg" domain, counter retry).
mpz_class rabin_message_hash(const mpz_class& n, std::string_view message);
/// c = H(m) * SK mod N.
mpz_class rabin_sign(const mpz_class& n, const mpz_class& sk, std::string_view message);
/// c^2 = H(m)^2 * PK (mod N).
bool rabin_verify(const mpz_class& n, const mpz_class& pk, std::string_view message, const mpz_class& signature);

// ---------------------------------------------------------------------------
// E-coin scheme B: key chain in a prime-order group

/// Order-q subgroup of Z_P^*, P = 2 q r + 1, generated by g.
struct SchnorrGroup {
    mpz_class P;
    mpz_class q;
    mpz_class g;

    /// Throws Errc::InvalidArgument when the structure does not hold.
    void validate() const;
    static SchnorrGroup generate(unsigned q_bits, unsigned p_bits, u64 seed);
};

struct GroupChain {
    SchnorrGroup group;
    mpz_class sk0;
    mpz_class pk0;

    static GroupChain create(const SchnorrGroup& group, u64 seed);
};

struct GroupKeys {
    mpz_class pk;
    mpz_class sk;
};

/// Hash of the coin index into Z_q^*.
mpz_class index_hash(const SchnorrGroup& group, u64 index);
/// SK_i = SK0 * H(i) mod q, PK_i = g^SK_i. Throws Errc::InvalidArgument for i = 0.
GroupKeys group_chain_keys(const GroupChain& chain, u64 index);
/// PK0^H(i), computable by the service without SK0.
mpz_class group_public_key(const SchnorrGroup& group, const mpz_class& pk0, u64 index);

struct SchnorrSignature {
    mpz_class r;  ///< commitment g^k
    mpz_class e;  ///< challenge H(r || m) mod q
    mpz_class s;  ///< response k + e * sk mod q
};

/// Deterministic nonce derived from (sk, message).
SchnorrSignature group_sign(const SchnorrGroup& group, const mpz_class& sk, std::string_view message);
bool group_verify(const SchnorrGroup& group, const mpz_class& pk, std::string_view message,
                  const SchnorrSignature& sig);

/// SK0 = SK_j * H(j)^{-1} mod q: one leaked coin key exposes the master.
mpz_class recover_master_from_leak(const SchnorrGroup& group, const mpz_class& sk_j, u64 j);

// ---------------------------------------------------------------------------
// Service ledger

enum class CoinState { Unspent, Spent };
enum class SpendOutcome { Accepted, BadSignature, AlreadySpent, UnknownCoin };

std::string_view spend_outcome_name(SpendOutcome o);

/// Coins 1..count, each Unspent until a successful spend. All access is
/// serialized by an internal mutex.
class CoinLedger {
public:
    explicit CoinLedger(u64 count);

    /// UnknownCoin, then BadSignature, then AlreadySpent are checked in
    /// that order; on success the coin becomes Spent.
    SpendOutcome spend(u64 coin, const std::function<bool()>& signature_ok);
    std::optional<CoinState> state(u64 coin) const;
    u64 size() const noexcept { return count_; }
    u64 spent_count() const;

private:
    u64 count_;
    mutable std::mutex mu_;
    std::map<u64, CoinState> states_;
};

/// Scheme A service: knows N and K; recomputes PK_i from (i, counter).
SpendOutcome spend_rabin(CoinLedger& ledger, const mpz_class& n, std::string_view master, const RabinPublicKey& pub,
                         std::string_view message, const mpz_class& signature);
/// Scheme B service: knows PK0; derives PK_i from the index.
SpendOutcome spend_group(CoinLedger& ledger, const SchnorrGroup& group, const mpz_class& pk0, u64 coin,
                         std::string_view message, const SchnorrSignature& signature);

} // namespace cryptkit::protocols
