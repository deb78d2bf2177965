#include "cryptkit/classical.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

#include "cryptkit/error.hpp"
#include "cryptkit/numtheory.hpp"

namespace cryptkit {

namespace {

std::int64_t mod(std::int64_t v, std::int64_t m)
{
    const std::int64_t r = v % m;
    return r < 0 ? r + m : r;
}

int digit_sum(int v)
{
    int s = 0;
    for (; v > 0; v /= 10) {
        s += v % 10;
    }
    return s;
}

std::vector<int> keep_shared(const std::vector<int>& codes, int (*hint)(int))
{
    std::map<int, int> freq;
    for (int c : codes) {
        ++freq[hint(c)];
    }
    std::vector<int> out;
    for (int c : codes) {
        if (freq[hint(c)] >= 2) {
            out.push_back(c);
        }
    }
    return out;
}

int pin_digit_sum(int code)
{
    return digit_sum(code);
}

int pin_product_digit_sum(int code)
{
    int product = 1;
    for (; code > 0; code /= 10) {
        product *= code % 10;
    }
    return digit_sum(product);
}

} // namespace

// ---------------------------------------------------------------------------

Alphabet::Alphabet(std::string_view symbols) : symbols_(symbols)
{
    index_.fill(-1);
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        auto& slot = index_[static_cast<unsigned char>(symbols_[i])];
        if (slot >= 0) {
            throw Error(Errc::InvalidArgument, std::string("duplicate alphabet symbol '") + symbols_[i] + "'");
        }
        slot = static_cast<int>(i);
    }
}

const Alphabet& Alphabet::base37()
{
    static const Alphabet a("ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 ");
    return a;
}

const Alphabet& Alphabet::hill30()
{
    static const Alphabet a("ABCDEFGHIJKLMNOPQRSTUVWXYZ01,!");
    return a;
}

int Alphabet::code(char c) const
{
    const int v = index_[static_cast<unsigned char>(c)];
    if (v < 0) {
        throw Error(Errc::InvalidSymbol, std::string("symbol '") + c + "' is not in the alphabet");
    }
    return v;
}

char Alphabet::symbol(int code) const
{
    if (code < 0 || code >= size()) {
        throw Error(Errc::InvalidSymbol, "code " + std::to_string(code) + " is out of range");
    }
    return symbols_[static_cast<std::size_t>(code)];
}

std::vector<int> Alphabet::encode(std::string_view text) const
{
    std::vector<int> out;
    out.reserve(text.size());
    for (char c : text) {
        out.push_back(code(c));
    }
    return out;
}

std::string Alphabet::decode(const std::vector<int>& codes) const
{
    std::string out;
    out.reserve(codes.size());
    for (int c : codes) {
        out.push_back(symbol(c));
    }
    return out;
}

// ---------------------------------------------------------------------------

void PolybiusGrid::validate() const
{
    std::string sorted = letters;
    std::sort(sorted.begin(), sorted.end());
    const bool ok = sorted.size() == 25 && std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end() &&
                    std::all_of(sorted.begin(), sorted.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
    if (!ok) {
        throw Error(Errc::InvalidArgument, "Polybius grid must hold 25 distinct letters");
    }
}

std::string polybius_decode(std::string_view cipher, const PolybiusGrid& grid, IjPreference pref)
{
    grid.validate();
    std::string compact;
    for (char c : cipher) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            compact.push_back(c);
        }
    }
    if (compact.size() % 3 != 0) {
        throw Error(Errc::MalformedCiphertext, "expected digit-digit-dot groups");
    }
    std::string out;
    for (std::size_t i = 0; i < compact.size(); i += 3) {
        const char r = compact[i], c = compact[i + 1], dot = compact[i + 2];
        if (!std::isdigit(static_cast<unsigned char>(r)) || !std::isdigit(static_cast<unsigned char>(c)) ||
            dot != '.') {
            throw Error(Errc::MalformedCiphertext, "bad group at offset " + std::to_string(i));
        }
        const int row = r - '0', col = c - '0';
        if (row < 1 || row > 5 || col < 1 || col > 5) {
            throw Error(Errc::OutOfGrid, std::string("cell ") + r + c + " is outside the 5x5 grid");
        }
        char letter = grid.letters[static_cast<std::size_t>((row - 1) * 5 + (col - 1))];
        if (letter == 'I' && pref == IjPreference::J) {
            letter = 'J';
        }
        out.push_back(letter);
    }
    return out;
}

std::string polybius_encode(std::string_view plain, const PolybiusGrid& grid)
{
    grid.validate();
    std::string out;
    for (char ch : plain) {
        const char c = ch == 'J' ? 'I' : ch;
        const auto pos = grid.letters.find(c);
        if (pos == std::string::npos) {
            throw Error(Errc::InvalidSymbol, std::string("letter '") + ch + "' is not on the grid");
        }
        out.push_back(static_cast<char>('1' + pos / 5));
        out.push_back(static_cast<char>('1' + pos % 5));
        out.push_back('.');
    }
    return out;
}

std::string read_board_path(const std::vector<std::string>& board, const PolybiusGrid& grid)
{
    std::string out;
    for (const auto& [r, c] : grid.path) {
        if (r < 0 || static_cast<std::size_t>(r) >= board.size() || c < 0 ||
            static_cast<std::size_t>(c) >= board[static_cast<std::size_t>(r)].size()) {
            throw Error(Errc::OutOfGrid, "path cell (" + std::to_string(r) + ", " + std::to_string(c) +
                                             ") is outside the board");
        }
        out.push_back(board[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::optional<std::uint64_t> wallet_feasible(std::uint64_t total, std::uint64_t target)
{
    if (total < 1 || target < 1) {
        throw Error(Errc::InvalidArgument, "total and target must be positive");
    }
    if (total < target || (total - target) % (target + 1) != 0) {
        return std::nullopt;
    }
    return (total - target) / (target + 1);
}

std::vector<std::uint64_t> simulate_wallet_splits(std::uint64_t total, std::uint64_t target)
{
    std::vector<std::uint64_t> wallets{total};
    // Peel off a wallet of `target` coins while the remainder can pay for
    // another split.
    while (wallets.back() > target && wallets.back() >= 2 * target + 1) {
        const std::uint64_t w = wallets.back();
        wallets.back() = target;
        wallets.push_back(w - 1 - target);
    }
    return wallets;
}

// ---------------------------------------------------------------------------

int QuadCipherKey::apply(int x) const noexcept
{
    return static_cast<int>(mod(static_cast<std::int64_t>(a) * x * x + static_cast<std::int64_t>(b) * x + c,
                                kQuadModulus));
}

bool satisfies_functional_equation(const QuadCipherKey& key)
{
    for (int x = 0; x < kQuadModulus; ++x) {
        for (int y = 0; y < kQuadModulus; ++y) {
            const std::int64_t lhs = key.apply(static_cast<int>(mod(x - y, kQuadModulus))) -
                                     2 * key.apply(x) * key.apply(y) +
                                     key.apply(static_cast<int>(mod(1 + x * y, kQuadModulus)));
            if (mod(lhs, kQuadModulus) != 1) {
                return false;
            }
        }
    }
    return true;
}

QuadCipherKey quad_key_recover()
{
    std::vector<QuadCipherKey> found;
    for (int a = 0; a < kQuadModulus; ++a) {
        for (int b = 0; b < kQuadModulus; ++b) {
            if (a == 0 && b == 0) {
                continue;  // constant f
            }
            for (int c = 0; c < kQuadModulus; ++c) {
                const QuadCipherKey k{a, b, c};
                if (satisfies_functional_equation(k)) {
                    found.push_back(k);
                }
            }
        }
    }
    if (found.empty()) {
        throw Error(Errc::NoSolution, "no non-constant key satisfies the functional equation");
    }
    if (found.size() > 1) {
        throw Error(Errc::AmbiguousSolution, std::to_string(found.size()) + " keys satisfy the functional equation");
    }
    return found.front();
}

std::string quad_encrypt(std::string_view plain, const QuadCipherKey& key, const Alphabet& alphabet)
{
    std::string out;
    for (char c : plain) {
        out.push_back(alphabet.symbol(key.apply(alphabet.code(c))));
    }
    return out;
}

std::vector<std::vector<char>> quad_decrypt_options(std::string_view cipher, const QuadCipherKey& key,
                                                    const Alphabet& alphabet)
{
    // Invert f(x) = a x^2 + b x + c by completing the square:
    // (2a x + b)^2 = b^2 - 4a (c - y).
    if (key.a == 0) {
        throw Error(Errc::InvalidArgument, "key is not quadratic");
    }
    const ResidueInt two_a(2 * key.a, kQuadModulus);
    const ResidueInt inv_two_a = mod_inverse(two_a);
    std::vector<std::vector<char>> out;
    for (std::size_t pos = 0; pos < cipher.size(); ++pos) {
        const int y = alphabet.code(cipher[pos]);
        const ResidueInt disc(static_cast<std::int64_t>(key.b) * key.b - 4LL * key.a * (key.c - y), kQuadModulus);
        const auto roots = sqrt_mod_prime(disc);
        if (roots.empty()) {
            throw Error(Errc::NonResidue, "ciphertext symbol at position " + std::to_string(pos) + " has no preimage");
        }
        std::vector<char> options;
        for (const auto& r : roots) {
            const auto x = (r - ResidueInt(key.b, kQuadModulus)) * inv_two_a;
            if (x.value() < static_cast<std::uint64_t>(alphabet.size())) {
                options.push_back(alphabet.symbol(static_cast<int>(x.value())));
            }
        }
        std::sort(options.begin(), options.end(),
                  [&](char l, char r) { return alphabet.code(l) < alphabet.code(r); });
        out.push_back(std::move(options));
    }
    return out;
}

std::vector<std::string> quad_decrypt(std::string_view cipher, const QuadCipherKey& key, const Alphabet& alphabet,
                                      const PlaintextScorer& scorer)
{
    const auto options = quad_decrypt_options(cipher, key, alphabet);
    std::vector<std::string> out{std::string()};
    for (const auto& opts : options) {
        std::vector<std::string> next;
        next.reserve(out.size() * opts.size());
        for (const auto& prefix : out) {
            for (char c : opts) {
                next.push_back(prefix + c);
            }
        }
        out = std::move(next);
    }
    if (scorer) {
        std::vector<std::pair<double, std::size_t>> keyed;
        keyed.reserve(out.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            keyed.emplace_back(scorer(out[i]), i);
        }
        std::stable_sort(keyed.begin(), keyed.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
        std::vector<std::string> ranked;
        ranked.reserve(out.size());
        for (const auto& [score, i] : keyed) {
            ranked.push_back(std::move(out[i]));
        }
        out = std::move(ranked);
    }
    return out;
}

// ---------------------------------------------------------------------------

HiddenPrimes hidden_primes(std::int64_t a2, std::int64_t a1, std::int64_t a0)
{
    const auto roots = integer_cubic_roots(a2, a1, a0);
    if (roots.size() != 3) {
        throw Error(Errc::CheckFailed, "expected three distinct integer roots, found " + std::to_string(roots.size()));
    }
    for (std::int64_t r : roots) {
        if (r < 2 || !is_prime(static_cast<std::uint64_t>(r))) {
            throw Error(Errc::CheckFailed, "root " + std::to_string(r) + " is not prime");
        }
    }
    HiddenPrimes hp{roots[0], roots[1], roots[2], 0};
    if ((hp.p1 + hp.p3) % hp.p2 != 0) {
        throw Error(Errc::CheckFailed, "(min + max) is not divisible by the middle root");
    }
    hp.quotient = (hp.p1 + hp.p3) / hp.p2;
    if (hp.quotient < 2 || !is_prime(static_cast<std::uint64_t>(hp.quotient))) {
        throw Error(Errc::CheckFailed, "quotient " + std::to_string(hp.quotient) + " is not prime");
    }
    return hp;
}

// ---------------------------------------------------------------------------

PinTrace pin_trace()
{
    PinTrace t;
    // Four strictly increasing digits of equal parity from 1..9.
    for (int a = 1; a <= 9; ++a) {
        for (int b = a + 2; b <= 9; b += 2) {
            for (int c = b + 2; c <= 9; c += 2) {
                for (int d = c + 2; d <= 9; d += 2) {
                    t.universe.push_back(((a * 10 + b) * 10 + c) * 10 + d);
                }
            }
        }
    }
    // Each hint is given face-to-face, so each listener rules out codes
    // against the full universe; the eavesdropper intersects both.
    t.after_sum_hint = keep_shared(t.universe, pin_digit_sum);
    t.product_hint_ambiguous = keep_shared(t.universe, pin_product_digit_sum);
    std::set_intersection(t.after_sum_hint.begin(), t.after_sum_hint.end(), t.product_hint_ambiguous.begin(),
                          t.product_hint_ambiguous.end(), std::back_inserter(t.after_product_hint));
    return t;
}

int pin_solve()
{
    const PinTrace t = pin_trace();
    if (t.after_product_hint.size() != 1) {
        throw Error(Errc::AmbiguousPin, std::to_string(t.after_product_hint.size()) + " codes survive elimination");
    }
    return t.after_product_hint.front();
}

// ---------------------------------------------------------------------------

Mat2::Mat2(const IntMat2& entries, std::int64_t modulus) : m_(entries), modulus_(modulus)
{
    if (modulus < 2) {
        throw Error(Errc::InvalidArgument, "matrix modulus must be >= 2");
    }
    m_ = m_.unaryExpr([modulus](std::int64_t v) { return mod(v, modulus); });
}

Mat2::Mat2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, std::int64_t modulus)
    : Mat2((IntMat2() << a, b, c, d).finished(), modulus)
{
}

std::int64_t Mat2::det() const
{
    return mod(m_(0, 0) * m_(1, 1) - m_(0, 1) * m_(1, 0), modulus_);
}

Mat2 Mat2::inverse() const
{
    const auto inv_det = static_cast<std::int64_t>(mod_inverse(ResidueInt(det(), static_cast<std::uint64_t>(modulus_))).value());
    IntMat2 adj;
    adj << m_(1, 1), -m_(0, 1), -m_(1, 0), m_(0, 0);
    return {adj * inv_det, modulus_};
}

Mat2 Mat2::operator*(const Mat2& o) const
{
    if (o.modulus_ != modulus_) {
        throw Error(Errc::InvalidArgument, "matrix moduli differ");
    }
    return {m_ * o.m_, modulus_};
}

Mat2 Mat2::operator+(const Mat2& o) const
{
    if (o.modulus_ != modulus_) {
        throw Error(Errc::InvalidArgument, "matrix moduli differ");
    }
    return {m_ + o.m_, modulus_};
}

Mat2 pack_block(std::string_view block, const Alphabet& alphabet)
{
    if (block.size() != 4) {
        throw Error(Errc::BadLength, "Hill blocks hold exactly 4 symbols");
    }
    const auto v = alphabet.encode(block);
    return {v[0], v[2], v[1], v[3], alphabet.size()};
}

std::string unpack_block(const Mat2& m, const Alphabet& alphabet)
{
    return alphabet.decode({static_cast<int>(m(0, 0)), static_cast<int>(m(1, 0)), static_cast<int>(m(0, 1)),
                            static_cast<int>(m(1, 1))});
}

namespace {

std::string hill_apply(std::string_view text, const Mat2& key, const Alphabet& alphabet)
{
    if (text.size() % 4 != 0) {
        throw Error(Errc::BadLength, "text length " + std::to_string(text.size()) + " is not a multiple of 4");
    }
    if (key.modulus() != alphabet.size()) {
        throw Error(Errc::InvalidArgument, "key modulus must equal the alphabet size");
    }
    std::string out;
    out.reserve(text.size());
    for (std::size_t j = 0; j < text.size(); j += 4) {
        out += unpack_block(key * pack_block(text.substr(j, 4), alphabet), alphabet);
    }
    return out;
}

} // namespace

std::string hill_encrypt(std::string_view plain, const Mat2& key, const Alphabet& alphabet)
{
    return hill_apply(plain, key, alphabet);
}

std::string hill_decrypt(std::string_view cipher, const Mat2& decrypt_key, const Alphabet& alphabet)
{
    return hill_apply(cipher, decrypt_key, alphabet);
}

HillRecovery hill_known_plaintext_recover(std::string_view cipher, int block_index, std::string_view known_block,
                                          const PlaintextScorer& scorer, const Alphabet& alphabet)
{
    const std::int64_t modulus = alphabet.size();
    if (modulus % 2 != 0 || (modulus / 2) % 2 == 0) {
        throw Error(Errc::InvalidArgument, "lifting needs an alphabet of size 2 * odd");
    }
    const std::int64_t half = modulus / 2;
    if (known_block.size() != 4) {
        throw Error(Errc::BadLength, "known block must hold 4 symbols");
    }
    if (block_index < 0 || cipher.size() < 4 * static_cast<std::size_t>(block_index + 1) || cipher.size() % 4 != 0) {
        throw Error(Errc::BadLength, "ciphertext of length " + std::to_string(cipher.size()) +
                                         " has no block " + std::to_string(block_index));
    }
    const Mat2 p = pack_block(known_block, alphabet);
    const Mat2 c = pack_block(cipher.substr(4 * static_cast<std::size_t>(block_index), 4), alphabet);

    Mat2 c_half_inv = Mat2::identity(half);
    try {
        c_half_inv = c.reduced(half).inverse();
    } catch (const Error& e) {
        if (e.code() != Errc::NotInvertible) {
            throw;
        }
        throw Error(Errc::Mod15Singular, "known ciphertext block is singular modulo " + std::to_string(half));
    }
    HillRecovery out{p.reduced(half) * c_half_inv, {}};

    for (int bits = 0; bits < 16; ++bits) {
        const Mat2 lift((bits >> 3) & 1, (bits >> 2) & 1, (bits >> 1) & 1, bits & 1, modulus);
        IntMat2 d_entries = out.base_mod15.entries() + half * lift.entries();
        const Mat2 d(d_entries, modulus);
        if (!(d * c == p)) {
            continue;
        }
        if (std::gcd(d.det(), modulus) != 1) {
            continue;  // not a decryption matrix
        }
        out.candidates.push_back({d, lift, hill_decrypt(cipher, d, alphabet)});
    }
    if (out.candidates.empty()) {
        throw Error(Errc::KnownBlockInconsistent, "no binary lift reproduces the known block");
    }
    if (scorer) {
        std::stable_sort(out.candidates.begin(), out.candidates.end(),
                         [&](const HillCandidate& l, const HillCandidate& r) {
                             return scorer(l.plaintext) > scorer(r.plaintext);
                         });
    }
    return out;
}

double interior_punctuation_score(std::string_view text)
{
    int bad = 0;
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
        const bool letter = text[i] >= 'A' && text[i] <= 'Z';
        const bool next_letter = text[i + 1] >= 'A' && text[i + 1] <= 'Z';
        if (!letter && next_letter) {
            ++bad;
        }
    }
    return -static_cast<double>(bad);
}

} // namespace cryptkit
