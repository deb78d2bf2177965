#include "cryptkit/cli.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cryptkit/classical.hpp"
#include "cryptkit/error.hpp"
#include "cryptkit/feistel.hpp"
#include "cryptkit/gf2n.hpp"
#include "cryptkit/protocols.hpp"
#include "cryptkit/qsim.hpp"
#include "cryptkit/rfdecoder.hpp"
#include "cryptkit/sbox.hpp"

namespace cryptkit::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kSafeInteger = std::uint64_t{1} << 53;

json num(std::uint64_t v)
{
    return v <= kSafeInteger ? json(v) : json(std::to_string(v));
}

json big(const mpz_class& v)
{
    return v.get_str();
}

struct Globals {
    bool json_output = false;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 1;
};

struct Envelope {
    std::string status = "ok";
    std::string provenance;
    json payload = json::object();
    std::ostringstream text;
};

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::ParseError, "cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    std::string s = ss.str();
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) {
        s.pop_back();
    }
    return s;
}

std::vector<std::int64_t> parse_int_list(const std::string& s)
{
    std::vector<std::int64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(item, &used, 0));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::logic_error&) {
            throw Error(Errc::ParseError, "not an integer list: " + s);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// classical

struct PolybiusArgs {
    std::string cipher;
    std::string file;
    bool prefer_j = false;
};

void run_polybius(const PolybiusArgs& a, Envelope& env)
{
    env.provenance = "problem:polybius-square";
    const std::string cipher = a.file.empty() ? a.cipher : read_text_file(a.file);
    if (cipher.empty()) {
        throw Error(Errc::InvalidArgument, "give --cipher or --file");
    }
    const std::string plain = polybius_decode(cipher, {}, a.prefer_j ? IjPreference::J : IjPreference::I);
    env.payload["cipher"] = cipher;
    env.payload["plaintext"] = plain;
    env.text << plain << '\n';
}

struct WalletArgs {
    std::uint64_t total = 2022;
    std::uint64_t target = 8;
};

void run_wallet(const WalletArgs& a, Envelope& env)
{
    env.provenance = "problem:wallet-splitting";
    const auto n = wallet_feasible(a.total, a.target);
    env.payload["total"] = num(a.total);
    env.payload["target"] = num(a.target);
    // total - n = target (n + 1)  <=>  total - target = (target + 1) n
    env.payload["equation"] = std::to_string(a.total >= a.target ? a.total - a.target : 0) + " = " +
                              std::to_string(a.target + 1) + "n";
    if (n) {
        env.payload["feasible"] = true;
        env.payload["splits"] = num(*n);
        env.payload["wallets"] = num(*n + 1);
        env.text << "feasible: " << *n << " splits, " << *n + 1 << " wallets of " << a.target << '\n';
    } else {
        env.status = "infeasible";
        env.payload["feasible"] = false;
        env.payload["splits"] = nullptr;
        env.text << "infeasible: " << env.payload["equation"].get<std::string>() << " has no integer solution\n";
    }
}

struct QuadArgs {
    std::string cipher = "L78V8LC7GBEYEE";
    std::string file;
    std::string encrypt;
    std::string crib;
    std::size_t top = 10;
};

void run_quadcipher(const QuadArgs& a, Envelope& env)
{
    env.provenance = "problem:quadratic-cipher";
    const QuadCipherKey key = quad_key_recover();
    env.payload["key"] = {{"a", key.a}, {"b", key.b}, {"c", key.c}};
    env.text << "key: f(x) = " << key.a << "x^2 + " << key.b << "x + " << key.c << " (mod 37)\n";
    if (!a.encrypt.empty()) {
        const std::string c = quad_encrypt(a.encrypt, key);
        env.payload["plaintext"] = a.encrypt;
        env.payload["ciphertext"] = c;
        env.text << c << '\n';
        return;
    }
    const std::string cipher = a.file.empty() ? a.cipher : read_text_file(a.file);
    const auto options = quad_decrypt_options(cipher, key);
    PlaintextScorer scorer;
    if (!a.crib.empty()) {
        const std::string crib = a.crib;
        scorer = [crib](std::string_view s) { return s.find(crib) != std::string_view::npos ? 1.0 : 0.0; };
    }
    const auto all = quad_decrypt(cipher, key, Alphabet::base37(), scorer);
    json opts = json::array();
    for (const auto& o : options) {
        opts.push_back(std::string(o.begin(), o.end()));
    }
    env.payload["ciphertext"] = cipher;
    env.payload["position_options"] = opts;
    env.payload["candidate_count"] = num(all.size());
    if (!a.crib.empty()) {
        env.payload["crib"] = a.crib;
    }
    json shown = json::array();
    for (std::size_t i = 0; i < std::min(a.top, all.size()); ++i) {
        shown.push_back(all[i]);
    }
    env.payload["candidates"] = shown;
    env.text << "options per position:";
    for (const auto& o : opts) {
        env.text << " [" << o.get<std::string>() << ']';
    }
    env.text << "\n" << all.size() << " candidate plaintexts\n";
    for (const auto& s : shown) {
        env.text << "  \"" << s.get<std::string>() << "\"\n";
    }
}

struct PrimesArgs {
    std::int64_t a2 = -342, a1 = 1691, a0 = -2022;
};

void run_primes(const PrimesArgs& a, Envelope& env)
{
    env.provenance = "problem:hidden-primes";
    const HiddenPrimes hp = hidden_primes(a.a2, a.a1, a.a0);
    env.payload["primes"] = {hp.p1, hp.p2, hp.p3};
    env.payload["quotient"] = hp.quotient;
    env.text << "primes " << hp.p1 << ", " << hp.p2 << ", " << hp.p3 << "; (" << hp.p1 << " + " << hp.p3 << ") / "
             << hp.p2 << " = " << hp.quotient << '\n';
}

void run_pin(Envelope& env)
{
    env.provenance = "problem:pin-elimination";
    const PinTrace t = pin_trace();
    const int pin = pin_solve();
    env.payload["universe"] = t.universe;
    env.payload["sum_hint_ambiguous"] = t.after_sum_hint;
    env.payload["product_hint_ambiguous"] = t.product_hint_ambiguous;
    env.payload["pin"] = pin;
    env.text << "pin " << pin << '\n';
}

struct HillArgs {
    std::string cipher = "CYPHXWQE!WNKHZ0Z";
    std::string file;
    int block = 3;
    std::string known = "FORW";
    std::string encrypt;
    std::string key = "3,1,2,3";
};

json mat_json(const Mat2& m)
{
    return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

void run_hill(const HillArgs& a, Envelope& env)
{
    env.provenance = "problem:hill-cipher";
    if (!a.encrypt.empty()) {
        const auto k = parse_int_list(a.key);
        if (k.size() != 4) {
            throw Error(Errc::ParseError, "--key needs four entries a,b,c,d");
        }
        const Mat2 key(k[0], k[1], k[2], k[3], Alphabet::hill30().size());
        const std::string c = hill_encrypt(a.encrypt, key);
        env.payload["key"] = mat_json(key);
        env.payload["plaintext"] = a.encrypt;
        env.payload["ciphertext"] = c;
        env.text << c << '\n';
        return;
    }
    const std::string cipher = a.file.empty() ? a.cipher : read_text_file(a.file);
    const HillRecovery rec = hill_known_plaintext_recover(cipher, a.block - 1, a.known, interior_punctuation_score);
    env.payload["ciphertext"] = cipher;
    env.payload["known_block"] = {{"index", a.block}, {"plaintext", a.known}};
    env.payload["base_mod15"] = mat_json(rec.base_mod15);
    json cands = json::array();
    for (const auto& c : rec.candidates) {
        cands.push_back({{"decrypt_key", mat_json(c.decrypt)},
                         {"lift", mat_json(c.lift)},
                         {"plaintext", c.plaintext},
                         {"score", interior_punctuation_score(c.plaintext)}});
    }
    env.payload["candidates"] = cands;
    env.text << "decrypt key mod 15: " << mat_json(rec.base_mod15).dump() << '\n';
    for (const auto& c : rec.candidates) {
        env.text << "  lift " << mat_json(c.lift).dump() << "  key " << mat_json(c.decrypt).dump() << "  "
                 << c.plaintext << '\n';
    }
}

struct BobArgs {
    unsigned n = 3;
    std::int64_t element = -1;
    bool exhaustive = false;
};

void run_bobsymbol(const BobArgs& a, Envelope& env)
{
    env.provenance = "problem:bob-symbol";
    env.payload["n"] = a.n;
    if (a.element >= 0) {
        const GF2nField field(a.n);
        const GF2nElem e(field, static_cast<std::uint32_t>(a.element));
        env.payload["element"] = a.element;
        env.payload["trace"] = trace(e);
        env.payload["bob_symbol"] = bob_symbol(e);
        env.payload["in_proper_subfield"] = in_proper_subfield(e);
        env.text << "B(" << a.element << ") = " << bob_symbol(e) << " (trace " << trace(e) << ")\n";
        return;
    }
    const BSetCounts c = a.exhaustive ? count_b_sets_exhaustive(a.n) : count_b_sets(a.n);
    env.payload["method"] = a.exhaustive ? "exhaustive" : "closed-form";
    env.payload["outside_subfields"] = num(static_cast<std::uint64_t>(c.outside_subfields));
    env.payload["b0"] = num(static_cast<std::uint64_t>(c.b0));
    env.payload["b1"] = num(static_cast<std::uint64_t>(c.b1));
    env.payload["b0_all_divisor_sum"] = num(static_cast<std::uint64_t>(c.b0_all_divisor_sum));
    if (c.b1 != 0) {
        env.payload["ratio"] = static_cast<double>(c.b0) / static_cast<double>(c.b1);
    } else {
        env.payload["ratio"] = nullptr;
    }
    env.text << "n = " << a.n << ": |B0| = " << c.b0 << ", |B1| = " << c.b1 << '\n';
}

// ---------------------------------------------------------------------------
// interp

struct InterpArgs {
    std::string input;
    std::string synthesize;
    std::size_t points = 324;
    std::size_t correct = 90;
    std::size_t degree = 16;
    std::size_t need = 90;
    std::uint64_t budget = 1'000'000;
    std::size_t max_mod6 = 3;
    std::string decoder = "pooled-gauss";
};

json key_json(const rf::RationalFnKey& k)
{
    return {{"alpha", k.alpha}, {"beta", k.beta}};
}

void run_interp(const InterpArgs& a, const Globals& g, Envelope& env)
{
    env.provenance = "problem:rational-interpolation";
    if (!a.synthesize.empty()) {
        const auto inst = rf::synth_instance(g.seed, a.points, a.correct, a.degree);
        std::ofstream out(a.synthesize);
        if (!out) {
            throw Error(Errc::ParseError, "cannot write " + a.synthesize);
        }
        rf::write_points(out, inst.points);
        env.payload["written"] = a.synthesize;
        env.payload["points"] = num(inst.points.size());
        env.payload["correct"] = num(inst.correct.size());
        env.payload["key"] = key_json(inst.key);
        env.text << "wrote " << inst.points.size() << " points to " << a.synthesize << '\n';
        return;
    }
    if (a.input.empty()) {
        throw Error(Errc::InvalidArgument, "give --input or --synthesize");
    }
    const auto points = rf::load_points(a.input);
    rf::SolveParams params;
    params.degree = a.degree;
    params.need = a.need;
    params.budget = a.budget;
    params.seed = g.seed;
    params.threads = g.threads;
    params.max_mod6_candidates = a.max_mod6;
    if (a.decoder == "lee-brickell") {
        params.variant = rf::IsdVariant::LeeBrickell;
    } else if (a.decoder != "pooled-gauss") {
        throw Error(Errc::InvalidArgument, "--decoder must be pooled-gauss or lee-brickell");
    }
    env.payload["decoder"] = a.decoder;
    env.payload["points"] = num(points.size());
    env.payload["need"] = num(a.need);
    env.payload["budget"] = num(a.budget);
    try {
        const auto rep = rf::solve_full(points, params);
        json cands = json::array();
        for (const auto& c : rep.candidates) {
            cands.push_back({{"key", key_json(c.key)},
                             {"satisfied", num(c.satisfied)},
                             {"mod6_satisfied", num(c.mod6_satisfied)},
                             {"mod6_rank", num(c.mod6_rank)},
                             {"equivalent_forms", num(c.equivalent_forms)},
                             {"isd_iterations", num(c.isd_iterations)}});
        }
        env.payload["candidates"] = cands;
        env.payload["total_isd_iterations"] = num(rep.total_isd_iterations);
        for (const auto& c : rep.candidates) {
            env.text << "verified key: " << c.satisfied << " points satisfied (mod-6 pool " << c.mod6_satisfied
                     << ", rank " << c.mod6_rank << ", " << c.isd_iterations << " decoder iterations)\n";
            env.text << "  alpha " << json(c.key.alpha).dump() << "\n  beta  " << json(c.key.beta).dump() << '\n';
        }
    } catch (const Error& e) {
        if (e.code() != Errc::NoCandidate) {
            throw;
        }
        env.status = "no-candidate";
        env.payload["candidates"] = json::array();
        env.payload["message"] = e.what();
        env.text << "no candidate: " << e.what() << '\n';
    }
}

// ---------------------------------------------------------------------------
// feistel

struct FeistelArgs {
    std::string matrix = "A1";
    unsigned m = 2;
    unsigned rounds = 2;
    std::string sbox = "random:1";
    std::int64_t eps = -1;
    std::string set;
    std::string mode = "per-round";
    std::string delta;
    std::string out_delta;
};

feistel::FeistelParams feistel_params(const FeistelArgs& a)
{
    feistel::FeistelParams p;
    p.m = a.m;
    p.rounds = a.rounds;
    if (a.matrix == "A1") {
        p.matrix = feistel::matrix_a1();
    } else if (a.matrix == "A2") {
        p.matrix = feistel::matrix_a2();
    } else {
        const auto v = parse_int_list(a.matrix);
        if (v.size() != 16) {
            throw Error(Errc::ParseError, "--matrix takes A1, A2 or 16 comma-separated bits");
        }
        for (int i = 0; i < 16; ++i) {
            p.matrix(i / 4, i % 4) = static_cast<std::uint8_t>(v[static_cast<std::size_t>(i)]);
        }
    }
    if (a.sbox.rfind("random:", 0) == 0) {
        p.sbox = feistel::random_sbox(a.m, static_cast<std::uint64_t>(parse_int_list(a.sbox.substr(7)).at(0)));
    } else {
        std::stringstream ss(read_text_file(a.sbox));
        std::uint32_t v;
        while (ss >> v) {
            p.sbox.push_back(v);
        }
    }
    p.validate();
    return p;
}

feistel::Block parse_block(const std::string& s)
{
    const auto v = parse_int_list(s);
    if (v.size() != 4) {
        throw Error(Errc::ParseError, "blocks are given as x3,x2,x1,x0");
    }
    return {static_cast<std::uint32_t>(v[0]), static_cast<std::uint32_t>(v[1]), static_cast<std::uint32_t>(v[2]),
            static_cast<std::uint32_t>(v[3])};
}

json block_json(const feistel::Block& b)
{
    return json::array({b[0], b[1], b[2], b[3]});
}

json report_json(const feistel::InvariantReport& r)
{
    json j = {{"pass", r.pass},
              {"method", r.method},
              {"set_size", num(r.set_size)},
              {"pairs_traced", num(r.pairs_traced)},
              {"sbox_bijective", r.sbox_bijective},
              {"sbox_affine", r.sbox_affine}};
    if (r.counterexample) {
        const auto& c = *r.counterexample;
        j["counterexample"] = {{"round", c.round},
                               {"input", block_json(c.input)},
                               {"delta", block_json(c.delta)},
                               {"key", json::array({c.key[0], c.key[1]})},
                               {"output_delta", block_json(c.output_delta)}};
    } else {
        j["counterexample"] = nullptr;
    }
    return j;
}

void run_feistel_verify(const FeistelArgs& a, const Globals& g, Envelope& env)
{
    env.provenance = "problem:feistel-distinguishers";
    const auto p = feistel_params(a);
    const std::string set = a.set.empty() ? (a.matrix == "A2" ? "diagonal" : "w-eps") : a.set;
    feistel::TraceMode mode;
    if (a.mode == "per-round") {
        mode = feistel::TraceMode::PerRound;
    } else if (a.mode == "sbox-inputs") {
        mode = feistel::TraceMode::SboxInputs;
    } else if (a.mode == "full-tuple") {
        mode = feistel::TraceMode::FullKeyTuple;
    } else {
        throw Error(Errc::InvalidArgument, "--mode must be per-round, sbox-inputs or full-tuple");
    }
    env.payload["matrix"] = a.matrix;
    env.payload["m"] = a.m;
    env.payload["rounds"] = a.rounds;
    env.payload["sbox"] = p.sbox;
    env.payload["set"] = set;
    env.payload["branch_number"] = feistel::branch_number(p.matrix);
    json reports = json::array();
    bool all = true;
    if (set == "w-eps") {
        std::vector<std::uint32_t> eps_list;
        if (a.eps >= 0) {
            eps_list.push_back(static_cast<std::uint32_t>(a.eps));
        } else {
            for (std::uint32_t e = 0; e <= p.mask(); ++e) {
                eps_list.push_back(e);
            }
        }
        for (auto e : eps_list) {
            const auto r = feistel::verify_w_eps(p, e, mode, g.threads);
            json j = report_json(r);
            j["eps"] = e;
            reports.push_back(j);
            all = all && r.pass;
            env.text << "W(" << e << ") -> W(" << e << "): " << (r.pass ? "pass" : "FAIL") << " (" << r.pairs_traced
                     << " pairs)\n";
        }
    } else if (set == "diagonal") {
        const auto r = feistel::verify_diagonal(p, mode, g.threads);
        reports.push_back(report_json(r));
        all = r.pass;
        env.text << "W -> W: " << (r.pass ? "pass" : "FAIL") << " (" << r.pairs_traced << " pairs)\n";
    } else {
        throw Error(Errc::InvalidArgument, "--set must be w-eps or diagonal");
    }
    env.payload["reports"] = reports;
    env.payload["pass"] = all;
}

void run_feistel_prob(const FeistelArgs& a, Envelope& env)
{
    env.provenance = "problem:feistel-distinguishers";
    const auto p = feistel_params(a);
    const auto d = parse_block(a.delta);
    const auto e = parse_block(a.out_delta);
    const mpq_class pr = feistel::diff_probability(d, e, p);
    env.payload["delta"] = block_json(d);
    env.payload["eps"] = block_json(e);
    env.payload["probability"] = pr.get_str();
    env.text << "p = " << pr.get_str() << '\n';
}

// ---------------------------------------------------------------------------
// sbox

struct SboxArgs {
    unsigned n = 3;
    bool exact = false;
    bool bounds = false;
    std::uint64_t mc = 0;
};

void run_sbox(const SboxArgs& a, const Globals& g, Envelope& env)
{
    env.provenance = "problem:super-dependent-sboxes";
    env.payload["n"] = a.n;
    const bool none = !a.exact && !a.bounds && a.mc == 0;
    if (a.exact || none) {
        const auto s = sbox::count_super_dependent_exact(a.n, g.threads);
        env.payload["exact"] = num(s);
        env.text << "S(" << a.n << ") = " << s << '\n';
    }
    if (a.bounds) {
        const auto [lo, hi] = sbox::s_bounds(a.n);
        env.payload["h_count"] = big(sbox::h_count(a.n));
        env.payload["a1"] = big(sbox::a1_size(a.n));
        env.payload["lower"] = big(lo);
        env.payload["upper"] = big(hi);
        if (a.n == 4) {
            const mpz_class reference("19344102217728");
            env.payload["reference"] = big(reference);
            env.payload["reference_within_bounds"] = lo <= reference && reference <= hi;
        }
        env.text << lo.get_str() << " <= S(" << a.n << ") <= " << hi.get_str() << '\n';
    }
    if (a.mc > 0) {
        const auto est = sbox::s_estimate_monte_carlo(a.n, a.mc, g.seed, g.threads);
        env.payload["monte_carlo"] = {{"samples", num(est.samples)},
                                      {"hits", num(est.hits)},
                                      {"fraction", est.fraction},
                                      {"ci95", json::array({est.lo, est.hi})},
                                      {"seed", num(g.seed)}};
        env.text << "Monte-Carlo: " << est.hits << "/" << est.samples << " = " << est.fraction << ", 95% CI ["
                 << est.lo << ", " << est.hi << "]\n";
    }
}

// ---------------------------------------------------------------------------
// qsim

json state_json(const qsim::QuantumState& s)
{
    json amps = json::array();
    for (std::size_t i = 0; i < static_cast<std::size_t>(s.amplitudes().size()); ++i) {
        std::string ket;
        for (int q = 0; q < s.n_qubits(); ++q) {
            ket += (i & s.bit(q)) ? '1' : '0';
        }
        const auto a = s[i];
        auto clean = [](double v) { return std::abs(v) < 1e-15 ? 0.0 : v; };
        amps.push_back({{"ket", ket}, {"re", clean(a.real())}, {"im", clean(a.imag())}});
    }
    return amps;
}

void state_text(std::ostream& os, const std::string& label, const qsim::QuantumState& s)
{
    os << label << ":";
    for (std::size_t i = 0; i < static_cast<std::size_t>(s.amplitudes().size()); ++i) {
        const auto a = s[i];
        if (std::abs(a) < 1e-12) {
            continue;
        }
        std::string ket;
        for (int q = 0; q < s.n_qubits(); ++q) {
            ket += (i & s.bit(q)) ? '1' : '0';
        }
        os << ' ' << std::showpos << std::setprecision(6) << a.real() << std::noshowpos << "|" << ket << ">";
    }
    os << '\n';
}

json verdict(const qsim::QuantumState& s, const std::vector<int>& side)
{
    const auto r = qsim::schmidt(s, side);
    return {{"partition", side}, {"product", r.product}, {"schmidt_rank", r.rank}, {"singular_values", r.singular_values}};
}

void run_qsim(const std::string& experiment, Envelope& env)
{
    using namespace qsim;
    env.provenance = "problem:quantum-entanglement";
    env.payload["experiment"] = experiment;
    if (experiment == "reversed-cnot") {
        env.provenance = "problem:reversed-cnot";
        json table = json::array();
        for (std::size_t i = 0; i < 4; ++i) {
            const auto out = run(reversed_cnot_circuit(), i);
            std::size_t best = 0;
            for (std::size_t j = 1; j < 4; ++j) {
                if (std::abs(out[j]) > std::abs(out[best])) {
                    best = j;
                }
            }
            const auto ket = [](std::size_t v) { return std::string{char('0' + (v >> 1)), char('0' + (v & 1))}; };
            table.push_back({{"in", ket(i)}, {"out", ket(best)}, {"amplitude", std::abs(out[best])}});
            env.text << "|" << ket(i) << "> -> |" << ket(best) << ">\n";
        }
        env.payload["truth_table"] = table;
    } else if (experiment == "ghz-plus") {
        const auto ghz = run(ghz_circuit());
        const auto rotated = apply(ghz, Gate::h(0));
        const auto plus = post_select_and_drop(rotated, 0, 0);
        const auto minus = post_select_and_drop(rotated, 0, 1);
        env.payload["state"] = state_json(ghz);
        env.payload["p_first_0"] = measure_prob(ghz, 0, 0);
        env.payload["after_z_post_select_0"] = state_json(post_select_and_drop(ghz, 0, 0));
        env.payload["after_plus"] = state_json(plus);
        env.payload["after_plus_entanglement"] = verdict(plus, {0});
        env.payload["after_minus"] = state_json(minus);
        env.payload["after_minus_entanglement"] = verdict(minus, {0});
        state_text(env.text, "GHZ", ghz);
        env.text << "P(q0 = 0) = " << measure_prob(ghz, 0, 0) << '\n';
        state_text(env.text, "q0 selected |+>", plus);
        env.text << "  entangled: " << (is_product_state(plus, {0}) ? "no" : "yes") << '\n';
        state_text(env.text, "q0 selected |->", minus);
    } else if (experiment == "w-measure") {
        const auto w = run(build_w_circuit());
        const auto zero = post_select_and_drop(w, 0, 0);
        const auto one = post_select_and_drop(w, 0, 1);
        env.payload["state"] = state_json(w);
        env.payload["p_first_0"] = measure_prob(w, 0, 0);
        env.payload["after_0"] = state_json(zero);
        env.payload["after_0_entanglement"] = verdict(zero, {0});
        env.payload["after_1"] = state_json(one);
        env.payload["after_1_entanglement"] = verdict(one, {0});
        state_text(env.text, "W", w);
        env.text << "P(q0 = 0) = " << measure_prob(w, 0, 0) << '\n';
        state_text(env.text, "q0 = 0", zero);
        env.text << "  entangled: " << (is_product_state(zero, {0}) ? "no" : "yes") << '\n';
        state_text(env.text, "q0 = 1", one);
        env.text << "  entangled: " << (is_product_state(one, {0}) ? "no" : "yes") << '\n';
    } else if (experiment == "w-plus" || experiment == "w-zero") {
        const auto w = run(build_w_circuit());
        const bool plus = experiment == "w-plus";
        const auto selected = plus ? post_select(apply(w, Gate::h(2)), 2, 0) : post_select(w, 2, 0);
        const auto pair = post_select_and_drop(plus ? apply(w, Gate::h(2)) : w, 2, 0);
        env.payload["state"] = state_json(w);
        env.payload["selected"] = state_json(selected);
        env.payload["pair"] = state_json(pair);
        env.payload["pair_entanglement"] = verdict(pair, {0});
        env.payload["third_qubit_factorizes"] = is_product_state(selected, {2});
        state_text(env.text, "W", w);
        state_text(env.text, plus ? "q2 selected |+>, remaining pair" : "q2 selected |0>, remaining pair", pair);
        env.text << "  entangled: " << (is_product_state(pair, {0}) ? "no" : "yes") << '\n';
    } else {
        throw Error(Errc::InvalidArgument, "unknown experiment " + experiment);
    }
}

// ---------------------------------------------------------------------------
// protocols

struct ThreepassArgs {
    std::string mode = "shamir";
    std::uint64_t p = 2147483647;
    std::uint64_t m = 20221;
};

json transcript_json(const protocols::Transcript& t)
{
    return {{"x1", num(t.x1)}, {"x2", num(t.x2)}, {"x3", num(t.x3)}};
}

void run_threepass(const ThreepassArgs& a, const Globals& g, Envelope& env)
{
    using namespace protocols;
    env.provenance = "problem:three-pass";
    env.payload["mode"] = a.mode;
    Rng rng(g.seed);
    if (a.mode == "shamir") {
        const auto run = shamir_roundtrip(a.p, a.m, g.seed);
        env.payload["p"] = num(a.p);
        env.payload["m"] = num(a.m);
        env.payload["alice"] = {{"c", num(run.alice.c)}, {"d", num(run.alice.d)}};
        env.payload["bob"] = {{"c", num(run.bob.c)}, {"d", num(run.bob.d)}};
        env.payload["transcript"] = transcript_json(run.transcript);
        env.payload["recovered"] = num(run.recovered);
        env.text << "x1 = " << run.transcript.x1 << ", x2 = " << run.transcript.x2 << ", x3 = " << run.transcript.x3
                 << "\nrecovered " << run.recovered << '\n';
    } else if (a.mode == "xor-demo") {
        const u64 ka = rng.next(), kb = rng.next();
        const auto xa = [ka](u64 x) { return x ^ ka; };
        const auto xb = [kb](u64 x) { return x ^ kb; };
        const auto run = threepass_generic(xa, xa, xb, xb, a.m);
        env.payload["m"] = num(a.m);
        env.payload["transcript"] = transcript_json(run.transcript);
        env.payload["recovered"] = num(run.recovered);
        env.payload["success"] = run.success;
        env.text << "recovered " << run.recovered << (run.success ? " (ok)" : " (mismatch)") << '\n';
    } else if (a.mode == "attack") {
        const u64 ka = rng.next(), kb = rng.next();
        const auto xa = [ka](u64 x) { return x ^ ka; };
        const auto xb = [kb](u64 x) { return x ^ kb; };
        const auto x_run = threepass_generic(xa, xa, xb, xb, a.m);
        const u64 x_attack = xor_eavesdrop_attack(x_run.transcript);

        const u64 aa = rng.next() & 0xffffffffULL, ab = rng.next() & 0xffffffffULL;
        const u64 m32 = a.m & 0xffffffffULL;
        const auto add = add_mod_2_32();
        const auto ea = [&](u64 x) { return add.op(x, aa); };
        const auto da = [&](u64 x) { return add.op(x, add.inverse(aa)); };
        const auto eb = [&](u64 x) { return add.op(x, ab); };
        const auto db = [&](u64 x) { return add.op(x, add.inverse(ab)); };
        const auto a_run = threepass_generic(ea, da, eb, db, m32);
        const u64 a_attack = xor_eavesdrop_attack(a_run.transcript, add);

        const auto s_run = shamir_roundtrip(a.p, a.m, g.seed);
        const u64 s_attack = xor_eavesdrop_attack(s_run.transcript, mul_mod_group(a.p));

        env.payload["m"] = num(a.m);
        env.payload["xor"] = {{"transcript", transcript_json(x_run.transcript)},
                              {"attack_result", num(x_attack)},
                              {"recovered_m", x_attack == a.m}};
        env.payload["add_mod_2_32"] = {{"transcript", transcript_json(a_run.transcript)},
                                       {"attack_result", num(a_attack)},
                                       {"recovered_m", a_attack == m32}};
        env.payload["shamir"] = {{"transcript", transcript_json(s_run.transcript)},
                                 {"attack_result", num(s_attack)},
                                 {"recovered_m", s_attack == a.m}};
        env.text << "xor: x1 ^ x3 ^ x2 = " << x_attack << (x_attack == a.m ? " = m" : " != m") << '\n'
                 << "add: x1 + x3 - x2 = " << a_attack << (a_attack == m32 ? " = m" : " != m") << '\n'
                 << "shamir: x1 x3 / x2 = " << s_attack << (s_attack == a.m ? " = m" : " != m") << '\n';
    } else {
        throw Error(Errc::InvalidArgument, "--mode must be shamir, xor-demo or attack");
    }
}

struct EcoinArgs {
    std::string scheme = "rabin";
    std::uint64_t coins = 5;
    unsigned bits = 0;
};

void run_ecoin(const EcoinArgs& a, const Globals& g, Envelope& env)
{
    using namespace protocols;
    env.provenance = "problem:e-coins";
    env.payload["scheme"] = a.scheme;
    env.payload["coins"] = num(a.coins);
    if (a.coins == 0) {
        throw Error(Errc::InvalidArgument, "--coins must be positive");
    }
    CoinLedger ledger(a.coins);
    json log = json::array();
    std::uint64_t accepted = 0;
    auto record = [&](const std::string& event, u64 coin, SpendOutcome o) {
        log.push_back({{"event", event}, {"coin", num(coin)}, {"outcome", std::string(spend_outcome_name(o))}});
        env.text << "  " << event << " coin " << coin << ": " << spend_outcome_name(o) << '\n';
        accepted += o == SpendOutcome::Accepted;
    };
    const auto message = [](u64 coin) { return "pay Bob with coin " + std::to_string(coin); };

    if (a.scheme == "rabin") {
        const RabinChain chain = RabinChain::generate(a.bits ? a.bits : 512, g.seed, "master-" + std::to_string(g.seed));
        env.payload["N"] = big(chain.n);
        env.text << "N = " << chain.n.get_str() << '\n';
        std::vector<RabinKeys> keys;
        for (u64 i = 1; i <= a.coins; ++i) {
            keys.push_back(rabin_chain_keys(chain, i));
            const auto& k = keys.back();
            const mpz_class sig = rabin_sign(chain.n, k.sk, message(i));
            if (i == 1) {
                env.payload["first_coin"] = {{"index", 1}, {"counter", num(k.pub.counter)}, {"pk", big(k.pub.pk)},
                                             {"signature", big(sig)}};
            }
            record("spend", i, spend_rabin(ledger, chain.n, chain.master, k.pub, message(i), sig));
        }
        const auto& k1 = keys.front();
        record("double-spend", 1, spend_rabin(ledger, chain.n, chain.master, k1.pub, message(1),
                                              rabin_sign(chain.n, k1.sk, message(1))));
        if (a.coins >= 2) {
            RabinPublicKey wrong = keys[1].pub;
            record("wrong-index", 2, spend_rabin(ledger, chain.n, chain.master, wrong, message(1),
                                                 rabin_sign(chain.n, k1.sk, message(1))));
        }
        RabinPublicKey unknown{a.coins + 1, 0, 0};
        record("unknown", a.coins + 1, spend_rabin(ledger, chain.n, chain.master, unknown, message(1), 1));
    } else if (a.scheme == "group") {
        const SchnorrGroup grp = SchnorrGroup::generate(160, a.bits ? a.bits : 1024, g.seed);
        const GroupChain chain = GroupChain::create(grp, split_seed(g.seed, 1));
        env.payload["group"] = {{"P", big(grp.P)}, {"q", big(grp.q)}, {"g", big(grp.g)}};
        env.payload["pk0"] = big(chain.pk0);
        std::vector<GroupKeys> keys;
        for (u64 i = 1; i <= a.coins; ++i) {
            keys.push_back(group_chain_keys(chain, i));
            const auto sig = group_sign(grp, keys.back().sk, message(i));
            if (i == 1) {
                env.payload["first_coin"] = {{"index", 1}, {"pk", big(keys.back().pk)},
                                             {"signature", {{"r", big(sig.r)}, {"e", big(sig.e)}, {"s", big(sig.s)}}}};
            }
            record("spend", i, spend_group(ledger, grp, chain.pk0, i, message(i), sig));
        }
        record("double-spend", 1,
               spend_group(ledger, grp, chain.pk0, 1, message(1), group_sign(grp, keys[0].sk, message(1))));
        if (a.coins >= 2) {
            record("wrong-index", 2,
                   spend_group(ledger, grp, chain.pk0, 2, message(1), group_sign(grp, keys[0].sk, message(1))));
        }
        record("unknown", a.coins + 1,
               spend_group(ledger, grp, chain.pk0, a.coins + 1, message(1), group_sign(grp, keys[0].sk, message(1))));
        const mpz_class leaked = recover_master_from_leak(grp, keys[0].sk, 1);
        env.payload["leak_attack"] = {{"leaked_coin", 1}, {"recovered_sk0_matches", leaked == chain.sk0}};
        env.text << "  leaked SK_1 reveals SK_0: " << (leaked == chain.sk0 ? "yes" : "no") << '\n';
    } else {
        throw Error(Errc::InvalidArgument, "--scheme must be rabin or group");
    }
    env.payload["log"] = log;
    env.payload["accepted"] = num(accepted);
    env.payload["spent"] = num(ledger.spent_count());
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Cryptanalysis and computational-algebra toolkit", "cryptkit"};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    app.add_flag("--json", g.json_output, "Emit a JSON envelope");
    app.add_option("--seed", g.seed, "Random seed (default 20221)");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1u, 256u));

    std::string chosen;
    std::function<void(Envelope&)> action;
    auto bind = [&](CLI::App* sub, std::function<void(Envelope&)> fn) {
        sub->callback([&app, &chosen, &action, sub, fn] {
            const CLI::App* parent = sub->get_parent();
            chosen = parent != &app ? parent->get_name() + " " + sub->get_name() : sub->get_name();
            action = fn;
        });
    };

    PolybiusArgs pa;
    auto* polybius = app.add_subcommand("polybius", "Decode Polybius-square coordinates (rc. groups)");
    polybius->add_option("--cipher", pa.cipher, "Ciphertext such as 21.42.24.15.33.14.");
    polybius->add_option("--file", pa.file, "Read the ciphertext from a text file");
    polybius->add_flag("--prefer-j", pa.prefer_j, "Render the merged I/J cell as J");
    bind(polybius, [&](Envelope& e) { run_polybius(pa, e); });

    WalletArgs wa;
    auto* wallet = app.add_subcommand("wallet", "Decide whether repeated wallet splitting reaches equal wallets");
    wallet->add_option("--total", wa.total, "Initial coins")->capture_default_str();
    wallet->add_option("--target", wa.target, "Coins per final wallet")->capture_default_str();
    bind(wallet, [&](Envelope& e) { run_wallet(wa, e); });

    QuadArgs qa;
    auto* quad = app.add_subcommand("quadcipher", "Recover the quadratic cipher key mod 37 and decrypt");
    quad->add_option("--cipher", qa.cipher, "Ciphertext over A-Z, 0-9, space")->capture_default_str();
    quad->add_option("--file", qa.file, "Read the ciphertext from a text file");
    quad->add_option("--encrypt", qa.encrypt, "Encrypt this plaintext instead");
    quad->add_option("--crib", qa.crib, "Rank candidates containing this text first");
    quad->add_option("--top", qa.top, "Candidates to list")->capture_default_str();
    bind(quad, [&](Envelope& e) { run_quadcipher(qa, e); });

    PrimesArgs pra;
    auto* primes = app.add_subcommand("primes", "Find three primes as integer roots of a monic cubic");
    primes->add_option("--a2", pra.a2, "Coefficient of x^2")->capture_default_str();
    primes->add_option("--a1", pra.a1, "Coefficient of x")->capture_default_str();
    primes->add_option("--a0", pra.a0, "Constant term")->capture_default_str();
    bind(primes, [&](Envelope& e) { run_primes(pra, e); });

    auto* pin = app.add_subcommand("pin", "Solve the face-to-face PIN hint puzzle by elimination");
    bind(pin, [&](Envelope& e) { run_pin(e); });

    HillArgs ha;
    auto* hill = app.add_subcommand("hill", "Known-plaintext recovery of a 2x2 Hill cipher over 30 symbols");
    hill->add_option("--cipher", ha.cipher, "Ciphertext over A-Z, 0, 1, comma, !")->capture_default_str();
    hill->add_option("--file", ha.file, "Read the ciphertext from a text file");
    hill->add_option("--block", ha.block, "1-based index of the known block")->capture_default_str();
    hill->add_option("--known", ha.known, "Known plaintext of that block")->capture_default_str();
    hill->add_option("--encrypt", ha.encrypt, "Encrypt this plaintext with --key instead");
    hill->add_option("--key", ha.key, "Encryption key a,b,c,d (row-major)")->capture_default_str();
    bind(hill, [&](Envelope& e) { run_hill(ha, e); });

    BobArgs ba;
    auto* bob = app.add_subcommand("bobsymbol", "Bob's symbol x^2 + x = a over GF(2^n) and the B-set counts");
    bob->add_option("--n", ba.n, "Field degree")->capture_default_str();
    bob->add_option("--element", ba.element, "Evaluate one element (bit mask)");
    bob->add_flag("--exhaustive", ba.exhaustive, "Classify every field element instead of the closed form");
    bind(bob, [&](Envelope& e) { run_bobsymbol(ba, e); });

    InterpArgs ia;
    auto* interp = app.add_subcommand("interp", "Rational-function interpolation with errors over Z_2022");
    interp->add_option("--input", ia.input, "CSV file with i,x,y rows");
    interp->add_option("--synthesize", ia.synthesize, "Write a synthetic instance to this path");
    interp->add_option("--points", ia.points, "Synthetic instance size")->capture_default_str();
    interp->add_option("--correct", ia.correct, "Synthetic correct points")->capture_default_str();
    interp->add_option("--degree", ia.degree, "Degree of numerator and denominator")->capture_default_str();
    interp->add_option("--need", ia.need, "Required satisfied points")->capture_default_str();
    interp->add_option("--budget", ia.budget, "Decoder iteration budget per mod-6 candidate")->capture_default_str();
    interp->add_option("--max-mod6", ia.max_mod6, "Mod-6 candidates to try")->capture_default_str();
    interp->add_option("--decoder", ia.decoder, "pooled-gauss, or lee-brickell to also repair 1-2 sampled rows")
        ->capture_default_str();
    bind(interp, [&](Envelope& e) { run_interp(ia, g, e); });

    FeistelArgs fa;
    auto* feistel_cmd = app.add_subcommand("feistel", "Differential sets of the 4-branch generalized Feistel cipher");
    feistel_cmd->require_subcommand(1);
    auto add_feistel_common = [&](CLI::App* sub) {
        sub->add_option("--matrix", fa.matrix, "A1, A2, or 16 comma-separated bits")->capture_default_str();
        sub->add_option("--m", fa.m, "Subblock width in bits")->capture_default_str();
        sub->add_option("--rounds", fa.rounds, "Number of rounds")->capture_default_str();
        sub->add_option("--sbox", fa.sbox, "random:SEED or a file of 2^m integers")->capture_default_str();
    };
    auto* fverify = feistel_cmd->add_subcommand("verify", "Check that a difference set maps into itself");
    add_feistel_common(fverify);
    fverify->add_option("--eps", fa.eps, "Single eps for the W(eps) sets (default: all)");
    fverify->add_option("--set", fa.set, "w-eps: {a : a3 ^ a1 = eps}, diagonal: {(0,d,d,t)} (default by matrix)");
    fverify->add_option("--mode", fa.mode, "per-round, sbox-inputs or full-tuple")->capture_default_str();
    bind(fverify, [&](Envelope& e) { run_feistel_verify(fa, g, e); });
    auto* fprob = feistel_cmd->add_subcommand("prob", "Exact differential probability averaged over keys");
    add_feistel_common(fprob);
    fprob->add_option("--delta", fa.delta, "Input difference x3,x2,x1,x0")->required();
    fprob->add_option("--eps", fa.out_delta, "Output difference x3,x2,x1,x0")->required();
    bind(fprob, [&](Envelope& e) { run_feistel_prob(fa, e); });

    SboxArgs sa;
    auto* sbox_cmd = app.add_subcommand("sbox", "Super-dependent S-box counts");
    sbox_cmd->require_subcommand(1);
    auto* scount = sbox_cmd->add_subcommand("count", "Exact count, bounds or Monte-Carlo estimate");
    scount->add_option("--n", sa.n, "Number of variables")->capture_default_str();
    scount->add_flag("--exact", sa.exact, "Exhaustive count (n <= 3)");
    scount->add_flag("--bounds", sa.bounds, "Inclusion-exclusion bounds");
    scount->add_option("--mc", sa.mc, "Monte-Carlo sample count");
    bind(scount, [&](Envelope& e) { run_sbox(sa, g, e); });

    std::string experiment = "ghz-plus";
    auto* qsim_cmd = app.add_subcommand("qsim", "State-vector experiments with GHZ and W states");
    qsim_cmd->require_subcommand(1);
    auto* qdemo = qsim_cmd->add_subcommand("demo", "Run one experiment");
    qdemo->add_option("--experiment", experiment, "reversed-cnot, ghz-plus, w-measure, w-plus or w-zero")
        ->capture_default_str();
    bind(qdemo, [&](Envelope& e) { run_qsim(experiment, e); });

    ThreepassArgs ta;
    auto* threepass = app.add_subcommand("threepass", "Three-pass protocol runs and the eavesdropper attack");
    threepass->add_option("--mode", ta.mode, "shamir, xor-demo or attack")->capture_default_str();
    threepass->add_option("--p", ta.p, "Prime modulus for the exponentiation protocol")->capture_default_str();
    threepass->add_option("--m", ta.m, "Message")->capture_default_str();
    bind(threepass, [&](Envelope& e) { run_threepass(ta, g, e); });

    EcoinArgs ea;
    auto* ecoin = app.add_subcommand("ecoin", "Scripted e-coin issue, spend and double-spend scenario");
    ecoin->add_option("--scheme", ea.scheme, "rabin or group")->capture_default_str();
    ecoin->add_option("--coins", ea.coins, "Coins issued")->capture_default_str();
    ecoin->add_option("--bits", ea.bits, "Prime size (rabin: per factor, default 512; group: P, default 1024)");
    bind(ecoin, [&](Envelope& e) { run_ecoin(ea, g, e); });

    std::vector<const char*> argv{"cryptkit"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    if (!action) {
        err << app.help();
        return 2;
    }

    Envelope env;
    int exit_code = 0;
    try {
        action(env);
        if (env.status == "no-candidate") {
            exit_code = 1;
        }
    } catch (const Error& e) {
        env.status = "error";
        env.payload = json::object();
        env.payload["message"] = e.what();
        env.payload["code"] = std::string(errc_name(e.code()));
        exit_code = 1;
    }

    if (g.json_output) {
        json envelope;
        envelope["subcommand"] = chosen;
        envelope["status"] = env.status;
        envelope["provenance"] = env.provenance;
        envelope["payload"] = env.payload;
        out << envelope.dump(2) << '\n';
    } else if (env.status == "error") {
        err << "error: " << env.payload["message"].get<std::string>() << '\n';
    } else {
        out << env.text.str();
    }
    return exit_code;
}

} // namespace cryptkit::cli
