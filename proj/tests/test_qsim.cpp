#include <doctest.h>

#include <cmath>

#include "cryptkit/error.hpp"
#include "cryptkit/qsim.hpp"
#include "cryptkit/rng.hpp"

using namespace cryptkit;
using namespace cryptkit::qsim;

namespace {

const double r2 = 1.0 / std::sqrt(2.0);
const double r3 = 1.0 / std::sqrt(3.0);

QuantumState state(std::initializer_list<std::complex<double>> amps)
{
    Amplitudes a(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index i = 0;
    for (auto v : amps) {
        a(i++) = v;
    }
    return QuantumState::from_amplitudes(a);
}

std::vector<Gate> random_local_gates(Rng& rng, const std::vector<int>& qubits, int count)
{
    std::vector<Gate> gates;
    for (int i = 0; i < count; ++i) {
        const int q = qubits[rng.below(qubits.size())];
        switch (rng.below(4)) {
        case 0: gates.push_back(Gate::x(q)); break;
        case 1: gates.push_back(Gate::z(q)); break;
        case 2: gates.push_back(Gate::h(q)); break;
        default: gates.push_back(Gate::ry(q, rng.unit() * 6.283185307179586)); break;
        }
    }
    return gates;
}

} // namespace

TEST_CASE("gate examples and qubit ordering")
{
    CHECK(apply(QuantumState::basis(2, 0b10), Gate::cnot(0, 1)).approx_equal(QuantumState::basis(2, 0b11)));
    CHECK(apply(QuantumState::basis(2, 0b01), Gate::cnot(0, 1)).approx_equal(QuantumState::basis(2, 0b01)));
    CHECK(apply(QuantumState::basis(1, 0), Gate::h(0)).approx_equal(state({r2, r2})));
    CHECK(apply(QuantumState::basis(1, 1), Gate::h(0)).approx_equal(state({r2, -r2})));
    CHECK(apply(QuantumState::basis(3, 0), Gate::x(0)).approx_equal(QuantumState::basis(3, 0b100)));
    CHECK(apply(QuantumState::basis(1, 1), Gate::z(0))[1] == std::complex<double>(-1.0, 0.0));
    const auto ry = apply(QuantumState::basis(1, 0), Gate::ry(0, M_PI / 2));
    CHECK(std::abs(ry[0] - r2) < 1e-12);
    CHECK(std::abs(ry[1] - r2) < 1e-12);
    CHECK(QuantumState::basis(3, 0).bit(0) == 4);
    CHECK_THROWS_AS(QuantumState::basis(2, 4), Error);
    CHECK_THROWS_AS(apply(QuantumState::basis(2, 0), Gate::x(2)), Error);
    CHECK_THROWS_AS(apply(QuantumState::basis(2, 0), Gate::cnot(1, 1)), Error);
}

TEST_CASE("gates are unitary and H, X, Z are involutions")
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const int n = 1 + static_cast<int>(seed % 4);
        const QuantumState s = random_state(n, seed);
        CHECK(std::abs(s.norm() - 1.0) < 1e-12);
        Rng rng(seed);
        for (int q = 0; q < n; ++q) {
            for (const Gate& g : {Gate::x(q), Gate::z(q), Gate::h(q)}) {
                const auto once = apply(s, g);
                CHECK(std::abs(once.norm() - 1.0) < 1e-12);
                CHECK((apply(once, g).amplitudes() - s.amplitudes()).norm() < 1e-12);
            }
            const auto r = apply(s, Gate::ry(q, rng.unit() * 6.0));
            CHECK(std::abs(r.norm() - 1.0) < 1e-12);
            if (n > 1) {
                const auto c = apply(s, Gate::cnot(q, (q + 1) % n));
                CHECK(std::abs(c.norm() - 1.0) < 1e-12);
            }
        }
    }
}

TEST_CASE("circuits")
{
    const Circuit empty{2, {}};
    CHECK(run(empty, 0b01).approx_equal(QuantumState::basis(2, 0b01)));
    CHECK(run(ghz_circuit()).approx_equal(state({r2, 0, 0, 0, 0, 0, 0, r2})));
    const Circuit rev = reversed_cnot_circuit();
    CHECK(run(rev, 0b00).approx_equal(QuantumState::basis(2, 0b00)));
    CHECK(run(rev, 0b01).approx_equal(QuantumState::basis(2, 0b11)));
    CHECK(run(rev, 0b10).approx_equal(QuantumState::basis(2, 0b10)));
    CHECK(run(rev, 0b11).approx_equal(QuantumState::basis(2, 0b01)));
    CHECK_THROWS_AS((Circuit{2, {Gate::x(5)}}.validate()), Error);
}

TEST_CASE("measurement probabilities")
{
    const auto ghz = run(ghz_circuit());
    CHECK(std::abs(measure_prob(ghz, 0, 0) - 0.5) < 1e-12);
    const auto w = run(build_w_circuit());
    CHECK(std::abs(measure_prob(w, 0, 0) - 2.0 / 3.0) < 1e-12);
    CHECK(std::abs(measure_prob(QuantumState::basis(3, 0b101), 1, 0) - 1.0) < 1e-12);
}

TEST_CASE("post-selection then measurement is certain")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const QuantumState s = random_state(3, seed);
        for (int q = 0; q < 3; ++q) {
            for (int o = 0; o < 2; ++o) {
                const auto p = post_select(s, q, o);
                CHECK(std::abs(p.norm() - 1.0) < 1e-12);
                CHECK(std::abs(measure_prob(p, q, o) - 1.0) < 1e-12);
            }
        }
    }
    CHECK_THROWS_AS(post_select(QuantumState::basis(2, 0), 0, 1), Error);
}

TEST_CASE("GHZ post-selections")
{
    const auto ghz = run(ghz_circuit());
    const auto zero = post_select_and_drop(ghz, 0, 0);
    CHECK(zero.approx_equal(QuantumState::basis(2, 0)));
    CHECK(is_product_state(zero, {0}));

    const auto plus = post_select_and_drop(apply(ghz, Gate::h(0)), 0, 0);
    CHECK(plus.approx_equal(state({r2, 0, 0, r2})));
    CHECK_FALSE(is_product_state(plus, {0}));
    const auto minus = post_select_and_drop(apply(ghz, Gate::h(0)), 0, 1);
    CHECK(minus.approx_equal(state({r2, 0, 0, -r2})));
    CHECK_FALSE(minus.approx_equal(plus));
}

TEST_CASE("W state")
{
    const auto w = run(build_w_circuit());
    CHECK(std::abs(w.norm() - 1.0) < 1e-12);
    for (std::size_t i = 0; i < 8; ++i) {
        const double expected = (i == 1 || i == 2 || i == 4) ? r3 : 0.0;
        CHECK(std::abs(std::abs(w[i]) - expected) < 1e-12);
    }
    CHECK(w.approx_equal(state({0, r3, r3, 0, r3, 0, 0, 0})));
    CHECK(post_select_and_drop(w, 0, 1).approx_equal(QuantumState::basis(2, 0)));
    const auto rest = post_select_and_drop(w, 0, 0);
    CHECK(rest.approx_equal(state({0, r2, r2, 0})));
    CHECK_FALSE(is_product_state(rest, {0}));
    const auto third_plus = post_select_and_drop(apply(w, Gate::h(2)), 2, 0);
    CHECK(third_plus.approx_equal(state({r3, r3, r3, 0})));
}

TEST_CASE("Schmidt decomposition")
{
    CHECK(is_product_state(QuantumState::basis(2, 0), {0}));
    const auto bell = state({r2, 0, 0, r2});
    const auto rep = schmidt(bell, {0});
    CHECK_FALSE(rep.product);
    CHECK(rep.rank == 2);
    CHECK(std::abs(rep.singular_values[0] - r2) < 1e-12);
    CHECK(std::abs(rep.singular_values[1] - r2) < 1e-12);
    const auto ghz = run(ghz_circuit());
    CHECK_FALSE(is_product_state(ghz, {0}));
    CHECK_FALSE(is_product_state(ghz, {1, 2}));
    CHECK_FALSE(is_product_state(ghz, {1}));
    const auto prod = apply(apply(QuantumState::basis(3, 0), Gate::h(0)), Gate::ry(2, 0.3));
    CHECK(is_product_state(prod, {0}));
    CHECK(is_product_state(prod, {2}));
}

TEST_CASE("product test is invariant under local unitaries")
{
    Rng rng(7);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::vector<int> left{0, 2}, right{1, 3};
        QuantumState s = random_state(4, seed);
        if (seed % 2 == 0) {
            // build a product state across the split
            Circuit c{4, random_local_gates(rng, left, 6)};
            auto more = random_local_gates(rng, right, 6);
            c.gates.insert(c.gates.end(), more.begin(), more.end());
            c.gates.push_back(Gate::cnot(0, 2));
            c.gates.push_back(Gate::cnot(3, 1));
            s = run(c, QuantumState::basis(4, 0));
        }
        const bool before = is_product_state(s, left);
        Circuit local{4, random_local_gates(rng, left, 8)};
        auto more = random_local_gates(rng, right, 8);
        local.gates.insert(local.gates.end(), more.begin(), more.end());
        const QuantumState t = run(local, s);
        CHECK(is_product_state(t, left) == before);
        CHECK(is_product_state(t, right) == before);
        if (seed % 2 == 0) {
            CHECK(before);
        }
    }
}
