#include "cryptkit/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cryptkit/error.hpp"

namespace cryptkit::qsim {

namespace {

void check_qubit(int q, int n)
{
    if (q < 0 || q >= n) {
        throw Error(Errc::IndexOutOfRange, "qubit index " + std::to_string(q) + " out of range");
    }
}

void check_outcome(int outcome)
{
    if (outcome != 0 && outcome != 1) {
        throw Error(Errc::InvalidArgument, "outcome must be 0 or 1");
    }
}

} // namespace

QuantumState QuantumState::basis(int n_qubits, std::size_t index)
{
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw Error(Errc::IndexOutOfRange, "qubit count must be in 1..8");
    }
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (index >= dim) {
        throw Error(Errc::IndexOutOfRange, "basis index out of range");
    }
    Amplitudes amp = Amplitudes::Zero(static_cast<Eigen::Index>(dim));
    amp(static_cast<Eigen::Index>(index)) = 1.0;
    return {n_qubits, std::move(amp)};
}

QuantumState QuantumState::from_amplitudes(Amplitudes amplitudes)
{
    const auto dim = static_cast<std::size_t>(amplitudes.size());
    int n = 0;
    while ((std::size_t{1} << n) < dim) {
        ++n;
    }
    if (n < 1 || n > kMaxQubits || (std::size_t{1} << n) != dim) {
        throw Error(Errc::InvalidArgument, "amplitude vector length must be 2^n with 1 <= n <= 8");
    }
    const double norm = amplitudes.norm();
    if (norm < 1e-12) {
        throw Error(Errc::InvalidArgument, "zero vector is not a state");
    }
    amplitudes /= norm;
    return {n, std::move(amplitudes)};
}

bool QuantumState::approx_equal(const QuantumState& o, double tol) const
{
    if (n_ != o.n_) {
        return false;
    }
    const std::complex<double> overlap = amp_.dot(o.amp_);
    if (std::abs(overlap) < 1e-12) {
        return (amp_ - o.amp_).norm() <= tol;
    }
    const std::complex<double> phase = overlap / std::abs(overlap);
    return (amp_ * phase - o.amp_).norm() <= tol;
}

void Circuit::validate() const
{
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw Error(Errc::IndexOutOfRange, "qubit count must be in 1..8");
    }
    for (const Gate& g : gates) {
        check_qubit(g.target, n_qubits);
        if (g.kind == Gate::Kind::CNOT) {
            check_qubit(g.control, n_qubits);
            if (g.control == g.target) {
                throw Error(Errc::IndexOutOfRange, "CNOT control equals target");
            }
        }
    }
}

QuantumState apply(const QuantumState& state, const Gate& gate)
{
    const int n = state.n_qubits();
    check_qubit(gate.target, n);
    Amplitudes out = state.amplitudes();
    const std::size_t tb = state.bit(gate.target);
    const std::size_t dim = static_cast<std::size_t>(out.size());
    switch (gate.kind) {
    case Gate::Kind::X:
        for (std::size_t i = 0; i < dim; ++i) {
            if (!(i & tb)) {
                std::swap(out(static_cast<Eigen::Index>(i)), out(static_cast<Eigen::Index>(i | tb)));
            }
        }
        break;
    case Gate::Kind::Z:
        for (std::size_t i = 0; i < dim; ++i) {
            if (i & tb) {
                out(static_cast<Eigen::Index>(i)) = -out(static_cast<Eigen::Index>(i));
            }
        }
        break;
    case Gate::Kind::H:
    case Gate::Kind::RY: {
        // [[u00, u01], [u10, u11]] acting on (amp|0>, amp|1>)
        double u00, u01, u10, u11;
        if (gate.kind == Gate::Kind::H) {
            u00 = u01 = u10 = std::numbers::sqrt2 / 2;
            u11 = -u00;
        } else {
            const double c = std::cos(gate.theta / 2), s = std::sin(gate.theta / 2);
            u00 = c;
            u01 = -s;
            u10 = s;
            u11 = c;
        }
        for (std::size_t i = 0; i < dim; ++i) {
            if (!(i & tb)) {
                const auto a0 = out(static_cast<Eigen::Index>(i));
                const auto a1 = out(static_cast<Eigen::Index>(i | tb));
                out(static_cast<Eigen::Index>(i)) = u00 * a0 + u01 * a1;
                out(static_cast<Eigen::Index>(i | tb)) = u10 * a0 + u11 * a1;
            }
        }
        break;
    }
    case Gate::Kind::CNOT: {
        check_qubit(gate.control, n);
        if (gate.control == gate.target) {
            throw Error(Errc::IndexOutOfRange, "CNOT control equals target");
        }
        const std::size_t cb = state.bit(gate.control);
        for (std::size_t i = 0; i < dim; ++i) {
            if ((i & cb) && !(i & tb)) {
                std::swap(out(static_cast<Eigen::Index>(i)), out(static_cast<Eigen::Index>(i | tb)));
            }
        }
        break;
    }
    }
    return QuantumState::from_amplitudes(std::move(out));
}

QuantumState run(const Circuit& circuit, const QuantumState& initial)
{
    circuit.validate();
    if (initial.n_qubits() != circuit.n_qubits) {
        throw Error(Errc::IndexOutOfRange, "state and circuit sizes differ");
    }
    QuantumState s = initial;
    for (const Gate& g : circuit.gates) {
        s = apply(s, g);
    }
    return s;
}

QuantumState run(const Circuit& circuit, std::size_t basis_index)
{
    return run(circuit, QuantumState::basis(circuit.n_qubits, basis_index));
}

double measure_prob(const QuantumState& state, int qubit, int outcome)
{
    check_qubit(qubit, state.n_qubits());
    check_outcome(outcome);
    const std::size_t b = state.bit(qubit);
    double p = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(state.amplitudes().size()); ++i) {
        if (((i & b) != 0) == (outcome == 1)) {
            p += std::norm(state[i]);
        }
    }
    return p;
}

QuantumState post_select(const QuantumState& state, int qubit, int outcome)
{
    if (measure_prob(state, qubit, outcome) <= 1e-12) {
        throw Error(Errc::ZeroProbabilityBranch, "post-selected outcome has zero probability");
    }
    Amplitudes out = state.amplitudes();
    const std::size_t b = state.bit(qubit);
    for (std::size_t i = 0; i < static_cast<std::size_t>(out.size()); ++i) {
        if (((i & b) != 0) != (outcome == 1)) {
            out(static_cast<Eigen::Index>(i)) = 0;
        }
    }
    return QuantumState::from_amplitudes(std::move(out));
}

QuantumState post_select_and_drop(const QuantumState& state, int qubit, int outcome)
{
    const QuantumState sel = post_select(state, qubit, outcome);
    const int n = state.n_qubits();
    if (n < 2) {
        throw Error(Errc::InvalidArgument, "need at least two qubits to drop one");
    }
    const std::size_t b = state.bit(qubit);
    Amplitudes rest(static_cast<Eigen::Index>(std::size_t{1} << (n - 1)));
    for (std::size_t j = 0; j < static_cast<std::size_t>(rest.size()); ++j) {
        const std::size_t low = j & (b - 1);
        const std::size_t high = (j & ~(b - 1)) << 1;
        rest(static_cast<Eigen::Index>(j)) = sel[high | low | (outcome ? b : 0)];
    }
    return QuantumState::from_amplitudes(std::move(rest));
}

SchmidtReport schmidt(const QuantumState& state, const std::vector<int>& side)
{
    const int n = state.n_qubits();
    std::vector<int> a = side;
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    for (int q : a) {
        check_qubit(q, n);
    }
    if (a.empty() || static_cast<int>(a.size()) == n) {
        throw Error(Errc::InvalidArgument, "partition must be non-trivial");
    }
    std::vector<int> b;
    for (int q = 0; q < n; ++q) {
        if (!std::binary_search(a.begin(), a.end(), q)) {
            b.push_back(q);
        }
    }
    auto sub_index = [&](std::size_t i, const std::vector<int>& qs) {
        std::size_t r = 0;
        for (int q : qs) {
            r = (r << 1) | ((i & state.bit(q)) ? 1u : 0u);
        }
        return r;
    };
    Eigen::MatrixXcd m(Eigen::Index{1} << a.size(), Eigen::Index{1} << b.size());
    for (std::size_t i = 0; i < static_cast<std::size_t>(state.amplitudes().size()); ++i) {
        m(static_cast<Eigen::Index>(sub_index(i, a)), static_cast<Eigen::Index>(sub_index(i, b))) = state[i];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    SchmidtReport rep;
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        rep.singular_values.push_back(sv(i));
        rep.rank += sv(i) > 1e-9;
    }
    rep.product = sv.size() < 2 || sv(1) < 1e-9;
    return rep;
}

bool is_product_state(const QuantumState& state, const std::vector<int>& side)
{
    return schmidt(state, side).product;
}

Circuit ghz_circuit()
{
    return {3, {Gate::h(0), Gate::cnot(0, 1), Gate::cnot(0, 2)}};
}

Circuit build_w_circuit()
{
    const double theta = 2 * std::acos(1 / std::sqrt(3.0));
    const double quarter = std::numbers::pi / 4;
    // After the first two steps: sqrt(1/3)|00> + sqrt(1/3)|10> + sqrt(1/3)|11>.
    return {3,
            {Gate::ry(0, theta), Gate::ry(1, quarter), Gate::cnot(0, 1), Gate::ry(1, -quarter), Gate::cnot(0, 1),
             Gate::cnot(1, 0), Gate::x(2), Gate::cnot(0, 2), Gate::cnot(1, 2)}};
}

Circuit reversed_cnot_circuit()
{
    return {2, {Gate::h(0), Gate::h(1), Gate::cnot(0, 1), Gate::h(0), Gate::h(1)}};
}

QuantumState random_state(int n_qubits, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    Amplitudes amp(static_cast<Eigen::Index>(std::size_t{1} << n_qubits));
    for (Eigen::Index i = 0; i < amp.size(); ++i) {
        amp(i) = {normal(gen), normal(gen)};
    }
    return QuantumState::from_amplitudes(std::move(amp));
}

} // namespace cryptkit::qsim
