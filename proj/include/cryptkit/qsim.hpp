#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace cryptkit::qsim {

inline constexpr int kMaxQubits = 8;

using Amplitudes = Eigen::VectorXcd;

/// Qubit 0 is the leftmost ket symbol: in |q0 q1 ... q(n-1)>, qubit k is
/// basis-index bit n - 1 - k.
class QuantumState {
public:
    /// |index> on n qubits. Throws Errc::IndexOutOfRange.
    static QuantumState basis(int n_qubits, std::size_t index = 0);
    /// Normalizes `amplitudes`; size must be 2^n with n <= 8.
    static QuantumState from_amplitudes(Amplitudes amplitudes);

    int n_qubits() const noexcept { return n_; }
    const Amplitudes& amplitudes() const noexcept { return amp_; }
    std::complex<double> operator[](std::size_t i) const { return amp_(static_cast<Eigen::Index>(i)); }
    double norm() const { return amp_.norm(); }
    /// Basis index with the bit of `qubit` set.
    std::size_t bit(int qubit) const noexcept { return std::size_t{1} << (n_ - 1 - qubit); }

    /// Equal up to a global phase, within tol.
    bool approx_equal(const QuantumState& o, double tol = 1e-12) const;

private:
    QuantumState(int n, Amplitudes amp) : n_(n), amp_(std::move(amp)) {}
    int n_;
    Amplitudes amp_;
};

struct Gate {
    enum class Kind { X, Z, H, RY, CNOT };
    Kind kind = Kind::X;
    int target = 0;
    int control = -1;
    double theta = 0.0;

    static Gate x(int q) { return {Kind::X, q}; }
    static Gate z(int q) { return {Kind::Z, q}; }
    static Gate h(int q) { return {Kind::H, q}; }
    static Gate ry(int q, double theta) { return {Kind::RY, q, -1, theta}; }
    static Gate cnot(int control, int target) { return {Kind::CNOT, target, control}; }
};

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;

    /// Throws Errc::IndexOutOfRange on bad indices.
    void validate() const;
};

/// Throws Errc::IndexOutOfRange.
QuantumState apply(const QuantumState& state, const Gate& gate);
QuantumState run(const Circuit& circuit, const QuantumState& initial);
QuantumState run(const Circuit& circuit, std::size_t basis_index = 0);

double measure_prob(const QuantumState& state, int qubit, int outcome);
/// Keeps the branch qubit = outcome and renormalizes; the qubit stays in
/// the register. Throws Errc::ZeroProbabilityBranch below 1e-12.
QuantumState post_select(const QuantumState& state, int qubit, int outcome);
/// The remaining qubits after post-selection, with the measured qubit
/// removed (valid because the selected state factorizes).
QuantumState post_select_and_drop(const QuantumState& state, int qubit, int outcome);

struct SchmidtReport {
    bool product = false;
    int rank = 0;
    std::vector<double> singular_values;  ///< descending
};

/// Schmidt decomposition across `side` versus the remaining qubits;
/// product iff the second singular value is below 1e-9.
SchmidtReport schmidt(const QuantumState& state, const std::vector<int>& side);
bool is_product_state(const QuantumState& state, const std::vector<int>& side);

Circuit ghz_circuit();
/// RY(2 arccos(1/sqrt 3)) on qubit 0, a controlled RY(pi/2) from qubit 0 to
/// qubit 1 built from RY and CNOT, then CNOTs and an X filling qubit 2.
Circuit build_w_circuit();
/// H on both qubits, CNOT(0 -> 1), H on both qubits.
Circuit reversed_cnot_circuit();

/// Haar-ish random state from normal samples.
QuantumState random_state(int n_qubits, std::uint64_t seed);

} // namespace cryptkit::qsim
