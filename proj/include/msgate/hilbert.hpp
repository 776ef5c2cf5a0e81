#ifndef MSGATE_HILBERT_HPP
#define MSGATE_HILBERT_HPP

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace msgate {

using Complex = std::complex<double>;

// Qubit levels of the optical transition: |S> is the ground state (bright in
// fluorescence detection), |D> the metastable state (dark).
enum class Qubit { S = 0, D = 1 };

// Basis ordering of the two-qubit factor. The joint index of an amplitude is
// block * fock_cutoff + n with block = 2*q1 + q2.
inline constexpr int kSS = 0;
inline constexpr int kSD = 1;
inline constexpr int kDS = 2;
inline constexpr int kDD = 3;

// Sign convention used throughout: sigma_z = |D><D| - |S><S| per ion, so
// sigma_+ = |D><S| raises S to D and [S_x, S_y] = 2i S_z for the collective
// operators S_j = sigma_j^(1) + sigma_j^(2).
enum class SpinAxis { x, y, z, plus, minus, y_psi };

struct SpinKind {
    SpinAxis axis;
    double psi = 0.0; // tilt angle, only meaningful for y_psi

    static SpinKind x() { return {SpinAxis::x}; }
    static SpinKind y() { return {SpinAxis::y}; }
    static SpinKind z() { return {SpinAxis::z}; }
    static SpinKind plus() { return {SpinAxis::plus}; }
    static SpinKind minus() { return {SpinAxis::minus}; }
    static SpinKind y_psi(double psi) { return {SpinAxis::y_psi, psi}; }
};

// Joint pure state of two qubits and one truncated vibrational mode.
struct SystemState {
    Eigen::VectorXcd amplitudes; // 4 * fock_cutoff entries
    int fock_cutoff = 0;

    int dim() const { return 4 * fock_cutoff; }
    double norm() const { return amplitudes.norm(); }
    void normalize() { amplitudes /= amplitudes.norm(); }

    Complex overlap(const SystemState& other) const { return amplitudes.dot(other.amplitudes); }
    double overlap_sq(const SystemState& other) const { return std::norm(overlap(other)); }

    // Populations of the two-qubit blocks {SS, SD, DS, DD}, motion traced out.
    std::array<double, 4> block_populations() const;

    // p_k = probability of finding k ions in |S> (k ions bright), k = 0, 1, 2.
    std::array<double, 3> bright_populations() const;

    // Two-qubit density-matrix element rho_{DD,SS} with the motion traced out.
    Complex coherence_dd_ss() const;

    // Mean vibrational quantum number.
    double mean_phonon() const;
};

struct ThermalEnsemble {
    std::vector<std::pair<int, double>> entries; // (Fock index, weight), weights sum to 1
};

// Unit basis vector |q1 q2, n>. Throws std::out_of_range for n outside [0, cutoff).
SystemState make_basis_state(Qubit q1, Qubit q2, int n, int cutoff);

// Single-ion Pauli operator in the {|S>, |D>} basis.
Eigen::Matrix2cd ion_sigma(SpinKind kind);

// Collective operator sigma^(1) + sigma^(2) on the two-qubit factor alone.
Eigen::Matrix4cd qubit_collective_spin(SpinKind kind);

// Collective spin operator on the full space, identity on the motional factor.
Eigen::MatrixXcd collective_spin(SpinKind kind, int cutoff);

// Displacement exp(beta a^dag - beta^* a) on the motional factor (cutoff x cutoff),
// computed by eigendecomposition of the Hermitian generator, exact on the
// truncated space.
Eigen::MatrixXcd motional_displacement(Complex beta, int cutoff);

// Displacement lifted to the full space, identity on the qubit factor.
Eigen::MatrixXcd displacement(Complex beta, int cutoff);

// Geometric distribution p_n = nbar^n / (1 + nbar)^(n+1), truncated once the
// remaining tail mass drops below tail_tolerance, then renormalized.
ThermalEnsemble thermal_weights(double nbar, double tail_tolerance = 1e-9);

// kron(A, B) helper used for lifting factor operators to the joint space.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

} // namespace msgate

#endif
