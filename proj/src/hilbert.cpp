#include "msgate/hilbert.hpp"

#include <cmath>
#include <stdexcept>

namespace msgate {

std::array<double, 4> SystemState::block_populations() const {
    std::array<double, 4> p{};
    const int n = fock_cutoff;
    for (int b = 0; b < 4; ++b) p[b] = amplitudes.segment(b * n, n).squaredNorm();
    return p;
}

std::array<double, 3> SystemState::bright_populations() const {
    const auto blocks = block_populations();
    // bright = in |S>: SS has 2 bright ions, SD/DS one, DD none
    return {blocks[kDD], blocks[kSD] + blocks[kDS], blocks[kSS]};
}

Complex SystemState::coherence_dd_ss() const {
    const int n = fock_cutoff;
    return amplitudes.segment(kSS * n, n).dot(amplitudes.segment(kDD * n, n));
}

double SystemState::mean_phonon() const {
    double acc = 0.0;
    const int n = fock_cutoff;
    for (int b = 0; b < 4; ++b)
        for (int k = 0; k < n; ++k) acc += k * std::norm(amplitudes[b * n + k]);
    return acc;
}

SystemState make_basis_state(Qubit q1, Qubit q2, int n, int cutoff) {
    if (cutoff < 1) throw std::invalid_argument("fock cutoff must be at least 1");
    if (n < 0 || n >= cutoff)
        throw std::out_of_range("Fock index " + std::to_string(n) +
                                " outside truncation [0, " + std::to_string(cutoff) + ")");
    SystemState state;
    state.fock_cutoff = cutoff;
    state.amplitudes = Eigen::VectorXcd::Zero(4 * cutoff);
    const int block = 2 * static_cast<int>(q1) + static_cast<int>(q2);
    state.amplitudes[block * cutoff + n] = 1.0;
    return state;
}

Eigen::Matrix2cd ion_sigma(SpinKind kind) {
    const Complex i(0.0, 1.0);
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    // basis order {|S>, |D>}; sigma_z = |D><D| - |S><S|, sigma_+ = |D><S|
    switch (kind.axis) {
        case SpinAxis::x:
            m(1, 0) = 1.0;
            m(0, 1) = 1.0;
            break;
        case SpinAxis::y:
            m(1, 0) = -i;
            m(0, 1) = i;
            break;
        case SpinAxis::z:
            m(0, 0) = -1.0;
            m(1, 1) = 1.0;
            break;
        case SpinAxis::plus:
            m(1, 0) = 1.0;
            break;
        case SpinAxis::minus:
            m(0, 1) = 1.0;
            break;
        case SpinAxis::y_psi:
            m = std::cos(kind.psi) * ion_sigma(SpinKind::y()) +
                std::sin(kind.psi) * ion_sigma(SpinKind::z());
            break;
    }
    return m;
}

Eigen::Matrix4cd qubit_collective_spin(SpinKind kind) {
    const Eigen::Matrix2cd s = ion_sigma(kind);
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    Eigen::Matrix4cd out;
    out = kron(s, id) + kron(id, s);
    return out;
}

Eigen::MatrixXcd collective_spin(SpinKind kind, int cutoff) {
    return kron(qubit_collective_spin(kind), Eigen::MatrixXcd::Identity(cutoff, cutoff));
}

Eigen::MatrixXcd motional_displacement(Complex beta, int cutoff) {
    const Complex i(0.0, 1.0);
    // generator = beta a^dag - beta^* a is anti-Hermitian; diagonalize i*generator
    Eigen::MatrixXcd herm = Eigen::MatrixXcd::Zero(cutoff, cutoff);
    for (int n = 0; n < cutoff - 1; ++n) {
        const double root = std::sqrt(static_cast<double>(n + 1));
        herm(n + 1, n) = i * beta * root;          // i * beta * a^dag
        herm(n, n + 1) = -i * std::conj(beta) * root; // -i * beta^* * a
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
    const Eigen::VectorXd evs = solver.eigenvalues();
    Eigen::VectorXcd phases(cutoff);
    for (int k = 0; k < cutoff; ++k) phases[k] = std::exp(-i * evs[k]);
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

Eigen::MatrixXcd displacement(Complex beta, int cutoff) {
    return kron(Eigen::MatrixXcd::Identity(4, 4), motional_displacement(beta, cutoff));
}

ThermalEnsemble thermal_weights(double nbar, double tail_tolerance) {
    if (nbar < 0.0) throw std::domain_error("mean occupation must be non-negative");
    ThermalEnsemble ensemble;
    if (nbar == 0.0) {
        ensemble.entries = {{0, 1.0}};
        return ensemble;
    }
    const double ratio = nbar / (1.0 + nbar);
    double p = 1.0 / (1.0 + nbar); // p_0
    double tail = 1.0;             // mass not yet emitted
    int n = 0;
    double total = 0.0;
    while (tail >= tail_tolerance) {
        ensemble.entries.emplace_back(n, p);
        total += p;
        tail -= p;
        p *= ratio;
        ++n;
    }
    for (auto& [idx, w] : ensemble.entries) w /= total;
    return ensemble;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

} // namespace msgate
