#ifndef MSGATE_ANALYTIC_HPP
#define MSGATE_ANALYTIC_HPP

#include "msgate/dynamics.hpp"
#include "msgate/hilbert.hpp"

namespace msgate {

// Closed-form propagator parameters for a constant-amplitude drive.
struct PropagatorParams {
    double psi;           // predicted spin-axis tilt (4 Omega / delta) cos(zeta); diagnostic
    double lambda_rate;   // eta^2 Omega^2 / (nu - delta), rad/s
    double chi;           // eta^2 Omega^2 / (nu - delta)^2
    Complex alpha0;       // phase-space orbit radius, eta Omega / (nu - delta) rotated by -zeta
    double nu_minus_delta;
    double omega, delta, phi;

    Complex alpha_at(double t) const;      // alpha0 (e^{i(nu-delta)t} - 1)
    double spin_phase_at(double t) const;  // chi sin((nu-delta)t) - lambda t
    double carrier_angle_at(double t) const; // F(t) = (2 Omega/delta)(sin(delta t + phi) - sin phi)
};

PropagatorParams propagator_params(const TrapParams& trap, const DriveConfig& drive);

// Gate time 2 pi / |nu - delta|. Throws std::domain_error when nu == delta.
double gate_time(double nu, double delta);

// Drive strength for a maximally entangling gate: Omega = |delta - nu| / (4 eta).
double required_rabi(double nu, double delta, double eta);

// exp(-i c H) for Hermitian H.
Eigen::MatrixXcd expm_i_hermitian(const Eigen::MatrixXcd& h, double c);

// Spin-conditioned displacement D(alpha S_{y,psi}): each eigenbranch s of
// S_{y,psi} is displaced by alpha * s.
Eigen::MatrixXcd spin_dependent_displacement(Complex alpha, double psi, int cutoff);

// Closed-form gate propagator for a constant-amplitude drive, composed right
// to left: collective spin flips exp(-i(lambda t + chi sin((nu-delta)t)) S^2),
// the transient spin-motion displacement, and the non-resonant carrier factor
// exp(-i F(t) S_x).
Eigen::MatrixXcd ms_propagator(double t, const TrapParams& trap, const DriveConfig& drive,
                               int cutoff);

// Ideal entangling gate exp(-i pi/8 S_y^2), identity on the motional factor.
Eigen::MatrixXcd ideal_gate(int cutoff);

// Populations (p0, p1, p2) of the ideal state after m gates from |SS>.
std::array<double, 3> expected_sequence_populations(int m);

// Phase-insensitive Bell fidelity of a pure state against the entangled-state
// class (|SS> + e^{i theta}|DD>)/sqrt(2): (p_SS + p_DD)/2 + |rho_DD,SS|.
double bell_fidelity_of_state(const SystemState& state);

struct CalibrationResult {
    DriveConfig drive;  // omega_peak and total_duration adjusted
    double fidelity;    // achieved Bell fidelity
    int evaluations;
};

// Tune (omega_peak, total_duration) around the analytic starting point so the
// shaped pulse maps |SS,0> onto a Bell state. The template drive supplies
// phases, imbalance and envelope shape. Throws CalibrationError below 0.99.
CalibrationResult calibrate_gate(const TrapParams& trap, double detuning_gap,
                                 const DriveConfig& template_drive, int cutoff,
                                 const IntegratorConfig& integrator = {});

} // namespace msgate

#endif
