#include "msgate/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "msgate/errors.hpp"

namespace msgate {

namespace {

using RowMajorXcd = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr Complex kI(0.0, 1.0);

struct Scratch {
    Eigen::VectorXcd u, tmp, a_ss, a_sd, b_sd, b_dd;
    void ensure(int n) {
        if (u.size() != n) {
            u.resize(n);
            tmp.resize(n);
            a_ss.resize(n);
            a_sd.resize(n);
            b_sd.resize(n);
            b_dd.resize(n);
        }
    }
};

Scratch& scratch() {
    thread_local Scratch s;
    return s;
}

} // namespace

void TrapParams::validate() const {
    if (!(nu > 0.0)) throw std::invalid_argument("trap frequency must be positive");
    if (!(eta > 0.0 && eta < 0.3))
        throw std::invalid_argument("Lamb-Dicke factor outside (0, 0.3)");
}

void PulseEnvelope::validate() const {
    if (rise_time < 0.0 || total_duration < 0.0)
        throw std::invalid_argument("pulse times must be non-negative");
    if (2.0 * rise_time > total_duration)
        throw std::invalid_argument("pulse shorter than its two ramps");
}

void DriveConfig::validate() const {
    if (omega_peak < 0.0) throw std::invalid_argument("Rabi frequency must be non-negative");
    if (!(imbalance > 0.0)) throw std::invalid_argument("tone imbalance must be positive");
    envelope.validate();
}

void IntegratorConfig::validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("integrator tolerance must be positive");
    if (max_step < 0.0) throw std::invalid_argument("max step must be non-negative");
    if (method == IntegratorMethod::rk4 && max_step == 0.0)
        throw std::invalid_argument("rk4 needs an explicit step size");
}

double rabi_envelope(double t, const PulseEnvelope& env, double omega_peak) {
    if (t < 0.0 || t > env.total_duration) return 0.0;
    if (env.shape == PulseShape::rectangular || env.rise_time <= 0.0) return omega_peak;
    const double tr = env.rise_time;
    if (t < tr) {
        const double s = std::sin(0.5 * M_PI * t / tr);
        return omega_peak * s * s;
    }
    if (t > env.total_duration - tr) {
        const double s = std::sin(0.5 * M_PI * (env.total_duration - t) / tr);
        return omega_peak * s * s;
    }
    return omega_peak;
}

double coupling_imbalance_error(double ratio) {
    if (!(ratio > 0.0)) throw std::domain_error("tone ratio must be positive");
    const double r = ratio * ratio; // intensities scale as amplitude squared
    return (r + 1.0) / (2.0 * std::sqrt(r)) - 1.0;
}

BichromaticDrive::BichromaticDrive(const TrapParams& trap, const DriveConfig& drive, int cutoff)
    : trap_(trap), drive_(drive), cutoff_(cutoff) {
    trap.validate();
    drive.validate();
    if (cutoff < 1) throw std::invalid_argument("fock cutoff must be at least 1");
    omega_blue_scale_ = std::sqrt(drive.imbalance);
    omega_red_scale_ = 1.0 / omega_blue_scale_;
    // net carrier light shift of the imbalanced tone pair, per ion and per
    // Omega^2: the apparatus nulls it, so the model adds the opposite term
    light_shift_coeff_ = 0.0;
    if (drive.cancel_light_shift && drive.delta != 0.0)
        light_shift_coeff_ = (drive.imbalance - 1.0 / drive.imbalance) / drive.delta;

    // e^{i eta (a + a^dag)} = D(i eta); the time dependence of the motional
    // kick factor is restored by Fock-phase conjugation in apply()
    const Eigen::MatrixXcd kick = motional_displacement(Complex(0.0, trap.eta), cutoff);
    const Eigen::MatrixXcd kick_dag = kick.adjoint();
    kick_.assign(kick.data(), kick.data() + cutoff * cutoff); // column-major buffers
    kick_dag_.assign(kick_dag.data(), kick_dag.data() + cutoff * cutoff);
    phi_phase_ = std::polar(1.0, -drive.phi);
}

void BichromaticDrive::apply(double t, const Complex* psi, Complex* out) const {
    const int n = cutoff_;
    auto& s = scratch();
    s.ensure(n);

    const double omega = rabi_envelope(t, drive_.envelope, drive_.omega_peak);
    const double tone_phase = drive_.delta * t + drive_.zeta;
    const Complex tone = std::polar(1.0, -tone_phase);
    const Complex coeff = phi_phase_ * (omega * omega_blue_scale_ * tone +
                                        omega * omega_red_scale_ * std::conj(tone));
    const Complex coeff_c = std::conj(coeff);
    const double dcoef = -0.5 * drive_.detuning_offset + omega * omega * light_shift_coeff_;

    // u_k = e^{i nu t k}
    const Complex rot = std::polar(1.0, trap_.nu * t);
    s.u[0] = 1.0;
    for (int k = 1; k < n; ++k) s.u[k] = s.u[k - 1] * rot;

    const Eigen::Map<const Eigen::MatrixXcd> kick(kick_.data(), n, n);
    const Eigen::Map<const Eigen::MatrixXcd> kick_dag(kick_dag_.data(), n, n);
    const auto block = [&](const Complex* base, int b) {
        return Eigen::Map<const Eigen::VectorXcd>(base + b * n, n);
    };

    // E(t) x = R E R^dag x and E(t)^dag x = R E^dag R^dag x with R = diag(u);
    // the SD and DS flip targets share operands, so four products suffice
    const auto forward = [&](Eigen::VectorXcd& dst) {
        dst.noalias() = kick * s.tmp;
        dst.array() *= s.u.array();
    };
    const auto backward = [&](Eigen::VectorXcd& dst) {
        dst.noalias() = kick_dag * s.tmp;
        dst.array() *= s.u.array();
    };
    s.tmp.array() = s.u.array().conjugate() * block(psi, kSS).array();
    forward(s.a_ss);
    s.tmp.array() =
        s.u.array().conjugate() * (block(psi, kSD).array() + block(psi, kDS).array());
    forward(s.a_sd);  // E(t)(psi_SD + psi_DS)
    backward(s.b_sd); // E(t)^dag (psi_SD + psi_DS)
    s.tmp.array() = s.u.array().conjugate() * block(psi, kDD).array();
    backward(s.b_dd);

    auto out_ss = Eigen::Map<Eigen::VectorXcd>(out + kSS * n, n);
    auto out_sd = Eigen::Map<Eigen::VectorXcd>(out + kSD * n, n);
    auto out_ds = Eigen::Map<Eigen::VectorXcd>(out + kDS * n, n);
    auto out_dd = Eigen::Map<Eigen::VectorXcd>(out + kDD * n, n);
    out_ss = coeff_c * s.b_sd - 2.0 * dcoef * block(psi, kSS);
    out_sd = coeff * s.a_ss + coeff_c * s.b_dd;
    out_ds = out_sd;
    out_dd = coeff * s.a_sd + 2.0 * dcoef * block(psi, kDD);
}

Eigen::MatrixXcd BichromaticDrive::matrix_at(double t) const {
    const int d = dim();
    Eigen::MatrixXcd h(d, d);
    Eigen::VectorXcd basis = Eigen::VectorXcd::Zero(d);
    Eigen::VectorXcd column(d);
    for (int j = 0; j < d; ++j) {
        basis[j] = 1.0;
        apply(t, basis.data(), column.data());
        h.col(j) = column;
        basis[j] = 0.0;
    }
    return h;
}

Eigen::MatrixXcd hamiltonian_at(double t, const TrapParams& trap, const DriveConfig& drive,
                                int cutoff) {
    return BichromaticDrive(trap, drive, cutoff).matrix_at(t);
}

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
    const BichromaticDrive& h;
    Eigen::VectorXcd k1, k2, k3, k4, k5, k6, k7, ytmp;

    explicit Stepper(const BichromaticDrive& h) : h(h) {
        const int d = h.dim();
        for (auto* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &ytmp}) v->resize(d);
    }

    // f = -i H(t) y
    void rhs(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& f) {
        h.apply(t, y.data(), f.data());
        f *= -kI;
    }
};

double error_norm(const Eigen::VectorXcd& err, const Eigen::VectorXcd& y0,
                  const Eigen::VectorXcd& y1, double tol) {
    const double atol = 1e-3 * tol;
    double acc = 0.0;
    for (int i = 0; i < err.size(); ++i) {
        const double scale = atol + tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double q = std::abs(err[i]) / scale;
        acc += q * q;
    }
    return std::sqrt(acc / err.size());
}

void integrate_dopri5(const BichromaticDrive& drive, Eigen::VectorXcd& y, double t0, double t1,
                      double hmax, double tol) {
    if (t1 <= t0) return;
    Stepper st(drive);
    double t = t0;
    st.rhs(t, y, st.k1);
    double h = std::min(hmax, (t1 - t0) / 16.0);
    const double f0 = st.k1.norm();
    if (f0 > 1e-12) h = std::min(h, 0.05 * y.norm() / f0);
    const double h_floor = std::max(1e-18, 1e-13 * (t1 - t0));
    long steps = 0;
    double err = 0.0;

    while (t < t1) {
        if (h < h_floor)
            throw ConvergenceError("integrator step size underflow at t = " + std::to_string(t),
                                   steps, err);
        h = std::min(h, t1 - t);
        st.ytmp = y + h * (a21 * st.k1);
        st.rhs(t + c2 * h, st.ytmp, st.k2);
        st.ytmp = y + h * (a31 * st.k1 + a32 * st.k2);
        st.rhs(t + c3 * h, st.ytmp, st.k3);
        st.ytmp = y + h * (a41 * st.k1 + a42 * st.k2 + a43 * st.k3);
        st.rhs(t + c4 * h, st.ytmp, st.k4);
        st.ytmp = y + h * (a51 * st.k1 + a52 * st.k2 + a53 * st.k3 + a54 * st.k4);
        st.rhs(t + c5 * h, st.ytmp, st.k5);
        st.ytmp = y + h * (a61 * st.k1 + a62 * st.k2 + a63 * st.k3 + a64 * st.k4 + a65 * st.k5);
        st.rhs(t + h, st.ytmp, st.k6);
        st.ytmp = y + h * (b1 * st.k1 + b3 * st.k3 + b4 * st.k4 + b5 * st.k5 + b6 * st.k6);
        st.rhs(t + h, st.ytmp, st.k7); // FSAL
        st.k2 = h * (e1 * st.k1 + e3 * st.k3 + e4 * st.k4 + e5 * st.k5 + e6 * st.k6 + e7 * st.k7);
        err = error_norm(st.k2, y, st.ytmp, tol);
        ++steps;
        if (err <= 1.0) {
            t += h;
            y.swap(st.ytmp);
            st.k1.swap(st.k7);
        }
        const double factor =
            (err <= 1e-30) ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
        h = std::min(h * factor, hmax);
    }
}

void integrate_rk4(const BichromaticDrive& drive, Eigen::VectorXcd& y, double t0, double t1,
                   double step) {
    if (t1 <= t0) return;
    Stepper st(drive);
    const long n = std::max<long>(1, static_cast<long>(std::ceil((t1 - t0) / step)));
    const double h = (t1 - t0) / static_cast<double>(n);
    double t = t0;
    for (long i = 0; i < n; ++i) {
        st.rhs(t, y, st.k1);
        st.ytmp = y + (0.5 * h) * st.k1;
        st.rhs(t + 0.5 * h, st.ytmp, st.k2);
        st.ytmp = y + (0.5 * h) * st.k2;
        st.rhs(t + 0.5 * h, st.ytmp, st.k3);
        st.ytmp = y + h * st.k3;
        st.rhs(t + h, st.ytmp, st.k4);
        y += (h / 6.0) * (st.k1 + 2.0 * st.k2 + 2.0 * st.k3 + st.k4);
        t = t0 + (t1 - t0) * static_cast<double>(i + 1) / static_cast<double>(n);
    }
}

} // namespace

void evolve_segment(const BichromaticDrive& h, Eigen::VectorXcd& psi, double t0, double t1,
                    const IntegratorConfig& integrator) {
    integrator.validate();
    double hmax = integrator.max_step;
    if (hmax <= 0.0) hmax = 1.0 / (50.0 * h.trap().nu);
    if (integrator.method == IntegratorMethod::rk4)
        integrate_rk4(h, psi, t0, t1, integrator.max_step);
    else
        integrate_dopri5(h, psi, t0, t1, hmax, integrator.tolerance);
}

SystemState evolve(const SystemState& initial, const TrapParams& trap, const DriveConfig& drive,
                   const IntegratorConfig& integrator) {
    const BichromaticDrive h(trap, drive, initial.fock_cutoff);
    SystemState state = initial;
    evolve_segment(h, state.amplitudes, 0.0, drive.envelope.total_duration, integrator);
    return state;
}

SystemState carrier_pulse(const SystemState& state, double theta, double phi) {
    Eigen::Matrix2cd sigma_phi = std::cos(phi) * ion_sigma(SpinKind::x()) +
                                 std::sin(phi) * ion_sigma(SpinKind::y());
    const Eigen::Matrix2cd u2 = std::cos(0.5 * theta) * Eigen::Matrix2cd::Identity() -
                                kI * std::sin(0.5 * theta) * sigma_phi;
    Eigen::Matrix4cd u4;
    u4 = kron(u2, u2);

    const int n = state.fock_cutoff;
    SystemState out = state;
    Eigen::Vector4cd v;
    for (int k = 0; k < n; ++k) {
        for (int b = 0; b < 4; ++b) v[b] = state.amplitudes[b * n + k];
        v = u4 * v;
        for (int b = 0; b < 4; ++b) out.amplitudes[b * n + k] = v[b];
    }
    return out;
}

void apply_ion_flip(SystemState& state, int ion) {
    const int n = state.fock_cutoff;
    auto swap_blocks = [&](int a, int b) {
        state.amplitudes.segment(a * n, n).swap(state.amplitudes.segment(b * n, n));
    };
    if (ion == 0) {
        swap_blocks(kSS, kDS);
        swap_blocks(kSD, kDD);
    } else {
        swap_blocks(kSS, kSD);
        swap_blocks(kDS, kDD);
    }
}

} // namespace msgate
