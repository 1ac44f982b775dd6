#include "ptring/dynamics.hpp"

#include "ptring/ode.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>

namespace ptring
{

namespace
{

double drive_epsilon(const SystemConfig &config, Port direction)
{
    return with_drive_port(config, direction).drive.epsilon;
}

// Rotating-frame right-hand side at detuning `delta`, shared by every entry
// point so lab and rotating integrations use identical algebra.
std::array<Complex, 2> rotating_rhs(const DerivedParams &d, const SystemConfig &config, double eps,
                                    Port direction, Complex A1, Complex A2)
{
    const Complex i(0.0, 1.0);
    const double B = config.gain.B;
    Complex dA1 = (i * d.Delta + 0.5 * d.G1) * A1 - config.kappa * A2 - 0.5 * B * std::norm(A1) * A1;
    Complex dA2 = (i * d.Delta - 0.5 * d.Gamma2) * A2 + config.kappa * A1;
    if (direction == Port::One)
        dA1 -= eps;
    else
        dA2 -= eps;
    return {dA1, dA2};
}

std::array<Complex, 2> lab_rhs(const DerivedParams &d, const SystemConfig &config, double eps, Port direction,
                               double t, Complex a1, Complex a2)
{
    const Complex i(0.0, 1.0);
    const double B = config.gain.B;
    const double wc = config.resonators.omega_c;
    const Complex drive = eps * std::exp(-i * config.drive.omega_l * t);
    Complex da1 = (-i * wc + 0.5 * d.G1) * a1 - config.kappa * a2 - 0.5 * B * std::norm(a1) * a1;
    Complex da2 = (-i * wc - 0.5 * d.Gamma2) * a2 + config.kappa * a1;
    if (direction == Port::One)
        da1 -= drive;
    else
        da2 -= drive;
    return {da1, da2};
}

double largest_root(const SystemConfig &config, double omega, Port direction)
{
    try {
        const auto roots = solve_intensity(cubic_coeffs(config, omega, direction));
        return roots.roots.empty() ? 0.0 : roots.roots.back();
    } catch (const std::exception &) {
        return 0.0;
    }
}

bool finite(const Eigen::Vector2cd &y)
{
    return std::isfinite(y[0].real()) && std::isfinite(y[0].imag()) && std::isfinite(y[1].real()) &&
           std::isfinite(y[1].imag());
}

// Real 2x2 block of the complex-linear map delta -> p delta + q conj(delta).
Eigen::Matrix2d real_block(Complex p, Complex q)
{
    Eigen::Matrix2d m;
    m << p.real() + q.real(), -p.imag() + q.imag(), p.imag() + q.imag(), p.real() - q.real();
    return m;
}

} // namespace

double rate_scale(const SystemConfig &config, double omega, double intensity)
{
    const auto d = derive(config, omega);
    double scale = std::max({std::abs(d.G1), d.Gamma1, d.Gamma2, config.kappa, std::abs(d.Delta),
                             config.gain.B * intensity});
    if (intensity > 0.0)
        scale = std::max(scale, config.drive.epsilon / std::sqrt(intensity));
    return scale > 0.0 ? scale : 1.0;
}

std::array<Complex, 2> rhs(const TrajectoryState &state, const SystemConfig &config, Port direction)
{
    const auto d = derive(config, config.drive.omega_l);
    const double eps = drive_epsilon(config, direction);
    if (state.frame == Frame::Rotating)
        return rotating_rhs(d, config, eps, direction, state.A1, state.A2);
    return lab_rhs(d, config, eps, direction, state.t, state.A1, state.A2);
}

Trajectory integrate(const TrajectoryState &initial, const SystemConfig &config,
                     const IntegratorConfig &integrator, Port direction)
{
    if (!(integrator.rel_tol > 0.0) || !(integrator.abs_tol > 0.0))
        throw DomainError("integrate: tolerances must be positive");
    if (!(integrator.max_time > 0.0))
        throw DomainError("integrate: max_time must be positive");
    if (integrator.convergence_window < 0.0 || integrator.max_step < 0.0 || integrator.sample_interval < 0.0)
        throw DomainError("integrate: window, step cap and sample interval must be non-negative");

    const double omega = config.drive.omega_l;
    const auto d = derive(config, omega);
    const double eps = drive_epsilon(config, direction);
    const Frame frame = initial.frame;

    const double root = largest_root(config, omega, direction);
    double amp = std::max({std::abs(initial.A1), std::abs(initial.A2), std::sqrt(root), 1.0});
    if (direction == Port::Four)
        amp = std::max(amp, eps / std::abs(Complex(0.5 * d.Gamma2, -d.Delta)));
    double rate = rate_scale(config, omega, amp * amp);
    if (frame == Frame::Lab)
        rate = std::max({rate, std::abs(config.resonators.omega_c), std::abs(omega)});

    // Internal variables: tau = rate * t, y = A / amp.
    const double t0 = initial.t;
    auto to_state = [&](double tau, const Eigen::Vector2cd &y) {
        return TrajectoryState{t0 + tau / rate, amp * y[0], amp * y[1], frame};
    };
    auto f = [&](double tau, const Eigen::Vector2cd &y, Eigen::Vector2cd &dy) {
        const double t = t0 + tau / rate;
        const auto r = frame == Frame::Rotating ? rotating_rhs(d, config, eps, direction, amp * y[0], amp * y[1])
                                                : lab_rhs(d, config, eps, direction, t, amp * y[0], amp * y[1]);
        dy[0] = r[0] / (rate * amp);
        dy[1] = r[1] / (rate * amp);
    };
    ode::DormandPrince45<Eigen::Vector2cd, decltype(f)> stepper(f, integrator.rel_tol, integrator.abs_tol);

    const double tau_end = integrator.max_time * rate;
    const double window = integrator.convergence_window * rate;
    double cap = 1e300;
    if (integrator.max_step > 0.0)
        cap = integrator.max_step * rate;
    else if (window > 0.0)
        cap = window / 8.0;
    stepper.set_step_cap(cap);

    Trajectory traj;
    traj.time_scale = 1.0 / rate;
    traj.amplitude_scale = amp;

    Eigen::Vector2cd y(initial.A1 / amp, initial.A2 / amp);
    if (!finite(y))
        throw DomainError("integrate: initial state must be finite");
    double tau = 0.0;
    double h = std::min(1e-2, cap);
    traj.samples.push_back(initial);
    double last_sample = 0.0;

    std::deque<std::pair<double, Eigen::Vector2cd>> history;
    history.emplace_back(tau, y);
    double window_change = 0.0;

    try {
        while (tau < tau_end) {
            stepper.step(tau, y, h, std::min(cap, tau_end - tau));
            if (!finite(y))
                throw StiffnessError("integrate: state became non-finite", to_state(tau, y));
            if (integrator.sample_interval == 0.0 ||
                (tau - last_sample) / rate >= integrator.sample_interval) {
                traj.samples.push_back(to_state(tau, y));
                last_sample = tau;
            }
            if (window > 0.0) {
                history.emplace_back(tau, y);
                while (history.size() > 1 && history[1].first <= tau - window)
                    history.pop_front();
                window_change = 0.0;
                for (const auto &entry : history)
                    window_change = std::max(window_change, (entry.second - y).cwiseAbs().maxCoeff());
                if (tau - history.front().first >= window && window_change < integrator.convergence_eps) {
                    traj.termination = Termination::Converged;
                    break;
                }
            }
        }
    } catch (const ode::StepSizeUnderflow &) {
        throw StiffnessError("integrate: step size underflow", to_state(tau, y));
    }

    traj.terminal = to_state(tau, y);
    if (traj.samples.back().t != traj.terminal.t)
        traj.samples.push_back(traj.terminal);
    traj.oscillating = traj.termination == Termination::MaxTime && window > 0.0 &&
                       window_change > 1e3 * integrator.convergence_eps;
    traj.accepted_steps = stepper.accepted();
    traj.rejected_steps = stepper.rejected();
    return traj;
}

StabilityReport stability_of_root(const SystemConfig &config, double omega, Port direction, double I1)
{
    const auto d = derive(config, omega);
    const double eps = drive_epsilon(config, direction);
    const double B = config.gain.B;
    const Complex i(0.0, 1.0);
    const double amp = std::sqrt(std::max(I1, 0.0));

    // Fixed point for the root; undriven and unreachable cases have no phase
    // reference, so A1 is taken real.
    Complex A1 = amp;
    Complex A2;
    const Complex passive(0.5 * d.Gamma2, -d.Delta);
    if (direction == Port::Four && config.kappa == 0.0) {
        A2 = eps / (i * d.Delta - 0.5 * d.Gamma2);
    } else if (!(eps > 0.0)) {
        A2 = passive == Complex(0.0, 0.0) ? Complex(0.0, 0.0) : config.kappa * A1 / passive;
    } else {
        const auto sol = reconstruct_steady_state(config, omega, direction, I1);
        A1 = sol.A1;
        A2 = sol.A2;
    }

    Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
    J.block<2, 2>(0, 0) = real_block(i * d.Delta + 0.5 * d.G1 - B * std::norm(A1), -0.5 * B * A1 * A1);
    J.block<2, 2>(0, 2) = real_block(-config.kappa, 0.0);
    J.block<2, 2>(2, 0) = real_block(config.kappa, 0.0);
    J.block<2, 2>(2, 2) = real_block(i * d.Delta - 0.5 * d.Gamma2, 0.0);

    Eigen::EigenSolver<Eigen::Matrix4d> solver(J, false);
    StabilityReport report;
    report.max_real_part = -1e300;
    for (int k = 0; k < 4; ++k) {
        report.eigenvalues[k] = solver.eigenvalues()[k];
        report.max_real_part = std::max(report.max_real_part, report.eigenvalues[k].real());
    }
    const double tol = 1e-9 * rate_scale(config, omega, I1);
    if (report.max_real_part > tol)
        report.verdict = Stability::Unstable;
    else if (report.max_real_part >= -tol)
        report.verdict = Stability::Marginal;
    else
        report.verdict = Stability::Stable;
    return report;
}

} // namespace ptring
