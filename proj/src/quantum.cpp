#include "ptring/quantum.hpp"

#include "ptring/ode.hpp"
#include "ptring/steady.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ptring::quantum
{

void check_basis(const FockBasis &basis, int max_dimension)
{
    if (basis.n_max1 < 1 || basis.n_max2 < 1)
        throw DomainError("FockBasis: cutoffs must be at least 1");
    if (static_cast<long long>(basis.dim1()) * basis.dim2() > max_dimension)
        throw DomainError(fmt::format("FockBasis: dimension {} exceeds the budget of {}",
                                      static_cast<long long>(basis.dim1()) * basis.dim2(), max_dimension));
}

std::pair<double, double> estimated_photon_numbers(const SystemConfig &config)
{
    const auto d = derive(config);
    const double eps = with_drive_port(config, config.drive.port).drive.epsilon;
    if (eps > 0.0) {
        try {
            const auto sol = steady_state(config);
            return {sol.I1, sol.I2};
        } catch (const std::exception &) {
        }
    }
    if (d.G1 > 0.0 && config.gain.B > 0.0) {
        const double I1 = d.G1 / config.gain.B;
        const double f = d.Gamma2 > 0.0 ? 4.0 * config.kappa * config.kappa / (d.Gamma2 * d.Gamma2) : 0.0;
        return {I1, f * I1};
    }
    return {0.0, 0.0};
}

FockBasis default_basis(const SystemConfig &config)
{
    const auto [n1, n2] = estimated_photon_numbers(config);
    auto cutoff = [](double n) { return std::max(8, 4 * static_cast<int>(std::ceil(n))); };
    return {cutoff(n1), cutoff(n2)};
}

std::optional<std::string> cutoff_warning(const SystemConfig &config, const FockBasis &basis)
{
    const auto [n1, n2] = estimated_photon_numbers(config);
    if (n1 > 0.5 * basis.n_max1 || n2 > 0.5 * basis.n_max2)
        return fmt::format("cutoff ({}, {}) is small for the estimated photon numbers ({:.3g}, {:.3g})", basis.n_max1,
                           basis.n_max2, n1, n2);
    return std::nullopt;
}

DensityMatrix vacuum(const FockBasis &basis)
{
    return fock_state(basis, 0, 0);
}

DensityMatrix fock_state(const FockBasis &basis, int n1, int n2)
{
    check_basis(basis);
    if (n1 < 0 || n2 < 0 || n1 > basis.n_max1 || n2 > basis.n_max2)
        throw DomainError("fock_state: photon numbers outside the basis");
    DensityMatrix s{basis, Eigen::MatrixXcd::Zero(basis.dimension(), basis.dimension())};
    const int k = basis.index(n1, n2);
    s.rho(k, k) = 1.0;
    return s;
}

namespace
{
Eigen::VectorXcd coherent_amplitudes(int n_max, Complex alpha)
{
    Eigen::VectorXcd c(n_max + 1);
    c[0] = 1.0;
    for (int n = 1; n <= n_max; ++n)
        c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
    return c / c.norm();
}

Eigen::VectorXd thermal_populations(int n_max, double mean)
{
    Eigen::VectorXd p(n_max + 1);
    const double ratio = mean / (1.0 + mean);
    p[0] = 1.0;
    for (int n = 1; n <= n_max; ++n)
        p[n] = p[n - 1] * ratio;
    return p / p.sum();
}
} // namespace

DensityMatrix coherent_state(const FockBasis &basis, Complex alpha1, Complex alpha2)
{
    check_basis(basis);
    const Eigen::VectorXcd c1 = coherent_amplitudes(basis.n_max1, alpha1);
    const Eigen::VectorXcd c2 = coherent_amplitudes(basis.n_max2, alpha2);
    Eigen::VectorXcd psi(basis.dimension());
    for (int n1 = 0; n1 <= basis.n_max1; ++n1)
        for (int n2 = 0; n2 <= basis.n_max2; ++n2)
            psi[basis.index(n1, n2)] = c1[n1] * c2[n2];
    return {basis, psi * psi.adjoint()};
}

DensityMatrix thermal_state(const FockBasis &basis, double n1, double n2)
{
    check_basis(basis);
    if (n1 < 0.0 || n2 < 0.0)
        throw DomainError("thermal_state: mean photon numbers must be non-negative");
    const Eigen::VectorXd p1 = thermal_populations(basis.n_max1, n1);
    const Eigen::VectorXd p2 = thermal_populations(basis.n_max2, n2);
    DensityMatrix s{basis, Eigen::MatrixXcd::Zero(basis.dimension(), basis.dimension())};
    for (int i = 0; i <= basis.n_max1; ++i)
        for (int j = 0; j <= basis.n_max2; ++j)
            s.rho(basis.index(i, j), basis.index(i, j)) = p1[i] * p2[j];
    return s;
}

ModeOperators mode_operators(const FockBasis &basis)
{
    check_basis(basis);
    const int d = basis.dimension();
    std::vector<Eigen::Triplet<Complex>> t1, t2, tn1, tn2;
    for (int n1 = 0; n1 <= basis.n_max1; ++n1) {
        for (int n2 = 0; n2 <= basis.n_max2; ++n2) {
            const int k = basis.index(n1, n2);
            if (n1 > 0)
                t1.emplace_back(basis.index(n1 - 1, n2), k, std::sqrt(static_cast<double>(n1)));
            if (n2 > 0)
                t2.emplace_back(basis.index(n1, n2 - 1), k, std::sqrt(static_cast<double>(n2)));
            tn1.emplace_back(k, k, static_cast<double>(n1));
            tn2.emplace_back(k, k, static_cast<double>(n2));
        }
    }
    ModeOperators ops;
    ops.a1.resize(d, d);
    ops.a2.resize(d, d);
    ops.n1.resize(d, d);
    ops.n2.resize(d, d);
    ops.a1.setFromTriplets(t1.begin(), t1.end());
    ops.a2.setFromTriplets(t2.begin(), t2.end());
    ops.n1.setFromTriplets(tn1.begin(), tn1.end());
    ops.n2.setFromTriplets(tn2.begin(), tn2.end());
    return ops;
}

const char *to_string(MasterEquationForm form)
{
    return form == MasterEquationForm::NonLindbladian ? "non_lindbladian" : "lindblad";
}

Generator::Generator(const SystemConfig &config, const FockBasis &basis, MasterEquationForm form, int max_dimension)
    : config_(config), basis_(basis), form_(form)
{
    check_basis(basis, max_dimension);
    ops_ = mode_operators(basis);
    warning_ = cutoff_warning(config, basis);

    const auto d = derive(config);
    const double A = config.gain.A;
    const double B = config.gain.B;
    const double eps = with_drive_port(config, config.drive.port).drive.epsilon;
    const int dim = basis.dimension();
    const Complex i(0.0, 1.0);

    SparseOp identity(dim, dim);
    identity.setIdentity();
    const SparseOp a1 = ops_.a1;
    const SparseOp a1d = SparseOp(a1.adjoint());
    const SparseOp a2 = ops_.a2;
    const SparseOp a2d = SparseOp(a2.adjoint());
    const SparseOp &driven = config.drive.port == Port::One ? a1 : a2;
    const SparseOp driven_d = SparseOp(driven.adjoint());

    // Drive-frame Hamiltonian.
    const SparseOp H = SparseOp(-d.Delta * (ops_.n1 + ops_.n2) + i * config.kappa * (a1 * a2d - a1d * a2) +
                                i * eps * (driven - driven_d));

    const SparseOp P = SparseOp(a1 * a1d); // a1 a1^+
    const SparseOp P2 = SparseOp(P * P);
    const double Gamma1 = d.Gamma1, Gamma2 = d.Gamma2;

    if (form == MasterEquationForm::NonLindbladian) {
        // Written out with its Hermitian-conjugate partner in reversed
        // operator order, so the map stays linear on non-Hermitian input.
        K_ = SparseOp(-i * H - 0.5 * A * P + (B / 8.0) * P2 - 0.5 * Gamma1 * ops_.n1 - 0.5 * Gamma2 * ops_.n2);
        sandwiches_.push_back({A, a1d, a1});
        sandwiches_.push_back({0.75 * B, P, P});
        sandwiches_.push_back({-0.5 * B, a1d, SparseOp(P * a1)});
        sandwiches_.push_back({-0.5 * B, SparseOp(a1d * P), a1});
        sandwiches_.push_back({Gamma1, a1, a1d});
        sandwiches_.push_back({Gamma2, a2, a2d});
    } else {
        std::vector<SparseOp> jumps;
        if (A > 0.0)
            jumps.push_back(SparseOp(std::sqrt(A) * a1d * (identity - (B / (2.0 * A)) * P)));
        else if (B > 0.0)
            throw DomainError("Generator: the Lindblad form needs A > 0 when B > 0");
        jumps.push_back(SparseOp(0.5 * std::sqrt(3.0 * B) * P));
        jumps.push_back(SparseOp(std::sqrt(Gamma1) * a1));
        jumps.push_back(SparseOp(std::sqrt(Gamma2) * a2));
        SparseOp loss(dim, dim);
        for (const auto &L : jumps) {
            const SparseOp Ld = SparseOp(L.adjoint());
            loss += SparseOp(Ld * L);
            sandwiches_.push_back({1.0, L, Ld});
        }
        K_ = SparseOp(-i * H - 0.5 * loss);
    }
    K_.prune(Complex(0.0, 0.0));
    K_adjoint_ = SparseOp(K_.adjoint());

    const double photons = std::max(1.0, static_cast<double>(basis.n_max1));
    rate_scale_ = std::max({A, B * photons * photons, Gamma1, Gamma2, config.kappa, std::abs(d.Delta),
                            eps / std::sqrt(photons)});
    if (!(rate_scale_ > 0.0))
        rate_scale_ = 1.0;
}

void Generator::apply(const Eigen::MatrixXcd &rho, Eigen::MatrixXcd &out) const
{
    out = K_ * rho;
    out += rho * K_adjoint_;
    Eigen::MatrixXcd tmp;
    for (const auto &s : sandwiches_) {
        if (s.coefficient == 0.0)
            continue;
        tmp = rho * s.right;
        out += s.coefficient * (s.left * tmp);
    }
}

Eigen::MatrixXcd Generator::operator()(const Eigen::MatrixXcd &rho) const
{
    Eigen::MatrixXcd out;
    apply(rho, out);
    return out;
}

namespace
{
// Tr[op rho] for a sparse op.
Complex trace_product(const SparseOp &op, const Eigen::MatrixXcd &rho)
{
    Complex sum = 0.0;
    for (int col = 0; col < op.outerSize(); ++col)
        for (SparseOp::InnerIterator it(op, col); it; ++it)
            sum += it.value() * rho(it.col(), it.row());
    return sum;
}
} // namespace

Expectations expectations(const Eigen::MatrixXcd &rho, const FockBasis &basis)
{
    if (rho.rows() != basis.dimension() || rho.cols() != basis.dimension())
        throw DomainError("expectations: state does not match the basis");
    Expectations e;
    for (int n1 = 0; n1 <= basis.n_max1; ++n1) {
        for (int n2 = 0; n2 <= basis.n_max2; ++n2) {
            const int k = basis.index(n1, n2);
            const double p = rho(k, k).real();
            e.trace += p;
            e.n1 += n1 * p;
            e.n2 += n2 * p;
            // a1 |n1, n2> = sqrt(n1) |n1 - 1, n2>, so Tr[a1 rho] picks rho(k, k - row).
            if (n1 > 0) {
                const int j = basis.index(n1 - 1, n2);
                const double s = std::sqrt(static_cast<double>(n1));
                e.a1 += s * rho(k, j);
                e.a1_dag_a1_a1 += s * (n1 - 1) * rho(k, j);
            }
            if (n2 > 0)
                e.a2 += std::sqrt(static_cast<double>(n2)) * rho(k, basis.index(n1, n2 - 1));
        }
    }
    // Tr[rho^2] = sum |rho_ij|^2 for Hermitian rho.
    e.purity = rho.cwiseAbs2().sum();
    return e;
}

double top_layer_population(const Eigen::MatrixXcd &rho, const FockBasis &basis)
{
    double p = 0.0;
    for (int n1 = 0; n1 <= basis.n_max1; ++n1)
        for (int n2 = 0; n2 <= basis.n_max2; ++n2)
            if (n1 == basis.n_max1 || n2 == basis.n_max2)
                p += rho(basis.index(n1, n2), basis.index(n1, n2)).real();
    return p;
}

QuantumTrajectory evolve(const DensityMatrix &rho0, const Generator &generator, double t_final,
                         const EvolveConfig &config)
{
    if (!(rho0.basis == generator.basis()))
        throw DomainError("evolve: state and generator use different bases");
    if (!(t_final >= 0.0))
        throw DomainError("evolve: t_final must be non-negative");
    const double norm = rho0.rho.norm();
    if ((rho0.rho - rho0.rho.adjoint()).norm() > 1e-10 * std::max(1.0, norm))
        throw DomainError("evolve: initial state is not Hermitian");
    if (std::abs(rho0.rho.trace().real() - 1.0) > 1e-8)
        throw DomainError("evolve: initial state does not have unit trace");
    std::vector<double> samples = config.sample_times;
    if (samples.empty())
        samples.push_back(t_final);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (samples[k] < 0.0 || samples[k] > t_final * (1.0 + 1e-12) || (k > 0 && !(samples[k] > samples[k - 1])))
            throw DomainError("evolve: sample times must be ascending within [0, t_final]");
    }

    const double rate = generator.rate_scale();
    const FockBasis &basis = generator.basis();
    auto f = [&generator, rate](double, const Eigen::MatrixXcd &y, Eigen::MatrixXcd &dy) {
        generator.apply(y, dy);
        dy /= rate;
    };
    ode::DormandPrince45<Eigen::MatrixXcd, decltype(f)> stepper(f, config.rel_tol, config.abs_tol);

    QuantumTrajectory traj;
    traj.min_eigenvalue = std::numeric_limits<double>::infinity();
    Eigen::MatrixXcd y = rho0.rho;

    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.values.push_back(expectations(y, basis));
        if (config.keep_states)
            traj.states.push_back(y);
        if (config.track_positivity) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(y, Eigen::EigenvaluesOnly);
            const double lowest = solver.eigenvalues().minCoeff();
            traj.min_eigenvalue = std::min(traj.min_eigenvalue, lowest);
            if (lowest < -1e-8)
                traj.positivity_violated = true;
        }
        const double leak = top_layer_population(y, basis);
        traj.max_leakage = std::max(traj.max_leakage, leak);
        if (leak > config.leakage_threshold)
            traj.leakage_warning = true;
    };

    std::size_t next = 0;
    double tau = 0.0;
    const double tau_end = t_final * rate;
    while (next < samples.size() && samples[next] * rate <= 0.0)
        record(samples[next++]);
    double h = 1e-3;
    try {
        while (next < samples.size()) {
            const double target = std::min(samples[next] * rate, tau_end);
            if (target - tau > 1e-12 * std::max(1.0, target)) {
                stepper.step(tau, y, h, target - tau);
                if (std::abs(tau - target) <= 1e-12 * std::max(1.0, target))
                    tau = target;
                y = 0.5 * (y + y.adjoint()).eval();
                if (!y.allFinite())
                    throw QuantumIntegrationError("evolve: state became non-finite");
                const double drift = std::abs(y.trace().real() - 1.0);
                traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
                if (drift > config.trace_tolerance)
                    throw QuantumIntegrationError(
                        fmt::format("evolve: trace drift {:.3e} exceeds {:.1e}", drift, config.trace_tolerance));
            } else {
                tau = target;
            }
            while (next < samples.size() && tau >= std::min(samples[next] * rate, tau_end))
                record(samples[next++]);
        }
    } catch (const ode::StepSizeUnderflow &) {
        throw QuantumIntegrationError("evolve: step size underflow");
    }

    if (!std::isfinite(traj.min_eigenvalue))
        traj.min_eigenvalue = 0.0;
    traj.final_state = {basis, y};
    traj.accepted_steps = stepper.accepted();
    traj.rejected_steps = stepper.rejected();
    return traj;
}

std::pair<Complex, Complex> moment_rhs(const Expectations &e, const SystemConfig &config)
{
    const auto d = derive(config);
    const double eps = with_drive_port(config, config.drive.port).drive.epsilon;
    const Complex i(0.0, 1.0);
    Complex da1 = (i * d.Delta + 0.5 * d.G1) * e.a1 - config.kappa * e.a2 - 0.5 * config.gain.B * e.a1_dag_a1_a1;
    Complex da2 = (i * d.Delta - 0.5 * d.Gamma2) * e.a2 + config.kappa * e.a1;
    if (config.drive.port == Port::One)
        da1 -= eps;
    else
        da2 -= eps;
    return {da1, da2};
}

RateResidual rate_equation_residual(const QuantumTrajectory &trajectory, const Generator &generator)
{
    const auto &t = trajectory.times;
    const auto &v = trajectory.values;
    const SystemConfig &config = generator.config();
    const double rate = generator.rate_scale();
    const double eps = with_drive_port(config, config.drive.port).drive.epsilon;

    double amplitude = eps / rate;
    for (const auto &e : v)
        amplitude = std::max({amplitude, std::abs(e.a1), std::abs(e.a2)});

    RateResidual r;
    r.scale = rate * amplitude;
    const double inv = r.scale > 0.0 ? 1.0 / r.scale : 1.0;

    if (t.size() >= 5) {
        const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
        for (std::size_t k = 1; k < t.size(); ++k)
            if (std::abs(t[k] - t[k - 1] - h) > 1e-9 * std::max(h, std::abs(t[k])))
                throw DomainError("rate_equation_residual: samples must be uniformly spaced");
        for (std::size_t k = 2; k + 2 < t.size(); ++k) {
            auto fd = [&](auto get) {
                return (-get(v[k + 2]) + 8.0 * get(v[k + 1]) - 8.0 * get(v[k - 1]) + get(v[k - 2])) / (12.0 * h);
            };
            const Complex d1 = fd([](const Expectations &e) { return e.a1; });
            const Complex d2 = fd([](const Expectations &e) { return e.a2; });
            const auto [r1, r2] = moment_rhs(v[k], config);
            r.finite_difference = std::max({r.finite_difference, std::abs(d1 - r1) * inv, std::abs(d2 - r2) * inv});
        }
    } else {
        r.finite_difference = std::numeric_limits<double>::quiet_NaN();
    }

    if (trajectory.states.empty()) {
        r.exact = std::numeric_limits<double>::quiet_NaN();
    } else {
        Eigen::MatrixXcd drho;
        for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
            generator.apply(trajectory.states[k], drho);
            const Complex d1 = trace_product(generator.ops().a1, drho);
            const Complex d2 = trace_product(generator.ops().a2, drho);
            const auto [r1, r2] = moment_rhs(expectations(trajectory.states[k], generator.basis()), config);
            r.exact = std::max({r.exact, std::abs(d1 - r1) * inv, std::abs(d2 - r2) * inv});
        }
    }
    return r;
}

} // namespace ptring::quantum
