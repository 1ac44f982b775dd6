#include "ptring/steady.hpp"

#include "ptring/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace ptring
{

const char *to_string(Stability stability)
{
    switch (stability) {
    case Stability::Stable:
        return "stable";
    case Stability::Unstable:
        return "unstable";
    case Stability::Marginal:
        return "marginal";
    }
    return "unknown";
}

CubicCoeffs cubic_coeffs(const SystemConfig &config, double omega, Port direction)
{
    const auto d = derive(config, omega);
    const double B = config.gain.B;
    const double eps = with_drive_port(config, direction).drive.epsilon;
    const double detune = d.Delta * (d.f - 1.0);

    CubicCoeffs c;
    c.lambda1 = 0.25 * B * B;
    c.lambda2 = B * d.F;
    c.lambda3 = d.F * d.F + detune * detune;
    c.lambda4 = direction == Port::One ? -eps * eps : -d.f * eps * eps;
    return c;
}

IntensityRoots solve_intensity(const CubicCoeffs &coeffs)
{
    IntensityRoots out;
    const auto p = coeffs.polynomial();

    if (coeffs.lambda1 == 0.0 && coeffs.lambda2 == 0.0) {
        if (coeffs.lambda3 == 0.0) {
            if (coeffs.lambda4 != 0.0)
                throw NoSolutionError("solve_intensity: linear equation has no solution (lambda3 = 0)");
            out.roots = {0.0};
            return out;
        }
        out.roots = {std::max(0.0, -coeffs.lambda4 / coeffs.lambda3)};
        return out;
    }

    out.discriminant = cubic::discriminant_sign(p);
    std::vector<double> real_roots;
    if (out.discriminant == cubic::DiscriminantSign::Negative)
        real_roots = {cubic::polish_root(p, cubic::closed_form_real_root(p))};
    else
        real_roots = cubic::general_real_roots(p);
    out.n_real_roots = out.discriminant == cubic::DiscriminantSign::Positive ? 3 : static_cast<int>(real_roots.size());

    const double clamp = 1e-12 * cubic::root_scale(p);
    for (double r : real_roots) {
        if (r < 0.0 && -r <= clamp)
            r = 0.0;
        if (r >= 0.0)
            out.roots.push_back(r);
    }
    std::sort(out.roots.begin(), out.roots.end());
    out.roots.erase(std::unique(out.roots.begin(), out.roots.end()), out.roots.end());
    return out;
}

double steady_residual(const SystemConfig &config, double omega, Port direction, Complex A1,
                       Complex A2)
{
    const auto d = derive(config, omega);
    const double eps = with_drive_port(config, direction).drive.epsilon;
    const double B = config.gain.B;
    const Complex i(0.0, 1.0);
    const double I1 = std::norm(A1);

    const Complex t11 = (i * d.Delta + 0.5 * d.G1) * A1;
    const Complex t12 = -0.5 * B * I1 * A1;
    const Complex t13 = -config.kappa * A2;
    const double drive1 = direction == Port::One ? eps : 0.0;
    const Complex row1 = t11 + t12 + t13 - drive1;
    const double scale1 = std::max({std::abs(d.Delta * A1), std::abs(0.5 * d.G1 * A1), std::abs(t12),
                                    std::abs(t13), drive1});

    const Complex t21 = (i * d.Delta - 0.5 * d.Gamma2) * A2;
    const Complex t22 = config.kappa * A1;
    const double drive2 = direction == Port::Four ? eps : 0.0;
    const Complex row2 = t21 + t22 - drive2;
    const double scale2 = std::max({std::abs(d.Delta * A2), std::abs(0.5 * d.Gamma2 * A2), std::abs(t22), drive2});

    const double r1 = scale1 > 0.0 ? std::abs(row1) / scale1 : std::abs(row1);
    const double r2 = scale2 > 0.0 ? std::abs(row2) / scale2 : std::abs(row2);
    return std::max(r1, r2);
}

SteadyStateSolution reconstruct_steady_state(const SystemConfig &config, double omega,
                                             Port direction, double I1)
{
    const auto d = derive(config, omega);
    const double eps = with_drive_port(config, direction).drive.epsilon;
    const double B = config.gain.B;
    const Complex i(0.0, 1.0);

    if (!(eps > 0.0))
        throw DomainError("steady_state: drive epsilon must be positive");
    if (direction == Port::Four && config.kappa == 0.0)
        throw NoTransmissionError("steady_state: passive-cavity drive cannot reach the active cavity at kappa = 0");
    if (I1 < 0.0)
        throw DomainError("steady_state: intensity must be non-negative");

    const Complex passive(0.5 * d.Gamma2, -d.Delta); // Gamma2/2 - i Delta
    if (passive == Complex(0.0, 0.0) && config.kappa > 0.0)
        throw NoSolutionError("steady_state: lossless resonant passive cavity has no steady state");
    const Complex source = direction == Port::One ? Complex(eps, 0.0) : -eps * config.kappa / passive;

    // Newton on the factored balance |X(I)|^2 I = |s|^2. The expanded cubic
    // loses the small factor G1 - B I near the lasing intensity.
    auto balance = [&](double I) {
        const Complex x(-d.F - 0.5 * B * I, d.Delta * (1.0 - d.f));
        return std::norm(x) * I - std::norm(source);
    };
    double best = std::abs(balance(I1));
    for (int it = 0; it < 8 && best > 0.0; ++it) {
        const Complex x(-d.F - 0.5 * B * I1, d.Delta * (1.0 - d.f));
        const double slope = std::norm(x) - B * I1 * x.real();
        if (slope == 0.0)
            break;
        const double next = I1 - balance(I1) / slope;
        const double value = next >= 0.0 ? std::abs(balance(next)) : best;
        if (!(value < best))
            break;
        I1 = next;
        best = value;
    }
    const Complex X(-d.F - 0.5 * B * I1, d.Delta * (1.0 - d.f));

    const double amp = std::sqrt(I1);
    const Complex proj = source * std::conj(X) * amp / std::norm(source);
    const double cos_phi = proj.real();
    const double sin_phi = proj.imag();
    if (std::abs(cos_phi * cos_phi + sin_phi * sin_phi - 1.0) > 1e-9)
        throw NoSolutionError("steady_state: intensity is not a root of the steady-state cubic");

    SteadyStateSolution sol;
    sol.direction = direction;
    sol.I1 = I1;
    sol.phi1 = std::atan2(sin_phi, cos_phi);
    sol.A1 = std::polar(amp, sol.phi1);
    if (direction == Port::One)
        sol.A2 = config.kappa == 0.0 ? Complex(0.0, 0.0) : config.kappa * sol.A1 / passive;
    else
        sol.A2 = (i * d.Delta + 0.5 * (d.G1 - B * I1)) * sol.A1 / config.kappa;
    sol.I2 = std::norm(sol.A2);
    sol.residual = steady_residual(config, omega, direction, sol.A1, sol.A2);
    return sol;
}

SteadyStateSolution steady_state(const SystemConfig &config, double omega, Port direction)
{
    const double eps = with_drive_port(config, direction).drive.epsilon;
    if (!(eps > 0.0))
        throw DomainError("steady_state: drive epsilon must be positive");
    if (direction == Port::Four && config.kappa == 0.0)
        throw NoTransmissionError("steady_state: passive-cavity drive cannot reach the active cavity at kappa = 0");

    const auto roots = solve_intensity(cubic_coeffs(config, omega, direction));
    if (roots.roots.empty())
        throw NoSolutionError("steady_state: no non-negative intensity root");

    double chosen = roots.roots.front();
    bool stable = true;
    if (roots.roots.size() > 1) {
        stable = false;
        for (double r : roots.roots) {
            if (stability_of_root(config, omega, direction, r).verdict == Stability::Stable) {
                chosen = r;
                stable = true;
                break;
            }
        }
    } else {
        stable = stability_of_root(config, omega, direction, chosen).verdict != Stability::Unstable;
    }

    auto sol = reconstruct_steady_state(config, omega, direction, chosen);
    sol.n_real_roots = roots.n_real_roots;
    sol.all_real_roots = roots.roots;
    sol.primary_stable = stable;
    return sol;
}

MultistabilityReport detect_multistability(const SystemConfig &config, double omega, Port direction)
{
    const auto roots = solve_intensity(cubic_coeffs(config, omega, direction));
    MultistabilityReport report;
    report.discriminant = roots.discriminant;
    report.n_real_roots = roots.n_real_roots;
    report.roots = roots.roots;
    for (double r : roots.roots)
        report.stability.push_back(stability_of_root(config, omega, direction, r).verdict);
    report.multistable = roots.roots.size() > 1;
    return report;
}

} // namespace ptring
