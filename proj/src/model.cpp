#include "ptring/model.hpp"

#include <cmath>

namespace ptring
{
namespace
{
bool close_rel(double a, double b, double rel)
{
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

void require_finite_nonneg(double value, const char *field)
{
    if (!std::isfinite(value))
        throw ConfigError(field, "must be finite");
    if (value < 0.0)
        throw ConfigError(field, "must be non-negative");
}
} // namespace

const char *to_string(Port port)
{
    return port == Port::One ? "1->4" : "4->1";
}

void validate(const SystemConfig &config)
{
    const auto &res = config.resonators;
    require_finite_nonneg(res.omega_c, "resonators.omega_c");
    require_finite_nonneg(res.C1, "resonators.C1");
    require_finite_nonneg(res.C2, "resonators.C2");
    require_finite_nonneg(res.gamma1, "resonators.gamma1");
    require_finite_nonneg(res.gamma2, "resonators.gamma2");
    if (res.Q1) {
        if (!(*res.Q1 > 0.0))
            throw ConfigError("resonators.Q1", "must be positive");
        if (!close_rel(res.C1, res.omega_c / *res.Q1, 1e-12))
            throw ConfigError("resonators.C1", "inconsistent with omega_c / Q1");
    }
    if (res.Q2) {
        if (!(*res.Q2 > 0.0))
            throw ConfigError("resonators.Q2", "must be positive");
        if (!close_rel(res.C2, res.omega_c / *res.Q2, 1e-12))
            throw ConfigError("resonators.C2", "inconsistent with omega_c / Q2");
    }

    const auto &gain = config.gain;
    require_finite_nonneg(gain.A, "gain.A");
    require_finite_nonneg(gain.B, "gain.B");
    if (gain.microscopic) {
        const auto &m = *gain.microscopic;
        require_finite_nonneg(m.g, "gain.g");
        require_finite_nonneg(m.r, "gain.r");
        if (!(m.gamma_atom > 0.0))
            throw ConfigError("gain.Gamma_atom", "must be positive");
        const auto ab = gain_coefficients(m.g, m.r, m.gamma_atom);
        if (!close_rel(gain.A, ab.A, 1e-12))
            throw ConfigError("gain.A", "inconsistent with (g, r, Gamma_atom)");
        if (!close_rel(gain.B, ab.B, 1e-12))
            throw ConfigError("gain.B", "inconsistent with (g, r, Gamma_atom)");
    }

    require_finite_nonneg(config.kappa, "kappa");

    const auto &drive = config.drive;
    require_finite_nonneg(drive.epsilon, "drive.epsilon");
    if (!std::isfinite(drive.omega_l))
        throw ConfigError("drive.omega", "must be finite");
    if (drive.optical) {
        require_finite_nonneg(drive.optical->power, "drive.power");
        if (!(drive.optical->wavelength > 0.0))
            throw ConfigError("drive.wavelength", "must be positive");
        const double eps = epsilon_from_power(drive.optical->power, drive.optical->wavelength,
                                              drive_side_coupling(res, drive.port));
        if (!close_rel(drive.epsilon, eps, 1e-12))
            throw ConfigError("drive.epsilon", "inconsistent with power and wavelength");
    }
}

DerivedParams derive(const SystemConfig &config, double omega)
{
    const auto &res = config.resonators;
    DerivedParams d;
    d.Gamma1 = res.C1 + res.gamma1;
    d.Gamma2 = res.C2 + res.gamma2;
    d.G1 = config.gain.A - d.Gamma1 - 1.75 * config.gain.B;
    d.Delta = omega - res.omega_c;
    const double denom = d.Gamma2 * d.Gamma2 + 4.0 * d.Delta * d.Delta;
    const double k2 = 4.0 * config.kappa * config.kappa;
    // kappa > 0 with a lossless, resonant passive cavity has no finite f.
    d.f = k2 == 0.0 ? 0.0 : k2 / denom;
    d.F = 0.5 * (d.f * d.Gamma2 - d.G1);
    return d;
}

GainCoefficients gain_coefficients(double g, double r, double gamma_atom)
{
    if (!(gamma_atom > 0.0))
        throw DomainError("gain_coefficients: atomic decay rate must be positive");
    if (g < 0.0 || r < 0.0)
        throw DomainError("gain_coefficients: g and r must be non-negative");
    const double ratio = g * g / (gamma_atom * gamma_atom);
    GainCoefficients out;
    out.A = 2.0 * ratio * r;
    out.B = 4.0 * ratio * out.A;
    return out;
}

double omega_from_wavelength(double wavelength)
{
    if (!(wavelength > 0.0))
        throw DomainError("wavelength must be positive");
    return 2.0 * constants::pi * constants::speed_of_light / wavelength;
}

double epsilon_from_power(double power, double wavelength, double gamma_in)
{
    if (!(wavelength > 0.0))
        throw DomainError("epsilon_from_power: wavelength must be positive");
    if (power < 0.0 || gamma_in < 0.0)
        throw DomainError("epsilon_from_power: power and coupling must be non-negative");
    const double photon_energy = constants::hbar * omega_from_wavelength(wavelength);
    return std::sqrt(gamma_in * power / photon_energy);
}

double saturation_from_maxwell_bloch(double A, double A_sat_sq)
{
    if (!(A_sat_sq > 0.0))
        throw DomainError("saturation_from_maxwell_bloch: saturation intensity must be positive");
    return A / A_sat_sq;
}

double drive_side_coupling(const ResonatorParams &resonators, Port port)
{
    return port == Port::One ? resonators.gamma1 : resonators.gamma2;
}

SystemConfig with_drive_port(SystemConfig config, Port port)
{
    config.drive.port = port;
    if (config.drive.optical) {
        config.drive.epsilon =
            epsilon_from_power(config.drive.optical->power, config.drive.optical->wavelength,
                               drive_side_coupling(config.resonators, port));
    }
    return config;
}

SystemConfig with_detuning(SystemConfig config, double delta)
{
    config.drive.omega_l = config.resonators.omega_c + delta;
    return config;
}

} // namespace ptring
