#ifndef PTRING_MODEL_HPP
#define PTRING_MODEL_HPP

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

// Domain types and derived-parameter algebra for a pair of coupled
// whispering-gallery resonators: R1 carries a saturable gain medium, R2 is
// passive. Every rate in the library is an angular rate in s^-1; unit suffixes
// (MHz, GHz, ...) are resolved only at the configuration boundary.

namespace ptring
{
using Complex = std::complex<double>;

namespace constants
{
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double speed_of_light = 299792458.0; // m / s
inline constexpr double pi = 3.14159265358979323846;
} // namespace constants

// Thrown for inputs outside an operation's mathematical domain.
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Invariant violation in a configuration. `field` is a dotted path such as
// "resonators.C1" so callers can point at the offending entry.
class ConfigError : public std::invalid_argument
{
public:
    ConfigError(std::string field, const std::string &message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field))
    {
    }
    const std::string &field() const noexcept { return field_; }

private:
    std::string field_;
};

// Which waveguide port carries the probe. Port1 drives the active cavity and
// transmits towards port 4; Port4 drives the passive cavity towards port 1.
enum class Port
{
    One,
    Four
};

const char *to_string(Port port);

struct ResonatorParams
{
    double omega_c = 0.0; // common resonance, omega_1 = omega_2
    double C1 = 0.0;      // intrinsic losses
    double C2 = 0.0;
    double gamma1 = 0.0;  // waveguide couplings
    double gamma2 = 0.0;
    std::optional<double> Q1;
    std::optional<double> Q2;

    bool operator==(const ResonatorParams &) const = default;
};

struct MicroscopicGain
{
    double g = 0.0;          // atom-field coupling
    double r = 0.0;          // pump rate
    double gamma_atom = 0.0; // atomic decay rate

    bool operator==(const MicroscopicGain &) const = default;
};

struct GainParams
{
    double A = 0.0; // linear gain
    double B = 0.0; // saturation coefficient
    std::optional<MicroscopicGain> microscopic;

    bool operator==(const GainParams &) const = default;
};

struct OpticalDrive
{
    double power = 0.0;      // W
    double wavelength = 0.0; // m

    bool operator==(const OpticalDrive &) const = default;
};

struct DriveConfig
{
    Port port = Port::One;
    double epsilon = 0.0;
    double omega_l = 0.0;
    // When present, epsilon is derived from the optical power through the
    // drive-side waveguide coupling.
    std::optional<OpticalDrive> optical;

    bool operator==(const DriveConfig &) const = default;
};

struct SystemConfig
{
    ResonatorParams resonators;
    GainParams gain;
    double kappa = 0.0;
    DriveConfig drive;

    bool operator==(const SystemConfig &) const = default;
};

struct DerivedParams
{
    double Gamma1 = 0.0;
    double Gamma2 = 0.0;
    double G1 = 0.0;    // A - Gamma1 - 7B/4
    double Delta = 0.0; // omega - omega_c
    double f = 0.0;     // 4 kappa^2 / (Gamma2^2 + 4 Delta^2)
    double F = 0.0;     // (f Gamma2 - G1) / 2
};

// Throws ConfigError naming the first violated invariant.
void validate(const SystemConfig &config);

DerivedParams derive(const SystemConfig &config, double omega);

inline DerivedParams derive(const SystemConfig &config)
{
    return derive(config, config.drive.omega_l);
}

struct GainCoefficients
{
    double A = 0.0;
    double B = 0.0;
};

// Scully-Lamb gain and saturation from the gain-medium parameters:
// A = 2 g^2 r / Gamma^2, B = 4 g^2 A / Gamma^2.
GainCoefficients gain_coefficients(double g, double r, double gamma_atom);

// epsilon = sqrt(gamma_in * P / (hbar * omega_l)), omega_l = 2 pi c / lambda.
double epsilon_from_power(double power, double wavelength, double gamma_in);

// Maxwell-Bloch saturation A / (1 + I/I_s) expanded to first order.
double saturation_from_maxwell_bloch(double A, double A_sat_sq);

double omega_from_wavelength(double wavelength);

// Waveguide coupling of the cavity that receives the probe.
double drive_side_coupling(const ResonatorParams &resonators, Port port);

// Copy of `config` probed from `port`. Epsilon is re-derived from the optical
// power when one is configured, otherwise it is carried over unchanged.
SystemConfig with_drive_port(SystemConfig config, Port port);

// Copy with the drive frequency moved to omega_c + delta.
SystemConfig with_detuning(SystemConfig config, double delta);

} // namespace ptring

#endif // PTRING_MODEL_HPP
