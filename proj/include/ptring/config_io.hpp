#ifndef PTRING_CONFIG_IO_HPP
#define PTRING_CONFIG_IO_HPP

#include "ptring/model.hpp"

#include "json.hpp"

#include <string>

// JSON configuration files. Quantities are plain numbers in SI units
// (rates in s^-1, power in W, lengths in m) or strings with a unit suffix:
// "1.15 MHz", "100 nW", "1550 nm". A rate of 1 MHz means 1e6 s^-1.

namespace ptring
{

enum class QuantityKind
{
    Rate,
    Power,
    Length,
    Dimensionless
};

// Parses a number or a suffixed string; `path` names the field in errors.
double parse_quantity(const nlohmann::json &value, QuantityKind kind, const std::string &path);
double parse_quantity(const std::string &text, QuantityKind kind, const std::string &path);

// Schema:
//   resonators: {omega_c | wavelength, C1 | Q1, C2 | Q2, gamma1, gamma2 | gamma}
//   gain:       {A, B} | {g, r, Gamma_atom} | {A, A_sat_sq}
//   kappa
//   drive:      {port: 1 | 4, epsilon | power + wavelength, detuning | omega}
// Unknown or missing keys raise ConfigError with the dotted field path; the
// result is validated before it is returned.
SystemConfig config_from_json(const nlohmann::json &doc);
SystemConfig load_config(const std::string &path);

// Inverse of config_from_json: load_config(emit_config(c)) == c.
nlohmann::ordered_json config_to_json(const SystemConfig &config);
std::string emit_config(const SystemConfig &config);

} // namespace ptring

#endif // PTRING_CONFIG_IO_HPP
