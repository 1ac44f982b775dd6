#include "ptring/config_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace ptring
{

using nlohmann::json;

namespace
{

const std::map<std::string, double> &unit_table(QuantityKind kind)
{
    static const std::map<std::string, double> rate{{"Hz", 1.0},  {"kHz", 1e3},  {"MHz", 1e6},
                                                    {"GHz", 1e9}, {"THz", 1e12}, {"s^-1", 1.0},
                                                    {"1/s", 1.0}, {"rad/s", 1.0}};
    static const std::map<std::string, double> power{{"W", 1.0},    {"mW", 1e-3},  {"uW", 1e-6}, {"μW", 1e-6},
                                                     {"µW", 1e-6}, {"nW", 1e-9}, {"pW", 1e-12}};
    static const std::map<std::string, double> length{{"m", 1.0},     {"mm", 1e-3},       {"um", 1e-6},
                                                      {"μm", 1e-6}, {"µm", 1e-6}, {"nm", 1e-9}};
    static const std::map<std::string, double> none{};
    switch (kind) {
    case QuantityKind::Rate:
        return rate;
    case QuantityKind::Power:
        return power;
    case QuantityKind::Length:
        return length;
    case QuantityKind::Dimensionless:
        return none;
    }
    return none;
}

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

// Reads `key` from `obj`, records it as consumed.
struct Reader
{
    const json &obj;
    std::string path;
    std::set<std::string> seen;

    Reader(const json &o, std::string p) : obj(o), path(std::move(p))
    {
        if (!obj.is_object())
            throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    }

    std::string field(const std::string &key) const { return path.empty() ? key : path + "." + key; }

    bool has(const std::string &key)
    {
        if (obj.contains(key)) {
            seen.insert(key);
            return true;
        }
        return false;
    }

    double quantity(const std::string &key, QuantityKind kind)
    {
        if (!has(key))
            throw ConfigError(field(key), "missing required key");
        return parse_quantity(obj.at(key), kind, field(key));
    }

    double quantity_or(const std::string &key, QuantityKind kind, double fallback)
    {
        return has(key) ? parse_quantity(obj.at(key), kind, field(key)) : fallback;
    }

    void reject_unknown() const
    {
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!seen.count(it.key()))
                throw ConfigError(field(it.key()), "unknown key");
    }
};

} // namespace

double parse_quantity(const std::string &text, QuantityKind kind, const std::string &path)
{
    const std::string s = trim(text);
    double value = 0.0;
    const char *begin = s.data();
    const char *end = s.data() + s.size();
    if (begin != end && *begin == '+')
        ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin)
        throw ConfigError(path, "cannot parse a number from '" + text + "'");
    const std::string unit = trim(std::string(ptr, end));
    if (!unit.empty()) {
        const auto &table = unit_table(kind);
        const auto it = table.find(unit);
        if (it == table.end())
            throw ConfigError(path, "unknown unit '" + unit + "'");
        value *= it->second;
    }
    if (!std::isfinite(value))
        throw ConfigError(path, "must be finite");
    return value;
}

double parse_quantity(const json &value, QuantityKind kind, const std::string &path)
{
    if (value.is_number())
        return value.get<double>();
    if (value.is_string())
        return parse_quantity(value.get<std::string>(), kind, path);
    throw ConfigError(path, "expected a number or a string with a unit");
}

SystemConfig config_from_json(const json &doc)
{
    Reader root(doc, "");
    SystemConfig c;

    if (!root.has("resonators"))
        throw ConfigError("resonators", "missing required key");
    {
        Reader r(doc.at("resonators"), "resonators");
        const bool has_omega = r.has("omega_c");
        const bool has_wavelength = r.has("wavelength");
        if (has_omega == has_wavelength)
            throw ConfigError("resonators.omega_c", "give exactly one of omega_c or wavelength");
        c.resonators.omega_c = has_omega ? r.quantity("omega_c", QuantityKind::Rate)
                                         : omega_from_wavelength(r.quantity("wavelength", QuantityKind::Length));
        if (r.has("Q1"))
            c.resonators.Q1 = r.quantity("Q1", QuantityKind::Dimensionless);
        if (r.has("Q2"))
            c.resonators.Q2 = r.quantity("Q2", QuantityKind::Dimensionless);
        auto loss = [&](const std::string &key, const std::optional<double> &q) {
            if (r.has(key))
                return r.quantity(key, QuantityKind::Rate);
            if (q) {
                if (!(*q > 0.0))
                    throw ConfigError(r.field(key == "C1" ? "Q1" : "Q2"), "must be positive");
                return c.resonators.omega_c / *q;
            }
            throw ConfigError(r.field(key), "missing required key");
        };
        c.resonators.C1 = loss("C1", c.resonators.Q1);
        c.resonators.C2 = loss("C2", c.resonators.Q2);
        if (r.has("gamma")) {
            if (r.has("gamma1") || r.has("gamma2"))
                throw ConfigError("resonators.gamma", "cannot be combined with gamma1/gamma2");
            c.resonators.gamma1 = c.resonators.gamma2 = r.quantity("gamma", QuantityKind::Rate);
        } else {
            c.resonators.gamma1 = r.quantity("gamma1", QuantityKind::Rate);
            c.resonators.gamma2 = r.quantity("gamma2", QuantityKind::Rate);
        }
        r.reject_unknown();
    }

    if (!root.has("gain"))
        throw ConfigError("gain", "missing required key");
    {
        Reader g(doc.at("gain"), "gain");
        if (g.has("g") || g.has("r") || g.has("Gamma_atom")) {
            MicroscopicGain m;
            m.g = g.quantity("g", QuantityKind::Rate);
            m.r = g.quantity("r", QuantityKind::Rate);
            m.gamma_atom = g.quantity("Gamma_atom", QuantityKind::Rate);
            if (!(m.gamma_atom > 0.0))
                throw ConfigError("gain.Gamma_atom", "must be positive");
            const auto ab = gain_coefficients(m.g, m.r, m.gamma_atom);
            c.gain.A = g.has("A") ? g.quantity("A", QuantityKind::Rate) : ab.A;
            c.gain.B = g.has("B") ? g.quantity("B", QuantityKind::Rate) : ab.B;
            c.gain.microscopic = m;
        } else {
            c.gain.A = g.quantity("A", QuantityKind::Rate);
            const bool has_b = g.has("B");
            const bool has_sat = g.has("A_sat_sq");
            if (has_b == has_sat)
                throw ConfigError("gain.B", "give exactly one of B or A_sat_sq");
            c.gain.B = has_b ? g.quantity("B", QuantityKind::Rate)
                             : saturation_from_maxwell_bloch(c.gain.A, g.quantity("A_sat_sq", QuantityKind::Dimensionless));
        }
        g.reject_unknown();
    }

    c.kappa = root.quantity("kappa", QuantityKind::Rate);

    if (!root.has("drive"))
        throw ConfigError("drive", "missing required key");
    {
        Reader d(doc.at("drive"), "drive");
        if (d.has("port")) {
            const json &p = doc.at("drive").at("port");
            if (p == 1 || p == "1")
                c.drive.port = Port::One;
            else if (p == 4 || p == "4")
                c.drive.port = Port::Four;
            else
                throw ConfigError("drive.port", "must be 1 or 4");
        }
        const bool has_power = d.has("power");
        const bool has_wavelength = d.has("wavelength");
        if (has_power != has_wavelength)
            throw ConfigError(has_power ? "drive.wavelength" : "drive.power", "power and wavelength go together");
        if (has_power) {
            OpticalDrive o;
            o.power = d.quantity("power", QuantityKind::Power);
            o.wavelength = d.quantity("wavelength", QuantityKind::Length);
            if (o.power < 0.0)
                throw ConfigError("drive.power", "must be non-negative");
            if (!(o.wavelength > 0.0))
                throw ConfigError("drive.wavelength", "must be positive");
            c.drive.optical = o;
            c.drive.epsilon =
                epsilon_from_power(o.power, o.wavelength, drive_side_coupling(c.resonators, c.drive.port));
            if (d.has("epsilon"))
                c.drive.epsilon = d.quantity("epsilon", QuantityKind::Rate);
        } else {
            c.drive.epsilon = d.quantity("epsilon", QuantityKind::Rate);
        }
        const bool has_omega = d.has("omega");
        const bool has_detuning = d.has("detuning");
        if (has_omega && has_detuning)
            throw ConfigError("drive.omega", "give at most one of omega or detuning");
        c.drive.omega_l = has_omega ? d.quantity("omega", QuantityKind::Rate)
                                    : c.resonators.omega_c + d.quantity_or("detuning", QuantityKind::Rate, 0.0);
        d.reject_unknown();
    }

    root.reject_unknown();
    validate(c);
    return c;
}

SystemConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<file>", "cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("<file>", std::string("invalid JSON in '") + path + "': " + e.what());
    }
    return config_from_json(doc);
}

nlohmann::ordered_json config_to_json(const SystemConfig &c)
{
    nlohmann::ordered_json out;
    auto &r = out["resonators"];
    r["omega_c"] = c.resonators.omega_c;
    r["C1"] = c.resonators.C1;
    r["C2"] = c.resonators.C2;
    if (c.resonators.Q1)
        r["Q1"] = *c.resonators.Q1;
    if (c.resonators.Q2)
        r["Q2"] = *c.resonators.Q2;
    r["gamma1"] = c.resonators.gamma1;
    r["gamma2"] = c.resonators.gamma2;

    auto &g = out["gain"];
    g["A"] = c.gain.A;
    g["B"] = c.gain.B;
    if (c.gain.microscopic) {
        g["g"] = c.gain.microscopic->g;
        g["r"] = c.gain.microscopic->r;
        g["Gamma_atom"] = c.gain.microscopic->gamma_atom;
    }

    out["kappa"] = c.kappa;

    auto &d = out["drive"];
    d["port"] = c.drive.port == Port::One ? 1 : 4;
    if (c.drive.optical) {
        d["power"] = c.drive.optical->power;
        d["wavelength"] = c.drive.optical->wavelength;
    }
    d["epsilon"] = c.drive.epsilon;
    d["omega"] = c.drive.omega_l;
    return out;
}

std::string emit_config(const SystemConfig &config)
{
    return config_to_json(config).dump(2) + "\n";
}

} // namespace ptring
