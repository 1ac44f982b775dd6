#include "ptring/runner.hpp"

#include "ptring/dynamics.hpp"
#include "ptring/parallel.hpp"
#include "ptring/quantum.hpp"
#include "ptring/spectral.hpp"
#include "ptring/steady.hpp"
#include "ptring/transmission.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#ifndef PTRING_PRESET_DIR
#define PTRING_PRESET_DIR "data/presets"
#endif

namespace ptring::cli
{

using nlohmann::json;

namespace
{
constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split(const std::string &text, char sep)
{
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, sep))
        parts.push_back(part);
    if (!text.empty() && text.back() == sep)
        parts.emplace_back();
    return parts;
}
} // namespace

Command command_from_string(const std::string &name)
{
    static const std::map<std::string, Command> table{
        {"steady", Command::Steady},     {"eigen", Command::Eigen},       {"ep", Command::Ep},
        {"spectrum", Command::Spectrum}, {"dynamics", Command::Dynamics}, {"quantum", Command::Quantum},
        {"figure", Command::Figure}};
    const auto it = table.find(name);
    if (it == table.end())
        throw ConfigError("command", "unknown command '" + name + "'");
    return it->second;
}

const char *to_string(Command command)
{
    switch (command) {
    case Command::Steady:
        return "steady";
    case Command::Eigen:
        return "eigen";
    case Command::Ep:
        return "ep";
    case Command::Spectrum:
        return "spectrum";
    case Command::Dynamics:
        return "dynamics";
    case Command::Quantum:
        return "quantum";
    case Command::Figure:
        return "figure";
    }
    return "unknown";
}

Format format_from_string(const std::string &name)
{
    if (name == "csv")
        return Format::Csv;
    if (name == "json")
        return Format::Json;
    throw ConfigError("format", "expected csv or json, got '" + name + "'");
}

bool is_parameter(const std::string &name)
{
    static const std::set<std::string> names{"omega_c", "C1",      "C2",    "gamma1",   "gamma2",
                                             "gamma",   "A",       "B",     "kappa",    "epsilon",
                                             "power",   "detuning", "omega", "port"};
    return names.count(name) > 0;
}

QuantityKind parameter_kind(const std::string &name)
{
    if (!is_parameter(name))
        throw ConfigError(name, "unknown sweep parameter");
    if (name == "power")
        return QuantityKind::Power;
    if (name == "port")
        return QuantityKind::Dimensionless;
    return QuantityKind::Rate;
}

void apply_parameter(SystemConfig &c, const std::string &name, double value)
{
    auto &r = c.resonators;
    if (name == "omega_c") {
        const double detuning = c.drive.omega_l - r.omega_c;
        r.omega_c = value;
        c.drive.omega_l = value + detuning;
        if (r.Q1)
            r.C1 = value / *r.Q1;
        if (r.Q2)
            r.C2 = value / *r.Q2;
    } else if (name == "C1") {
        r.C1 = value;
        r.Q1.reset();
    } else if (name == "C2") {
        r.C2 = value;
        r.Q2.reset();
    } else if (name == "gamma1") {
        r.gamma1 = value;
    } else if (name == "gamma2") {
        r.gamma2 = value;
    } else if (name == "gamma") {
        r.gamma1 = r.gamma2 = value;
    } else if (name == "A") {
        c.gain.A = value;
        c.gain.microscopic.reset();
    } else if (name == "B") {
        c.gain.B = value;
        c.gain.microscopic.reset();
    } else if (name == "kappa") {
        c.kappa = value;
    } else if (name == "epsilon") {
        c.drive.epsilon = value;
        c.drive.optical.reset();
    } else if (name == "power") {
        if (!c.drive.optical)
            throw ConfigError("drive.power", "setting the power needs drive.wavelength in the configuration");
        c.drive.optical->power = value;
    } else if (name == "detuning") {
        c.drive.omega_l = r.omega_c + value;
    } else if (name == "omega") {
        c.drive.omega_l = value;
    } else if (name == "port") {
        if (value == 1.0)
            c.drive.port = Port::One;
        else if (value == 4.0)
            c.drive.port = Port::Four;
        else
            throw ConfigError("drive.port", "must be 1 or 4");
    } else {
        throw ConfigError(name, "unknown sweep parameter");
    }
    c = with_drive_port(c, c.drive.port);
}

std::vector<double> SweepAxis::values() const
{
    std::vector<double> v;
    if (count == 1) {
        v.push_back(min);
        return v;
    }
    for (int k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) / (count - 1);
        if (k == count - 1)
            v.push_back(max);
        else if (log)
            v.push_back(min * std::pow(max / min, t));
        else
            v.push_back(min + (max - min) * t);
    }
    return v;
}

SweepAxis parse_sweep_axis(const std::string &text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 5)
        throw ConfigError("sweep", "expected name:min:max:count:lin|log, got '" + text + "'");
    SweepAxis axis;
    axis.name = parts[0];
    const QuantityKind kind = parameter_kind(axis.name);
    const std::string where = "sweep." + axis.name;
    axis.min = parse_quantity(parts[1], kind, where + ".min");
    axis.max = parse_quantity(parts[2], kind, where + ".max");
    try {
        std::size_t used = 0;
        axis.count = std::stoi(parts[3], &used);
        if (used != parts[3].size())
            throw std::invalid_argument("trailing characters");
    } catch (const std::exception &) {
        throw ConfigError(where + ".count", "not an integer: '" + parts[3] + "'");
    }
    if (axis.count < 1)
        throw ConfigError(where + ".count", "must be at least 1");
    if (parts[4] == "log")
        axis.log = true;
    else if (parts[4] != "lin")
        throw ConfigError(where + ".spacing", "expected lin or log");
    if (axis.log && axis.count > 1 && !(axis.min > 0.0 && axis.max > 0.0))
        throw ConfigError(where, "log spacing needs positive bounds");
    if (axis.count > 1 && !(axis.max > axis.min))
        throw ConfigError(where, "max must exceed min");
    return axis;
}

namespace
{

using Values = std::map<std::string, Cell>;

struct PointResult
{
    std::vector<Values> rows;
    std::string error;
};

double option_number(const json &options, const std::string &key, QuantityKind kind, double fallback)
{
    if (!options.contains(key))
        return fallback;
    return parse_quantity(options.at(key), kind, "options." + key);
}

Port option_port(const json &options, const SystemConfig &config)
{
    if (!options.contains("direction"))
        return config.drive.port;
    const auto &d = options.at("direction");
    if (d == 1 || d == "1" || d == "1->4" || d == "forward")
        return Port::One;
    if (d == 4 || d == "4" || d == "4->1" || d == "backward")
        return Port::Four;
    throw ConfigError("options.direction", "expected 1->4 or 4->1");
}

bool wants(const std::set<std::string> &columns, const std::string &key)
{
    return columns.count(key) > 0;
}

void append_error(std::string &error, const std::string &message)
{
    if (!error.empty())
        error += "; ";
    error += message;
}

PointResult eval_steady(const SystemConfig &config, const json &options, const std::set<std::string> &columns)
{
    PointResult out;
    Values v;
    const Port port = option_port(options, config);
    const double omega = config.drive.omega_l;
    try {
        const auto sol = steady_state(config, omega, port);
        v["I1"] = sol.I1;
        v["I2"] = sol.I2;
        v["phi1"] = sol.phi1;
        v["re_A1"] = sol.A1.real();
        v["im_A1"] = sol.A1.imag();
        v["re_A2"] = sol.A2.real();
        v["im_A2"] = sol.A2.imag();
        v["n_real_roots"] = static_cast<long long>(sol.n_real_roots);
        v["stable"] = static_cast<long long>(sol.primary_stable ? 1 : 0);
        v["residual"] = sol.residual;
    } catch (const std::exception &e) {
        append_error(out.error, e.what());
    }
    for (const auto &[p, tag] : {std::pair{Port::One, std::string("forward")}, std::pair{Port::Four, std::string("backward")}}) {
        if (!wants(columns, "I1_" + tag) && !wants(columns, "I2_" + tag))
            continue;
        try {
            const auto sol = steady_state(config, omega, p);
            v["I1_" + tag] = sol.I1;
            v["I2_" + tag] = sol.I2;
        } catch (const std::exception &e) {
            append_error(out.error, tag + ": " + e.what());
        }
    }
    out.rows.push_back(std::move(v));
    return out;
}

PointResult eval_eigen(const SystemConfig &config, const json &options)
{
    PointResult out;
    Values v;
    const std::string source = options.value("intensity", std::string("steady"));
    double I1 = 0.0;
    if (source == "steady") {
        I1 = steady_state(config, config.drive.omega_l, option_port(options, config)).I1;
    } else if (source != "zero") {
        throw ConfigError("options.intensity", "expected steady or zero");
    }
    // Shifts relative to omega_c, computed without the large carrier.
    SystemConfig shifted = config;
    shifted.drive.omega_l -= shifted.resonators.omega_c;
    shifted.resonators.omega_c = 0.0;
    const auto s = eigenfrequencies(shifted, I1);
    v["I1"] = I1;
    v["re_omega_plus"] = s.omega_plus.real();
    v["im_omega_plus"] = s.omega_plus.imag();
    v["re_omega_minus"] = s.omega_minus.real();
    v["im_omega_minus"] = s.omega_minus.imag();
    v["discriminant"] = s.discriminant;
    v["phase"] = std::string(to_string(s.phase));
    out.rows.push_back(std::move(v));
    return out;
}

PointResult eval_ep(const SystemConfig &config, const json &options)
{
    PointResult out;
    Values v;
    const Port port = option_port(options, config);
    const std::string mode = options.value("mode", std::string("both"));
    if (mode != "linear" && mode != "self_consistent" && mode != "both")
        throw ConfigError("options.mode", "expected linear, self_consistent or both");
    v["kappa_ep_linear"] = find_ep(config, port, EpMode::Linear).kappa_ep;
    if (mode != "linear") {
        EpSearchOptions o;
        o.kappa_min = option_number(options, "kappa_min", QuantityKind::Rate, 0.0);
        o.kappa_max = option_number(options, "kappa_max", QuantityKind::Rate, 0.0);
        o.samples = options.value("samples", o.samples);
        const auto r = find_ep(config, port, EpMode::SelfConsistent, o);
        v["kappa_ep"] = r.found ? r.kappa_ep : nan_value;
        v["n_crossings"] = static_cast<long long>(r.crossings.size());
        v["I1_at_ep"] = r.found ? r.I1_at_ep : nan_value;
        std::string list;
        for (double k : r.crossings)
            list += (list.empty() ? "" : ";") + fmt::format("{:.16e}", k);
        v["crossings"] = list;
        if (!r.found)
            out.error = "no exceptional point in the search bracket";
    }
    out.rows.push_back(std::move(v));
    return out;
}

PointResult eval_spectrum(const SystemConfig &config, const std::set<std::string> &columns)
{
    PointResult out;
    Values v;
    const double omega = config.drive.omega_l;
    auto attempt = [&](const char *key, auto fn) {
        const std::string k(key);
        if (!wants(columns, k) && !wants(columns, k + "_norm"))
            return;
        try {
            v[k] = fn();
        } catch (const std::exception &e) {
            v[k] = nan_value;
            append_error(out.error, k + ": " + e.what());
        }
    };
    attempt("T_forward", [&] { return t_forward(config, omega); });
    attempt("T_backward", [&] { return t_backward(config, omega).T; });
    attempt("T_through", [&] { return t_through(config, omega); });
    out.rows.push_back(std::move(v));
    return out;
}

Complex option_complex(const json &options, const std::string &key)
{
    if (!options.contains(key))
        return 0.0;
    const auto &a = options.at(key);
    if (a.is_number())
        return a.get<double>();
    if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number())
        return {a[0].get<double>(), a[1].get<double>()};
    throw ConfigError("options." + key, "expected a number or [re, im]");
}

PointResult eval_dynamics(const SystemConfig &config, const json &options)
{
    PointResult out;
    const Port port = option_port(options, config);
    const double omega = config.drive.omega_l;

    double I_steady = nan_value;
    double decay = 0.0;
    try {
        const auto sol = steady_state(config, omega, port);
        I_steady = sol.I1;
        decay = -stability_of_root(config, omega, port, sol.I1).max_real_part;
    } catch (const std::exception &) {
    }
    const double rate = rate_scale(config, omega, std::isfinite(I_steady) ? I_steady : 0.0);
    const double slow = decay > 0.0 ? decay : rate * 1e-4;

    IntegratorConfig ic;
    ic.rel_tol = options.value("rel_tol", 1e-10);
    ic.abs_tol = options.value("abs_tol", 1e-12);
    ic.max_time = option_number(options, "max_time", QuantityKind::Dimensionless, 60.0 / slow);
    ic.convergence_window = option_number(options, "window", QuantityKind::Dimensionless, 5.0 / slow);
    ic.convergence_eps = options.value("convergence_eps", 1e-11);
    ic.sample_interval = option_number(options, "sample_interval", QuantityKind::Dimensionless, 0.0);

    TrajectoryState initial;
    initial.A1 = option_complex(options, "A1");
    initial.A2 = option_complex(options, "A2");
    const std::string frame = options.value("frame", std::string("rotating"));
    if (frame == "lab")
        initial.frame = Frame::Lab;
    else if (frame != "rotating")
        throw ConfigError("options.frame", "expected rotating or lab");

    const auto traj = integrate(initial, config, ic, port);
    if (options.value("trajectory", false)) {
        for (const auto &s : traj.samples) {
            Values v;
            v["t"] = s.t;
            v["re_A1"] = s.A1.real();
            v["im_A1"] = s.A1.imag();
            v["re_A2"] = s.A2.real();
            v["im_A2"] = s.A2.imag();
            v["I1"] = std::norm(s.A1);
            v["I2"] = std::norm(s.A2);
            out.rows.push_back(std::move(v));
        }
        return out;
    }
    Values v;
    const auto &s = traj.terminal;
    v["t_final"] = s.t;
    v["I1"] = std::norm(s.A1);
    v["I2"] = std::norm(s.A2);
    v["re_A1"] = s.A1.real();
    v["im_A1"] = s.A1.imag();
    v["re_A2"] = s.A2.real();
    v["im_A2"] = s.A2.imag();
    v["converged"] = static_cast<long long>(traj.termination == Termination::Converged ? 1 : 0);
    v["oscillating"] = static_cast<long long>(traj.oscillating ? 1 : 0);
    v["I1_steady"] = I_steady;
    v["rel_diff"] = std::isfinite(I_steady) && I_steady > 0.0 ? std::abs(std::norm(s.A1) - I_steady) / I_steady : nan_value;
    out.rows.push_back(std::move(v));
    return out;
}

PointResult eval_quantum(const SystemConfig &config, const json &options)
{
    PointResult out;
    using namespace ptring::quantum;
    FockBasis basis = default_basis(config);
    basis.n_max1 = options.value("cutoff1", basis.n_max1);
    basis.n_max2 = options.value("cutoff2", basis.n_max2);
    const std::string form_name = options.value("form", std::string("lindblad"));
    MasterEquationForm form;
    if (form_name == "lindblad")
        form = MasterEquationForm::Lindblad;
    else if (form_name == "non_lindbladian")
        form = MasterEquationForm::NonLindbladian;
    else
        throw ConfigError("options.form", "expected lindblad or non_lindbladian");

    const Generator gen(config, basis, form);
    const auto d = derive(config);
    const double net = std::min(d.Gamma2, d.Gamma1 - config.gain.A);
    const double slow = net > 0.0 ? net : gen.rate_scale();
    const double t_final = option_number(options, "t_final", QuantityKind::Dimensionless, 30.0 / slow);
    const int samples = options.value("samples", 101);
    if (samples < 1)
        throw ConfigError("options.samples", "must be at least 1");

    EvolveConfig ec;
    for (int k = 0; k < samples; ++k)
        ec.sample_times.push_back(samples == 1 ? t_final : t_final * k / (samples - 1));
    const auto traj = evolve(vacuum(basis), gen, t_final, ec);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto &e = traj.values[k];
        Values v;
        v["t"] = traj.times[k];
        v["re_a1"] = e.a1.real();
        v["im_a1"] = e.a1.imag();
        v["re_a2"] = e.a2.real();
        v["im_a2"] = e.a2.imag();
        v["n1"] = e.n1;
        v["n2"] = e.n2;
        v["trace"] = e.trace;
        v["purity"] = e.purity;
        out.rows.push_back(std::move(v));
    }
    if (gen.warning())
        out.error = *gen.warning();
    if (traj.leakage_warning)
        append_error(out.error, fmt::format("top Fock layer population {:.3e}", traj.max_leakage));
    return out;
}

std::vector<std::string> default_columns(Command command, const json &options)
{
    switch (command) {
    case Command::Steady:
        return {"I1", "I2", "phi1", "re_A1", "im_A1", "re_A2", "im_A2", "n_real_roots", "stable", "residual"};
    case Command::Eigen:
        return {"I1", "re_omega_plus", "im_omega_plus", "re_omega_minus", "im_omega_minus", "discriminant", "phase"};
    case Command::Ep:
        return {"kappa_ep_linear", "kappa_ep", "n_crossings", "I1_at_ep", "crossings"};
    case Command::Spectrum:
        if (options.value("normalize", false))
            return {"T_forward", "T_backward", "T_through", "T_forward_norm", "T_backward_norm", "T_through_norm"};
        return {"T_forward", "T_backward", "T_through"};
    case Command::Dynamics:
        if (options.value("trajectory", false))
            return {"t", "re_A1", "im_A1", "re_A2", "im_A2", "I1", "I2"};
        return {"t_final", "I1", "I2", "re_A1", "im_A1", "re_A2", "im_A2", "converged", "oscillating", "I1_steady",
                "rel_diff"};
    case Command::Quantum:
        return {"t", "re_a1", "im_a1", "re_a2", "im_a2", "n1", "n2", "trace", "purity"};
    case Command::Figure:
        break;
    }
    throw ConfigError("command", "figure must be resolved to a preset before running");
}

std::string sanitize(std::string s)
{
    for (char &c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"')
            c = c == ',' ? ';' : ' ';
    return s;
}

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.16e}", x);
}

} // namespace

Table run(const RunSpec &spec)
{
    if (spec.command == Command::Figure)
        throw ConfigError("command", "figure must be resolved to a preset before running");
    validate(spec.config);

    std::vector<std::string> value_columns = spec.columns;
    const bool explicit_columns = !value_columns.empty();
    if (!explicit_columns)
        value_columns = default_columns(spec.command, spec.options);

    std::vector<std::vector<double>> grids;
    for (const auto &axis : spec.sweeps)
        grids.push_back(axis.values());
    std::size_t grid_size = 1;
    for (const auto &g : grids)
        grid_size *= g.size();
    const std::vector<Series> series = spec.series.empty() ? std::vector<Series>{Series{}} : spec.series;
    const bool labelled = !spec.series.empty();

    Table table;
    if (explicit_columns) {
        table.columns = value_columns;
    } else {
        if (labelled)
            table.columns.push_back("series");
        for (const auto &axis : spec.sweeps)
            table.columns.push_back(axis.name);
        table.columns.insert(table.columns.end(), value_columns.begin(), value_columns.end());
    }
    table.columns.push_back("error");
    const std::set<std::string> wanted(table.columns.begin(), table.columns.end());

    struct Point
    {
        std::size_t series;
        std::vector<double> coords;
    };
    std::vector<Point> points;
    for (std::size_t s = 0; s < series.size(); ++s) {
        for (std::size_t flat = 0; flat < grid_size; ++flat) {
            Point p{s, std::vector<double>(grids.size())};
            std::size_t rem = flat;
            for (std::size_t a = grids.size(); a-- > 0;) {
                p.coords[a] = grids[a][rem % grids[a].size()];
                rem /= grids[a].size();
            }
            points.push_back(std::move(p));
        }
    }

    auto evaluate = [&](std::size_t k) {
        const Point &p = points[k];
        PointResult result;
        try {
            SystemConfig config = spec.config;
            const auto &set = series[p.series].set;
            for (auto it = set.begin(); it != set.end(); ++it)
                apply_parameter(config, it.key(),
                                parse_quantity(it.value(), parameter_kind(it.key()), "series." + it.key()));
            for (std::size_t a = 0; a < spec.sweeps.size(); ++a)
                apply_parameter(config, spec.sweeps[a].name, p.coords[a]);
            validate(config);
            switch (spec.command) {
            case Command::Steady:
                result = eval_steady(config, spec.options, wanted);
                break;
            case Command::Eigen:
                result = eval_eigen(config, spec.options);
                break;
            case Command::Ep:
                result = eval_ep(config, spec.options);
                break;
            case Command::Spectrum:
                result = eval_spectrum(config, wanted);
                break;
            case Command::Dynamics:
                result = eval_dynamics(config, spec.options);
                break;
            case Command::Quantum:
                result = eval_quantum(config, spec.options);
                break;
            case Command::Figure:
                break;
            }
        } catch (const std::exception &e) {
            result.rows.clear();
            result.error = e.what();
        }
        if (result.rows.empty())
            result.rows.emplace_back();
        return result;
    };
    const auto results = parallel_map(points.size(), evaluate, spec.threads);

    // Max-normalisation over the detuning axis within each group of the
    // remaining coordinates.
    std::map<std::pair<std::size_t, std::vector<double>>, std::map<std::string, double>> peaks;
    std::size_t detuning_axis = spec.sweeps.size();
    for (std::size_t a = 0; a < spec.sweeps.size(); ++a)
        if (spec.sweeps[a].name == "detuning")
            detuning_axis = a;
    auto group_of = [&](const Point &p) {
        std::vector<double> key = p.coords;
        if (detuning_axis < key.size())
            key.erase(key.begin() + static_cast<std::ptrdiff_t>(detuning_axis));
        return std::pair{p.series, key};
    };
    for (std::size_t k = 0; k < points.size(); ++k) {
        auto &peak = peaks[group_of(points[k])];
        for (const auto &row : results[k].rows)
            for (const auto &[key, cell] : row)
                if (const double *x = std::get_if<double>(&cell); x && std::isfinite(*x))
                    peak[key] = std::max(peak.count(key) ? peak[key] : 0.0, *x);
    }

    table.points = points.size();
    for (std::size_t k = 0; k < points.size(); ++k) {
        const Point &p = points[k];
        const PointResult &res = results[k];
        const bool failed = !res.error.empty() && res.rows.size() == 1 && res.rows.front().empty();
        if (failed)
            ++table.failed_points;
        for (const auto &row : res.rows) {
            std::vector<Cell> cells;
            for (const auto &col : table.columns) {
                if (col == "error") {
                    cells.emplace_back(res.error);
                } else if (col == "series") {
                    cells.emplace_back(series[p.series].label);
                } else if (auto axis = std::find_if(spec.sweeps.begin(), spec.sweeps.end(),
                                                    [&](const SweepAxis &s) { return s.name == col; });
                           axis != spec.sweeps.end()) {
                    cells.emplace_back(p.coords[static_cast<std::size_t>(axis - spec.sweeps.begin())]);
                } else if (auto it = row.find(col); it != row.end()) {
                    cells.push_back(it->second);
                } else if (col.size() > 5 && col.compare(col.size() - 5, 5, "_norm") == 0) {
                    const std::string base = col.substr(0, col.size() - 5);
                    const auto found = row.find(base);
                    const auto &peak = peaks[group_of(p)];
                    const auto pk = peak.find(base);
                    if (found != row.end() && std::holds_alternative<double>(found->second) && pk != peak.end() &&
                        pk->second > 0.0)
                        cells.emplace_back(std::get<double>(found->second) / pk->second);
                    else
                        cells.emplace_back(nan_value);
                } else {
                    cells.emplace_back(nan_value);
                }
            }
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

std::string to_csv(const Table &table)
{
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out += (c ? "," : "") + table.columns[c];
    out += '\n';
    for (const auto &row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += ',';
            std::visit(
                [&](const auto &x) {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, double>)
                        out += format_double(x);
                    else if constexpr (std::is_same_v<T, long long>)
                        out += std::to_string(x);
                    else
                        out += sanitize(x);
                },
                row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table &table)
{
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto &row : table.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::visit(
                [&](const auto &x) {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, double>) {
                        if (std::isfinite(x))
                            obj[table.columns[c]] = x;
                        else
                            obj[table.columns[c]] = nullptr;
                    } else {
                        obj[table.columns[c]] = x;
                    }
                },
                row[c]);
        }
        rows.push_back(std::move(obj));
    }
    nlohmann::ordered_json doc;
    doc["columns"] = table.columns;
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string default_preset_dir()
{
    if (const char *env = std::getenv("PTRING_PRESET_DIR"))
        return env;
    return PTRING_PRESET_DIR;
}

std::vector<std::string> list_presets(const std::string &dir)
{
    std::vector<std::string> names;
    if (!std::filesystem::is_directory(dir))
        return names;
    for (const auto &entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".json")
            names.push_back(entry.path().stem().string());
    std::sort(names.begin(), names.end());
    return names;
}

RunSpec spec_from_json(const json &doc)
{
    if (!doc.is_object())
        throw ConfigError("<preset>", "expected an object");
    static const std::set<std::string> known{"command", "config", "sweep", "options", "series", "columns", "description"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError(it.key(), "unknown key");
    if (!doc.contains("command") || !doc.contains("config"))
        throw ConfigError("<preset>", "command and config are required");
    RunSpec spec;
    spec.command = command_from_string(doc.at("command").get<std::string>());
    if (spec.command == Command::Figure)
        throw ConfigError("command", "a preset cannot refer to another figure");
    spec.config = config_from_json(doc.at("config"));
    if (doc.contains("sweep"))
        for (const auto &s : doc.at("sweep"))
            spec.sweeps.push_back(parse_sweep_axis(s.get<std::string>()));
    if (doc.contains("options"))
        spec.options = doc.at("options");
    if (doc.contains("series")) {
        for (const auto &s : doc.at("series")) {
            Series series;
            series.label = s.at("label").get<std::string>();
            if (s.contains("set"))
                series.set = s.at("set");
            for (auto it = series.set.begin(); it != series.set.end(); ++it)
                if (!is_parameter(it.key()))
                    throw ConfigError("series." + series.label + "." + it.key(), "unknown parameter");
            spec.series.push_back(std::move(series));
        }
    }
    if (doc.contains("columns"))
        spec.columns = doc.at("columns").get<std::vector<std::string>>();
    return spec;
}

RunSpec load_preset(const std::string &name, const std::string &dir)
{
    const auto path = std::filesystem::path(dir) / (name + ".json");
    std::ifstream in(path);
    if (!in)
        throw ConfigError("figure", "no preset named '" + name + "' in " + dir);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("figure", "invalid preset '" + name + "': " + e.what());
    }
    return spec_from_json(doc);
}

int execute(const RunSpec &spec)
{
    const Table table = run(spec);
    const std::string text = spec.format == Format::Csv ? to_csv(table) : to_json(table);
    if (spec.out_path.empty() || spec.out_path == "-") {
        std::cout << text;
        std::cout.flush();
    } else {
        std::ofstream out(spec.out_path, std::ios::binary);
        if (!out)
            throw ConfigError("out", "cannot write '" + spec.out_path + "'");
        out << text;
    }
    if (table.failed_points > 0)
        std::cerr << fmt::format("{} of {} points failed\n", table.failed_points, table.points);
    return table.points > 0 && table.failed_points == table.points ? 1 : 0;
}

} // namespace ptring::cli
