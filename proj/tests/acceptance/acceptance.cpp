#include "oracles.hpp"

#include "ptring/cubic.hpp"
#include "ptring/dynamics.hpp"
#include "ptring/quantum.hpp"
#include "ptring/runner.hpp"
#include "ptring/spectral.hpp"
#include "ptring/steady.hpp"
#include "ptring/transmission.hpp"

#include <fmt/core.h>

#include <chrono>
#include <functional>
#include <map>
#include <sstream>

using namespace ptring;
using oracle::GHz;
using oracle::MHz;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

struct Criterion
{
    int id;
    std::string name;
    double time_limit; // seconds, zero when unbounded
    std::function<Outcome()> check;
};

// Strongly pumped active ring balanced against the passive one (A = C1 + C2).
SystemConfig fig3_config(double B, double epsilon)
{
    SystemConfig c;
    c.resonators.omega_c = 0.0;
    c.resonators.C1 = 300 * MHz;
    c.resonators.C2 = 1 * MHz;
    c.resonators.gamma1 = c.resonators.gamma2 = 1.15 * MHz;
    c.gain.A = 301 * MHz;
    c.gain.B = B;
    c.kappa = 0.5 * MHz;
    c.drive.epsilon = epsilon;
    return c;
}

SystemConfig quantum_config()
{
    SystemConfig c;
    c.resonators.omega_c = 0.0;
    c.resonators.C1 = c.resonators.gamma1 = 1 * MHz;
    c.resonators.C2 = c.resonators.gamma2 = 1 * MHz;
    c.gain.A = 0.2 * MHz;
    c.gain.B = 10.0;
    c.kappa = 0.5 * MHz;
    c.drive.epsilon = 0.3 * MHz;
    c.drive.omega_l = 0.2 * MHz;
    return c;
}

Outcome linear_ep()
{
    const auto r = find_ep(fig3_config(0.0, 1 * MHz), Port::One, EpMode::Linear);
    const double rel = std::abs(r.kappa_ep - 0.5 * MHz) / (0.5 * MHz);
    return {r.found && rel <= 1e-9, fmt::format("kappa_EP = {:.12g} MHz, rel err {:.2e}", r.kappa_ep / MHz, rel)};
}

Outcome eigen_closed_form()
{
    oracle::RandomConfigs gen(101);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        SystemConfig c = gen.linear();
        c.resonators.omega_c = 0.0;
        c.gain.B = gen.log_uniform(1e-3, 1.0);
        const double I1 = gen.log_uniform(1.0, 1e7);
        const auto s = eigenfrequencies(c, I1);
        const auto [p, m] = oracle::eigen_shifts(c, I1);
        const double scale = std::max({std::abs(p), std::abs(m), c.kappa});
        worst = std::max({worst, std::abs(s.omega_plus - p) / scale, std::abs(s.omega_minus - m) / scale});
    }
    return {worst <= 1e-10, fmt::format("10000 sets, worst rel err {:.2e}", worst)};
}

Outcome plateau()
{
    const double gamma = 1.15 * MHz;
    SystemConfig c = fig3_config(0.0, 1 * MHz);
    c.resonators.gamma1 = c.resonators.gamma2 = gamma;
    const double kappa_ep = find_ep(c, Port::One, EpMode::Linear).kappa_ep;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        c.kappa = kappa_ep * (1.0 + 1e-6) * std::pow(1e3, k / 999.0);
        const auto s = eigenfrequencies(c, 0.0);
        worst = std::max({worst, std::abs(s.omega_plus.imag() + gamma / 2) / (gamma / 2),
                          std::abs(s.omega_minus.imag() + gamma / 2) / (gamma / 2)});
    }
    return {worst <= 1e-12, fmt::format("1000 kappa in (kappa_EP, 1000 kappa_EP], worst rel err {:.2e}", worst)};
}

Outcome reciprocity()
{
    oracle::RandomConfigs gen(103);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const SystemConfig c = gen.linear();
        const double T14 = t_forward(c, c.drive.omega_l);
        const double T41 = t_backward(c, c.drive.omega_l).T;
        const double peak = std::max(T14, T41);
        if (peak > 0)
            worst = std::max(worst, std::abs(T14 - T41) / peak);
    }
    return {worst < 1e-12, fmt::format("1000 points, worst |T14 - T41| / T = {:.2e}", worst)};
}

Outcome nonreciprocity()
{
    SystemConfig c = fig3_config(0.05, 25 * GHz);
    const auto ep_backward = find_ep(c, Port::Four, EpMode::SelfConsistent);
    if (!ep_backward.found)
        return {false, "no backward exceptional point"};
    const auto ratio_at = [&](double kappa) {
        c.kappa = kappa;
        return steady_state(c, 0.0, Port::Four).I1 / steady_state(c, 0.0, Port::One).I2;
    };
    const double ratio = ratio_at(0.1 * ep_backward.kappa_ep);
    const double kappa_linear = find_ep(c, Port::One, EpMode::Linear).kappa_ep;
    const double ratio_linear = ratio_at(0.1 * kappa_linear);
    return {ratio > 100.0, fmt::format("I1(4->1)/I2(1->4) = {:.4g} at 0.1 x {:.4g} MHz (backward EP); "
                                       "{:.4g} at 0.1 x linear EP",
                                       ratio, ep_backward.kappa_ep / MHz, ratio_linear)};
}

Outcome ep_ordering()
{
    const auto weak = find_ep(fig3_config(0.05, 1e-3 * MHz), Port::One, EpMode::SelfConsistent);
    const auto mid = find_ep(fig3_config(0.05, 2 * GHz), Port::One, EpMode::SelfConsistent);
    const auto strong = find_ep(fig3_config(0.05, 25 * GHz), Port::One, EpMode::SelfConsistent);
    const bool ok = weak.found && mid.found && strong.found && mid.kappa_ep < 0.5 * MHz &&
                    strong.kappa_ep > 0.5 * MHz && std::abs(weak.kappa_ep - 0.5 * MHz) < 1e-3 * MHz;
    return {ok, fmt::format("kappa_EP = {:.6g} / {:.6g} / {:.6g} MHz at eps -> 0 / 2 GHz / 25 GHz",
                            weak.kappa_ep / MHz, mid.kappa_ep / MHz, strong.kappa_ep / MHz)};
}

Outcome ode_vs_cubic()
{
    oracle::RandomConfigs gen(107);
    int tested = 0, skipped_slow = 0;
    double worst = 0.0;
    while (tested < 100) {
        SystemConfig c = gen.linear();
        c.resonators.omega_c = 0.0;
        c.drive.omega_l = gen.uniform(-5, 5) * MHz;
        c.gain.B = gen.log_uniform(1e-3, 1.0);
        const auto roots = solve_intensity(cubic_coeffs(c, c.drive.omega_l, Port::One));
        if (roots.roots.size() != 1)
            continue;
        const auto st = stability_of_root(c, c.drive.omega_l, Port::One, roots.roots[0]);
        if (st.verdict != Stability::Stable)
            continue;
        // Nearly marginal roots relax over thousands of cavity lifetimes.
        const double decay = -st.max_real_part;
        if (decay < 1e-3 * rate_scale(c, c.drive.omega_l, roots.roots[0])) {
            ++skipped_slow;
            continue;
        }
        IntegratorConfig ic;
        ic.rel_tol = 1e-10;
        ic.abs_tol = 1e-13;
        ic.max_time = 80 / decay;
        ic.convergence_window = 5 / decay;
        ic.convergence_eps = 1e-12;
        const auto traj = integrate({}, c, ic, Port::One);
        worst = std::max(worst, std::abs(std::norm(traj.terminal.A1) - roots.roots[0]) / roots.roots[0]);
        ++tested;
    }
    return {worst <= 1e-6,
            fmt::format("100 configs ({} near-marginal skipped), worst rel err {:.2e}", skipped_slow, worst)};
}

Outcome closed_form_root()
{
    oracle::RandomConfigs gen(109);
    int tested = 0;
    double worst = 0.0, worst_residual = 0.0;
    while (tested < 10000) {
        SystemConfig c = gen.linear();
        c.gain.B = gen.log_uniform(1e-4, 10.0);
        c.drive.epsilon = gen.log_uniform(1e-3, 1e5) * MHz;
        const auto p = cubic_coeffs(c, c.drive.omega_l, gen.uniform(0, 1) < 0.5 ? Port::One : Port::Four)
                           .polynomial();
        if (cubic::discriminant_sign(p) != cubic::DiscriminantSign::Negative)
            continue;
        const double x = cubic::closed_form_real_root(p);
        const auto ref = cubic::general_real_roots(p);
        if (ref.size() != 1)
            return {false, fmt::format("general solver found {} roots", ref.size())};
        worst = std::max(worst, std::abs(x - ref[0]) / std::abs(ref[0]));
        worst_residual = std::max(worst_residual, p.relative_residual(x));
        ++tested;
    }
    return {worst <= 1e-9 && worst_residual < 1e-10,
            fmt::format("10000 cubics, worst rel err {:.2e}, worst residual {:.2e}", worst, worst_residual)};
}

Outcome quantum_linear()
{
    using namespace quantum;
    const SystemConfig c = quantum_config();
    const FockBasis basis{12, 12};
    const Generator gen(c, basis, MasterEquationForm::Lindblad);
    EvolveConfig ec;
    ec.sample_times = {24e-6, 25e-6};
    const auto traj = evolve(vacuum(basis), gen, 25e-6, ec);
    SystemConfig linear = c;
    linear.gain.B = 0.0;
    const auto amps = oracle::linear_solve(linear, c.drive.omega_l, Port::One, 0.0);
    const auto &e = traj.values.back();
    const double err1 = std::abs(e.a1 - amps.A1) / std::abs(amps.A1);
    const double err2 = std::abs(e.a2 - amps.A2) / std::abs(amps.A2);

    // First-moment equations along a transient of the same system with
    // visible saturation.
    SystemConfig sat = c;
    sat.gain.B = 0.05 * MHz;
    const Generator nl(sat, basis, MasterEquationForm::NonLindbladian);
    EvolveConfig rc;
    for (int k = 0; k <= 100; ++k)
        rc.sample_times.push_back(k * 0.02e-6);
    rc.keep_states = true;
    const auto transient = evolve(vacuum(basis), nl, 2e-6, rc);
    const auto res = rate_equation_residual(transient, nl);

    const bool ok = e.n1 < 2.0 && c.gain.B / c.gain.A < 1e-4 && err1 <= 1e-2 && err2 <= 1e-2 &&
                    traj.max_trace_drift < 1e-8 && res.exact < 1e-6 && res.finite_difference < 1e-6;
    return {ok, fmt::format("<n1> = {:.3f}, <a1> err {:.2e}, <a2> err {:.2e}, trace drift {:.1e}, "
                            "rate residual {:.1e} (exact) / {:.1e} (finite diff)",
                            e.n1, err1, err2, traj.max_trace_drift, res.exact, res.finite_difference)};
}

double form_difference(double B)
{
    using namespace quantum;
    SystemConfig c = quantum_config();
    c.gain.A = 1 * MHz;
    c.gain.B = B;
    const FockBasis basis{12, 8};
    EvolveConfig ec;
    for (int k = 1; k <= 20; ++k)
        ec.sample_times.push_back(k * 0.5e-6);
    ec.keep_states = true;
    ec.rel_tol = 1e-11;
    ec.abs_tol = 1e-14;
    const auto a = evolve(vacuum(basis), Generator(c, basis, MasterEquationForm::NonLindbladian), 10e-6, ec);
    const auto b = evolve(vacuum(basis), Generator(c, basis, MasterEquationForm::Lindblad), 10e-6, ec);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        const Eigen::MatrixXcd diff = a.states[k] - b.states[k];
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
        worst = std::max(worst, solver.eigenvalues().cwiseAbs().sum());
    }
    return worst;
}

Outcome form_scaling()
{
    const double B = 0.02 * MHz;
    const double full = form_difference(B);
    const double half = form_difference(B / 2);
    const double ratio = full / half;
    return {std::abs(ratio - 4.0) <= 0.8,
            fmt::format("trace-norm difference {:.3e} at B, {:.3e} at B/2, ratio {:.3f}", full, half, ratio)};
}

Outcome through_cross_check()
{
    oracle::RandomConfigs gen(113);
    double worst = 0.0;
    int near_zero = 0;
    for (int k = 0; k < 1000; ++k) {
        SystemConfig c = gen.linear();
        c.gain.B = gen.log_uniform(1e-3, 1.0);
        const double omega = c.drive.omega_l;
        const double T = t_through(c, omega);
        const double ref = t_through_input_output(c, omega);
        if (ref < 1e-12) {
            ++near_zero;
            worst = std::max(worst, std::abs(T - ref));
            continue;
        }
        worst = std::max(worst, std::abs(T - ref) / ref);
    }
    return {worst <= 1e-9, fmt::format("1000 configs ({} with T < 1e-12 compared absolutely), worst rel err {:.2e}",
                                       near_zero, worst)};
}

struct Csv
{
    std::vector<std::string> header;
    std::vector<std::map<std::string, std::string>> rows;
};

Csv parse_table_csv(const std::string &text)
{
    Csv csv;
    std::istringstream in(text);
    std::string line;
    auto split = [](const std::string &l) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(l);
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (!l.empty() && l.back() == ',')
            cells.emplace_back();
        return cells;
    };
    if (!std::getline(in, line))
        throw std::runtime_error("empty output");
    csv.header = split(line);
    while (std::getline(in, line)) {
        const auto cells = split(line);
        if (cells.size() != csv.header.size())
            throw std::runtime_error("ragged row: " + line);
        std::map<std::string, std::string> row;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const auto &name = csv.header[k];
            if (name != "series" && name != "error" && name != "crossings" && name != "phase") {
                std::size_t used = 0;
                std::stod(cells[k], &used);
                if (used != cells[k].size())
                    throw std::runtime_error("non-numeric cell '" + cells[k] + "' in column " + name);
            }
            row[name] = cells[k];
        }
        csv.rows.push_back(row);
    }
    return csv;
}

double value(const std::map<std::string, std::string> &row, const std::string &col)
{
    return std::stod(row.at(col));
}

// Half-maximum width by linear interpolation around the global peak.
double half_width(const std::vector<std::pair<double, double>> &curve)
{
    std::size_t peak = 0;
    for (std::size_t k = 1; k < curve.size(); ++k)
        if (curve[k].second > curve[peak].second)
            peak = k;
    const double half = curve[peak].second / 2;
    auto crossing = [&](int step) {
        for (std::size_t k = peak; k < curve.size() && k + step < curve.size(); k += step) {
            const auto &a = curve[k];
            const auto &b = curve[k + step];
            if (b.second <= half)
                return a.first + (half - a.second) * (b.first - a.first) / (b.second - a.second);
        }
        throw std::runtime_error("half maximum not reached");
    };
    return crossing(1) - crossing(-1);
}

Outcome presets()
{
    std::string failures;
    std::map<std::string, Csv> tables;
    const auto names = cli::list_presets();
    for (const auto &name : names) {
        try {
            const auto table = cli::run(cli::load_preset(name));
            if (table.failed_points > 0)
                failures += fmt::format(" {}: {} failed points;", name, table.failed_points);
            tables[name] = parse_table_csv(cli::to_csv(table));
        } catch (const std::exception &e) {
            failures += fmt::format(" {}: {};", name, e.what());
        }
    }
    auto series_curve = [&](const std::string &fig, const std::string &series, const std::string &col) {
        std::vector<std::pair<double, double>> curve;
        for (const auto &row : tables.at(fig).rows)
            if (row.at("series") == series)
                curve.emplace_back(value(row, "detuning"), value(row, col));
        return curve;
    };
    auto at_resonance = [&](const std::string &fig, const std::string &series, const std::string &col) {
        for (const auto &row : tables.at(fig).rows)
            if (row.at("series") == series && value(row, "detuning") == 0.0)
                return value(row, col);
        throw std::runtime_error(fig + " has no resonance point for " + series);
    };
    std::string shapes;
    bool shapes_ok = false;
    try {
        const double weak = half_width(series_curve("fig9a", "1MHz", "T_forward"));
        const double strong = half_width(series_curve("fig9a", "20.5GHz", "T_forward"));
        const double peak10 = at_resonance("fig10", "P_100nW", "T_through");
        const double fwd = at_resonance("fig13", "c_f", "T_forward");
        const double bwd = at_resonance("fig13", "c_f", "T_backward");
        shapes_ok = strong > weak && peak10 > 1.0 && bwd > 10 * fwd;
        shapes = fmt::format("fig9a FWHM {:.4g} -> {:.4g} MHz, fig10 T(0) = {:.4g}, fig13 c/f T41/T14 = {:.4g}",
                             weak / MHz, strong / MHz, peak10, bwd / fwd);
    } catch (const std::exception &e) {
        shapes = std::string("shape check failed: ") + e.what();
    }
    return {failures.empty() && shapes_ok && names.size() >= 17,
            fmt::format("{} presets; {}{}", names.size(), shapes, failures.empty() ? "" : ";" + failures)};
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "linear exceptional point", 1.0, linear_ep},
        {2, "closed-form eigenfrequencies", 10.0, eigen_closed_form},
        {3, "loss plateau above the EP", 0.0, plateau},
        {4, "linear reciprocity", 0.0, reciprocity},
        {5, "nonlinear non-reciprocity", 1.0, nonreciprocity},
        {6, "EP shift ordering", 30.0, ep_ordering},
        {7, "trajectories vs cubic roots", 60.0, ode_vs_cubic},
        {8, "closed-form cubic root", 0.0, closed_form_root},
        {9, "quantum linear regime", 300.0, quantum_linear},
        {10, "master-equation forms differ at order B^2", 0.0, form_scaling},
        {11, "through transmission cross-check", 0.0, through_cross_check},
        {12, "figure presets", 120.0, presets},
    };
    int failed = 0;
    for (const auto &c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.check();
        } catch (const std::exception &e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string timing = fmt::format("{:.2f} s", seconds);
        if (c.time_limit > 0 && seconds > c.time_limit) {
            out.pass = false;
            timing += fmt::format(" exceeds {:.0f} s", c.time_limit);
        }
        failed += out.pass ? 0 : 1;
        fmt::print("{} [{:2}] {}: {} ({})\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail, timing);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
