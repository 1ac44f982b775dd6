#include "ptring/spectral.hpp"

#include "ptring/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ptring
{

const char *to_string(PtPhase phase)
{
    switch (phase) {
    case PtPhase::Unbroken:
        return "unbroken";
    case PtPhase::Broken:
        return "broken";
    case PtPhase::EP:
        return "EP";
    }
    return "unknown";
}

const char *to_string(PtBalance balance)
{
    switch (balance) {
    case PtBalance::BalancedFull:
        return "balanced_full";
    case PtBalance::BalancedLinear:
        return "balanced_linear";
    case PtBalance::Unbalanced:
        return "unbalanced";
    }
    return "unknown";
}

Eigen::Matrix2cd evolution_matrix(const SystemConfig &config, double I1, double omega)
{
    if (I1 < 0.0)
        throw DomainError("evolution_matrix: intensity must be non-negative");
    const auto d = derive(config, omega);
    const double gain = d.G1 - config.gain.B * I1;
    const Complex i(0.0, 1.0);
    Eigen::Matrix2cd m;
    m << -d.Delta + 0.5 * i * gain, -i * config.kappa, i * config.kappa, -d.Delta - 0.5 * i * d.Gamma2;
    return m;
}

EigenSpectrum eigenfrequencies(const SystemConfig &config, double I1)
{
    if (I1 < 0.0)
        throw DomainError("eigenfrequencies: intensity must be non-negative");
    const auto d = derive(config, config.resonators.omega_c);
    const double gain = d.G1 - config.gain.B * I1;
    const double sum = gain + d.Gamma2;
    const double coupling = 4.0 * config.kappa * config.kappa;
    const double loss = 0.25 * sum * sum;

    EigenSpectrum s;
    s.discriminant = coupling - loss;
    s.ep_tolerance = 1e-9 * std::max(coupling, loss);
    const Complex centre(config.resonators.omega_c, 0.25 * (gain - d.Gamma2));
    const Complex root = 0.5 * std::sqrt(Complex(s.discriminant, 0.0));
    Complex plus = centre + root;
    Complex minus = centre - root;
    if (plus.real() < minus.real() || (plus.real() == minus.real() && plus.imag() < minus.imag()))
        std::swap(plus, minus);
    s.omega_plus = plus;
    s.omega_minus = minus;
    s.at_ep = std::abs(s.discriminant) <= s.ep_tolerance;
    if (s.at_ep)
        s.phase = PtPhase::EP;
    else
        s.phase = s.discriminant > 0.0 ? PtPhase::Unbroken : PtPhase::Broken;
    return s;
}

namespace
{

struct EpProbe
{
    double value = std::numeric_limits<double>::quiet_NaN();
    double I1 = 0.0;
};

// Square-root argument at coupling kappa with the steady intensity recomputed
// at resonance. NaN where no steady state exists.
EpProbe probe(const SystemConfig &base, Port direction, double kappa)
{
    SystemConfig config = base;
    config.kappa = kappa;
    config = with_detuning(config, 0.0);
    EpProbe p;
    try {
        p.I1 = steady_state(config, config.drive.omega_l, direction).I1;
    } catch (const std::exception &) {
        return p;
    }
    p.value = eigenfrequencies(config, p.I1).discriminant;
    return p;
}

} // namespace

EpResult find_ep(const SystemConfig &config, Port direction, EpMode mode, const EpSearchOptions &options)
{
    const auto &r = config.resonators;
    const double linear = 0.25 * std::abs(config.gain.A - r.C1 + r.C2 + r.gamma2 - r.gamma1);

    EpResult result;
    if (mode == EpMode::Linear) {
        result.found = true;
        result.kappa_ep = linear;
        result.crossings = {linear};
        return result;
    }

    if (options.samples < 2)
        throw DomainError("find_ep: at least two samples are required");
    const double scale = linear > 0.0 ? linear : std::max({r.C1 + r.gamma1, r.C2 + r.gamma2, config.gain.A, 1.0});
    const double lo = options.kappa_min > 0.0 ? options.kappa_min : 1e-4 * scale;
    const double hi = options.kappa_max > 0.0 ? options.kappa_max : 1e2 * scale;
    if (!(hi > lo))
        throw DomainError("find_ep: empty search bracket");

    const double ratio = std::log(hi / lo) / (options.samples - 1);
    double prev_kappa = lo;
    EpProbe prev = probe(config, direction, lo);
    for (int k = 1; k < options.samples; ++k) {
        const double kappa = k == options.samples - 1 ? hi : lo * std::exp(ratio * k);
        const EpProbe cur = probe(config, direction, kappa);
        if (std::isfinite(prev.value) && std::isfinite(cur.value)) {
            if (cur.value == 0.0) {
                result.crossings.push_back(kappa);
            } else if (prev.value != 0.0 && (prev.value < 0.0) != (cur.value < 0.0)) {
                double a = prev_kappa, b = kappa;
                double fa = prev.value;
                while (b - a > options.rel_tol * b) {
                    const double m = 0.5 * (a + b);
                    const double fm = probe(config, direction, m).value;
                    if (!std::isfinite(fm))
                        break;
                    if ((fm < 0.0) == (fa < 0.0)) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                result.crossings.push_back(0.5 * (a + b));
            }
        }
        prev_kappa = kappa;
        prev = cur;
    }
    if (!result.crossings.empty()) {
        result.found = true;
        result.kappa_ep = result.crossings.front();
        result.I1_at_ep = probe(config, direction, result.kappa_ep).I1;
    }
    return result;
}

PtClassification classify_pt(const SystemConfig &config, double I1, double rel_tol)
{
    const auto &r = config.resonators;
    const double A = config.gain.A;
    const double saturation = config.gain.B * I1;
    const double linear = A - r.C1 - r.C2;
    const double full = linear - saturation;
    const double scale = std::max({std::abs(A), r.C1, r.C2, std::abs(saturation)});

    PtClassification c;
    c.balanced_linear = std::abs(linear) <= rel_tol * scale;
    c.balanced_full = std::abs(full) <= rel_tol * scale;
    if (c.balanced_full)
        c.category = PtBalance::BalancedFull;
    else if (c.balanced_linear)
        c.category = PtBalance::BalancedLinear;
    return c;
}

} // namespace ptring
