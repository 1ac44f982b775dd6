#include "ptring/transmission.hpp"

#include "ptring/parallel.hpp"
#include "ptring/steady.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>

namespace ptring
{

double t_forward(const SystemConfig &config, double omega)
{
    const auto probe = with_drive_port(config, Port::One);
    const double eps = probe.drive.epsilon;
    if (!(eps > 0.0))
        throw DomainError("t_forward: drive epsilon must be positive");
    if (config.kappa == 0.0)
        return 0.0;
    const auto d = derive(config, omega);
    const double I1 = steady_state(config, omega, Port::One).I1;
    const auto &r = config.resonators;
    return 4.0 * config.kappa * config.kappa * r.gamma1 * r.gamma2 * I1 /
           (eps * eps * (d.Gamma2 * d.Gamma2 + 4.0 * d.Delta * d.Delta));
}

BackwardTransmission t_backward(const SystemConfig &config, double omega)
{
    const double eps = with_drive_port(config, Port::Four).drive.epsilon;
    if (!(eps > 0.0))
        throw DomainError("t_backward: drive epsilon must be positive");
    if (config.kappa == 0.0)
        return {0.0, true};
    const double I1 = steady_state(config, omega, Port::Four).I1;
    const auto &r = config.resonators;
    return {r.gamma1 * r.gamma2 * I1 / (eps * eps), false};
}

namespace
{
double checked_nonnegative(double T)
{
    if (T < 0.0) {
        if (T > -1e-12)
            return 0.0;
        throw TransmissionConsistencyError("t_through: negative transmissivity " + std::to_string(T));
    }
    return T;
}
} // namespace

double t_through(const SystemConfig &config, double omega)
{
    const double eps = with_drive_port(config, Port::One).drive.epsilon;
    if (!(eps > 0.0))
        throw DomainError("t_through: transmission is undefined without a drive");
    const auto d = derive(config, omega);
    const double I1 = steady_state(config, omega, Port::One).I1;
    const double gamma1 = config.resonators.gamma1;
    const double e2 = eps * eps;
    const double T =
        1.0 + (2.0 * gamma1 * I1 / e2) * (0.5 * gamma1 - d.F) - gamma1 * config.gain.B * I1 * I1 / e2;
    return checked_nonnegative(T);
}

double t_through_input_output(const SystemConfig &config, double omega)
{
    const double eps = with_drive_port(config, Port::One).drive.epsilon;
    if (!(eps > 0.0))
        throw DomainError("t_through: transmission is undefined without a drive");
    const auto sol = steady_state(config, omega, Port::One);
    return std::norm(1.0 + config.resonators.gamma1 * sol.A1 / eps);
}

const char *to_string(Direction direction)
{
    switch (direction) {
    case Direction::Forward14:
        return "1->4";
    case Direction::Backward41:
        return "4->1";
    case Direction::Through12:
        return "1->2";
    }
    return "unknown";
}

Direction direction_from_string(const std::string &name)
{
    if (name == "1->4" || name == "forward" || name == "14")
        return Direction::Forward14;
    if (name == "4->1" || name == "backward" || name == "41")
        return Direction::Backward41;
    if (name == "1->2" || name == "through" || name == "12")
        return Direction::Through12;
    throw DomainError("unknown transmission direction '" + name + "'");
}

TransmissionCurve sweep_spectrum(const SystemConfig &config, Direction direction, const std::vector<double> &deltas,
                                 bool normalize, unsigned threads)
{
    if (deltas.empty())
        throw DomainError("sweep_spectrum: detuning grid is empty");
    for (std::size_t k = 1; k < deltas.size(); ++k)
        if (!(deltas[k] > deltas[k - 1]))
            throw DomainError("sweep_spectrum: detuning grid must be strictly increasing");

    TransmissionCurve curve;
    curve.direction = direction;
    curve.points = parallel_map(
        deltas.size(),
        [&](std::size_t k) {
            TransmissionPoint p;
            p.delta = deltas[k];
            const double omega = config.resonators.omega_c + deltas[k];
            try {
                switch (direction) {
                case Direction::Forward14:
                    p.T = t_forward(config, omega);
                    break;
                case Direction::Backward41: {
                    const auto b = t_backward(config, omega);
                    p.T = b.T;
                    p.degenerate = b.degenerate;
                    break;
                }
                case Direction::Through12:
                    p.T = t_through(config, omega);
                    break;
                }
            } catch (const std::exception &e) {
                p.ok = false;
                p.T = std::nan("");
                p.error = e.what();
            }
            return p;
        },
        threads);

    curve.complete = std::all_of(curve.points.begin(), curve.points.end(), [](const auto &p) { return p.ok; });
    if (normalize) {
        double peak = 0.0;
        for (const auto &p : curve.points)
            if (p.ok)
                peak = std::max(peak, p.T);
        if (peak > 0.0) {
            for (auto &p : curve.points)
                if (p.ok)
                    p.T /= peak;
            curve.normalized = true;
        }
    }
    return curve;
}

namespace
{
std::size_t peak_index(const TransmissionCurve &curve)
{
    std::size_t best = curve.points.size();
    for (std::size_t k = 0; k < curve.points.size(); ++k)
        if (curve.points[k].ok && (best == curve.points.size() || curve.points[k].T > curve.points[best].T))
            best = k;
    if (best == curve.points.size())
        throw DomainError("curve has no valid points");
    return best;
}
} // namespace

std::optional<double> fwhm(const TransmissionCurve &curve)
{
    const auto &pts = curve.points;
    const std::size_t peak = peak_index(curve);
    const double half = 0.5 * pts[peak].T;
    if (!(half > 0.0))
        return std::nullopt;

    auto crossing = [&](std::size_t inner, std::size_t outer) {
        const double t = (pts[inner].T - half) / (pts[inner].T - pts[outer].T);
        return pts[inner].delta + t * (pts[outer].delta - pts[inner].delta);
    };

    std::optional<double> left, right;
    for (std::size_t k = peak; k > 0; --k) {
        if (!pts[k - 1].ok)
            return std::nullopt;
        if (pts[k - 1].T <= half) {
            left = crossing(k, k - 1);
            break;
        }
    }
    for (std::size_t k = peak; k + 1 < pts.size(); ++k) {
        if (!pts[k + 1].ok)
            return std::nullopt;
        if (pts[k + 1].T <= half) {
            right = crossing(k, k + 1);
            break;
        }
    }
    if (!left || !right)
        return std::nullopt;
    return *right - *left;
}

const char *to_string(LineShape shape)
{
    return shape == LineShape::Lorentzian ? "lorentzian" : "squared_lorentzian";
}

namespace
{
// Sum of squared residuals for the best amplitude at width w.
double shape_sse(const TransmissionCurve &curve, double centre, double w, int power)
{
    double ts = 0.0, ss = 0.0, tt = 0.0;
    for (const auto &p : curve.points) {
        if (!p.ok)
            continue;
        const double x = (p.delta - centre) / w;
        const double s = std::pow(1.0 / (1.0 + x * x), power);
        ts += p.T * s;
        ss += s * s;
        tt += p.T * p.T;
    }
    return ss > 0.0 ? tt - ts * ts / ss : tt;
}

std::pair<double, double> fit_width(const TransmissionCurve &curve, double centre, int power)
{
    const double span = curve.points.back().delta - curve.points.front().delta;
    double lo = std::log(span > 0.0 ? span * 1e-4 : 1.0);
    double hi = std::log(span > 0.0 ? span * 10.0 : 1.0);
    const std::function<double(double)> sse = [&](double lw) { return shape_sse(curve, centre, std::exp(lw), power); };

    // Coarse scan, then golden-section refinement around the best sample.
    constexpr int n = 200;
    double best_lw = lo, best = sse(lo);
    for (int k = 1; k <= n; ++k) {
        const double lw = lo + (hi - lo) * k / n;
        const double v = sse(lw);
        if (v < best) {
            best = v;
            best_lw = lw;
        }
    }
    const double step = (hi - lo) / n;
    double a = best_lw - step, b = best_lw + step;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = sse(c), fd = sse(d);
    for (int it = 0; it < 100; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = sse(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = sse(d);
        }
    }
    const double lw = 0.5 * (a + b);
    const double v = sse(lw);
    return v < best ? std::pair{std::exp(lw), v} : std::pair{std::exp(best_lw), best};
}
} // namespace

LineShapeFit compare_line_shapes(const TransmissionCurve &curve)
{
    if (curve.points.size() < 3)
        throw DomainError("compare_line_shapes: at least three points are required");
    const double centre = curve.points[peak_index(curve)].delta;
    LineShapeFit fit;
    std::tie(fit.lorentzian_width, fit.lorentzian_sse) = fit_width(curve, centre, 1);
    std::tie(fit.squared_width, fit.squared_sse) = fit_width(curve, centre, 2);
    fit.best = fit.squared_sse < fit.lorentzian_sse ? LineShape::SquaredLorentzian : LineShape::Lorentzian;
    return fit;
}

} // namespace ptring
