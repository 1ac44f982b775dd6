#ifndef PTRING_TRANSMISSION_HPP
#define PTRING_TRANSMISSION_HPP

#include "ptring/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptring
{

// Raised when a transmissivity comes out clearly negative, which signals a
// wrong steady-state branch rather than rounding.
class TransmissionConsistencyError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Port 1 -> port 4 through both cavities:
//   T = 4 kappa^2 gamma1 gamma2 I1 / (eps^2 (Gamma2^2 + 4 Delta^2)).
double t_forward(const SystemConfig &config, double omega);

struct BackwardTransmission
{
    double T = 0.0;
    bool degenerate = false; // kappa = 0: the probe never reaches port 1
};

// Port 4 -> port 1: T = gamma1 gamma2 I1 / eps^2 with I1 from the
// passive-side drive.
BackwardTransmission t_backward(const SystemConfig &config, double omega);

// Port 1 -> port 2 past the active cavity:
//   T = 1 + (2 gamma1 I1 / eps^2)(gamma1/2 - F) - gamma1 B I1^2 / eps^2.
double t_through(const SystemConfig &config, double omega);

// |1 + gamma1 A1 / eps|^2 from the reconstructed steady amplitude, the
// input-output form of the same quantity.
double t_through_input_output(const SystemConfig &config, double omega);

enum class Direction
{
    Forward14,
    Backward41,
    Through12
};

const char *to_string(Direction direction);
Direction direction_from_string(const std::string &name);

struct TransmissionPoint
{
    double delta = 0.0;
    double T = 0.0;
    bool ok = true;
    bool degenerate = false;
    std::string error;
};

struct TransmissionCurve
{
    Direction direction = Direction::Forward14;
    std::vector<TransmissionPoint> points;
    bool normalized = false;
    bool complete = true; // every point evaluated without error
};

// Transmissivity on a strictly increasing detuning grid, evaluated in
// parallel with results kept in grid order. With `normalize` every T is
// divided by the largest T on the grid.
TransmissionCurve sweep_spectrum(const SystemConfig &config, Direction direction, const std::vector<double> &deltas,
                                 bool normalize = false, unsigned threads = 0);

// Full width at half maximum around the global peak, with linear
// interpolation between grid points. Empty if a half-maximum crossing falls
// outside the grid.
std::optional<double> fwhm(const TransmissionCurve &curve);

enum class LineShape
{
    Lorentzian,
    SquaredLorentzian
};

const char *to_string(LineShape shape);

struct LineShapeFit
{
    double lorentzian_width = 0.0;
    double lorentzian_sse = 0.0;
    double squared_width = 0.0;
    double squared_sse = 0.0;
    LineShape best = LineShape::Lorentzian;
};

// Least-squares comparison of a / (1 + x^2) against a / (1 + x^2)^2 with
// x = (Delta - Delta_peak) / w; amplitude and width are fitted per shape.
LineShapeFit compare_line_shapes(const TransmissionCurve &curve);

} // namespace ptring

#endif // PTRING_TRANSMISSION_HPP
