#ifndef PTRING_DYNAMICS_HPP
#define PTRING_DYNAMICS_HPP

#include "ptring/model.hpp"
#include "ptring/steady.hpp"

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ptring
{

// Lab: a_k oscillate at the cavity frequency and the drive carries
// exp(-i omega_l t). Rotating: A_k = a_k exp(i omega_l t), autonomous.
enum class Frame
{
    Lab,
    Rotating
};

struct TrajectoryState
{
    double t = 0.0; // s
    Complex A1;
    Complex A2;
    Frame frame = Frame::Rotating;
};

struct IntegratorConfig
{
    double rel_tol = 1e-9;
    double abs_tol = 1e-12; // in units of the trajectory's amplitude scale
    double max_step = 0.0;  // s; 0 picks convergence_window / 8 (or no cap)
    double max_time = 0.0;  // s
    // Steady-state detection: the sup-norm change of (A1, A2) over the
    // trailing window, relative to the amplitude scale. 0 disables it.
    double convergence_window = 0.0; // s
    double convergence_eps = 1e-10;
    // Minimum spacing of recorded samples; 0 records every accepted step.
    double sample_interval = 0.0; // s
};

enum class Termination
{
    Converged,
    MaxTime
};

struct Trajectory
{
    std::vector<TrajectoryState> samples;
    TrajectoryState terminal;
    Termination termination = Termination::MaxTime;
    // Not converged at max_time while still moving by more than 1e3 x
    // convergence_eps over the window: a limit cycle or slow transient.
    bool oscillating = false;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    double time_scale = 1.0;      // s per internal time unit
    double amplitude_scale = 1.0; // amplitude unit used for abs_tol
};

class StiffnessError : public std::runtime_error
{
public:
    StiffnessError(const std::string &message, TrajectoryState state)
        : std::runtime_error(message), state_(state)
    {
    }
    const TrajectoryState &state() const noexcept { return state_; }

private:
    TrajectoryState state_;
};

// Right-hand side of the semiclassical field equations. The drive -epsilon
// enters the equation of the cavity attached to `direction`'s input port.
std::array<Complex, 2> rhs(const TrajectoryState &state, const SystemConfig &config, Port direction);

Trajectory integrate(const TrajectoryState &initial, const SystemConfig &config,
                     const IntegratorConfig &integrator, Port direction);

struct StabilityReport
{
    Stability verdict = Stability::Stable;
    double max_real_part = 0.0;
    std::array<Complex, 4> eigenvalues{};
};

// Linear stability of the fixed point built from a root of the intensity
// cubic, from the 4x4 real Jacobian of the rotating-frame equations.
StabilityReport stability_of_root(const SystemConfig &config, double omega, Port direction, double I1);

// Largest rate entering the rotating-frame equations for a given intensity.
double rate_scale(const SystemConfig &config, double omega, double intensity);

} // namespace ptring

#endif // PTRING_DYNAMICS_HPP
