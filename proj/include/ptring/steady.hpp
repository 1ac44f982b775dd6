#ifndef PTRING_STEADY_HPP
#define PTRING_STEADY_HPP

#include "ptring/cubic.hpp"
#include "ptring/model.hpp"

#include <stdexcept>
#include <vector>

namespace ptring
{

// No physical steady state exists (e.g. a driven, lossless, uncoupled cavity).
class NoSolutionError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// The probe cannot reach the active cavity: passive-cavity drive with kappa = 0.
class NoTransmissionError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// lambda1 I^3 + lambda2 I^2 + lambda3 I + lambda4 = 0 for the active-cavity
// intensity I = |A1|^2.
struct CubicCoeffs
{
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double lambda4 = 0.0;

    cubic::Polynomial polynomial() const { return {lambda1, lambda2, lambda3, lambda4}; }
    double operator()(double I) const { return polynomial()(I); }
};

CubicCoeffs cubic_coeffs(const SystemConfig &config, double omega, Port direction);

struct IntensityRoots
{
    std::vector<double> roots; // non-negative real roots, ascending
    cubic::DiscriminantSign discriminant = cubic::DiscriminantSign::Negative;
    int n_real_roots = 1;       // all real roots, including negative ones
};

IntensityRoots solve_intensity(const CubicCoeffs &coeffs);

enum class Stability
{
    Stable,
    Unstable,
    Marginal
};

const char *to_string(Stability stability);

struct SteadyStateSolution
{
    double I1 = 0.0;
    double I2 = 0.0;
    double phi1 = 0.0; // phase of A1 relative to the drive
    Complex A1;
    Complex A2;
    int n_real_roots = 1;
    std::vector<double> all_real_roots;
    Port direction = Port::One;
    // Stability of the returned root; false only when no root is stable and
    // the smallest one was returned as a fallback.
    bool primary_stable = true;
    // Max relative residual of the two driven steady-state rows.
    double residual = 0.0;
};

// Steady state probed from `direction` at drive frequency `omega`. With several
// non-negative roots the smallest linearly stable one is returned.
SteadyStateSolution steady_state(const SystemConfig &config, double omega, Port direction);

inline SteadyStateSolution steady_state(const SystemConfig &config)
{
    return steady_state(config, config.drive.omega_l, config.drive.port);
}

// Field amplitudes for a given root of the intensity cubic (no root selection).
SteadyStateSolution reconstruct_steady_state(const SystemConfig &config, double omega,
                                             Port direction, double I1);

// Relative residual of the driven steady-state equations at (A1, A2).
double steady_residual(const SystemConfig &config, double omega, Port direction, Complex A1,
                       Complex A2);

struct MultistabilityReport
{
    cubic::DiscriminantSign discriminant = cubic::DiscriminantSign::Negative;
    int n_real_roots = 1;
    std::vector<double> roots;
    std::vector<Stability> stability;
    bool multistable = false; // more than one non-negative steady intensity
};

MultistabilityReport detect_multistability(const SystemConfig &config, double omega, Port direction);

} // namespace ptring

#endif // PTRING_STEADY_HPP
