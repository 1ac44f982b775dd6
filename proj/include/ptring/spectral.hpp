#ifndef PTRING_SPECTRAL_HPP
#define PTRING_SPECTRAL_HPP

#include "ptring/model.hpp"

#include <Eigen/Core>

#include <vector>

namespace ptring
{

// Rotating-frame evolution matrix, i dA/dt = M A for the homogeneous linearised
// equations, with the saturated gain G1' = G1 - B I1 on the active diagonal.
Eigen::Matrix2cd evolution_matrix(const SystemConfig &config, double I1, double omega);

enum class PtPhase
{
    Unbroken, // real splitting, equal imaginary parts
    Broken,   // degenerate real parts, split imaginary parts
    EP
};

const char *to_string(PtPhase phase);

struct EigenSpectrum
{
    Complex omega_plus;
    Complex omega_minus;
    // 4 kappa^2 - (G1' + Gamma2)^2 / 4; its sign decides the phase.
    double discriminant = 0.0;
    double ep_tolerance = 0.0;
    bool at_ep = false;
    PtPhase phase = PtPhase::Unbroken;
};

// Complex eigenfrequencies in the lab frame,
//   omega_pm = omega_c + i (G1' - Gamma2)/4 +- sqrt(4 kappa^2 - (G1' + Gamma2)^2 / 4) / 2,
// ordered so that Re(omega_plus) >= Re(omega_minus), ties broken by Im.
EigenSpectrum eigenfrequencies(const SystemConfig &config, double I1);

enum class EpMode
{
    Linear,
    SelfConsistent
};

struct EpSearchOptions
{
    // Bracket for the self-consistent search; zero picks
    // [1e-4, 1e2] x the linear estimate.
    double kappa_min = 0.0;
    double kappa_max = 0.0;
    int samples = 400;
    double rel_tol = 1e-12;
};

struct EpResult
{
    bool found = false;
    double kappa_ep = 0.0;         // first crossing
    std::vector<double> crossings; // every crossing, ascending
    double I1_at_ep = 0.0;         // steady intensity at kappa_ep (self-consistent mode)
};

// Linear mode: kappa_EP = |A - C1 + C2 + gamma2 - gamma1| / 4 at I1 = 0, i.e.
// C2 / 2 under the linear balance. Self-consistent mode: zeros in kappa of the
// square-root argument with I1(kappa) recomputed from the steady state at
// resonance for the given probe direction.
EpResult find_ep(const SystemConfig &config, Port direction, EpMode mode, const EpSearchOptions &options = {});

enum class PtBalance
{
    BalancedFull,   // A - C1 - C2 - B I1 = 0
    BalancedLinear, // A - C1 - C2 = 0
    Unbalanced
};

const char *to_string(PtBalance balance);

struct PtClassification
{
    bool balanced_full = false;
    bool balanced_linear = false;
    PtBalance category = PtBalance::Unbalanced; // full takes precedence
};

PtClassification classify_pt(const SystemConfig &config, double I1, double rel_tol = 1e-9);

} // namespace ptring

#endif // PTRING_SPECTRAL_HPP
