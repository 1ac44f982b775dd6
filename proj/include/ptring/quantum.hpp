#ifndef PTRING_QUANTUM_HPP
#define PTRING_QUANTUM_HPP

#include "ptring/model.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Truncated two-mode Fock-space density-matrix dynamics in the frame rotating
// at the drive frequency (hbar = 1). Intended for the few-photon regime.

namespace ptring::quantum
{

using SparseOp = Eigen::SparseMatrix<Complex>;

class QuantumIntegrationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct FockBasis
{
    int n_max1 = 1; // inclusive photon-number cutoffs
    int n_max2 = 1;

    int dim1() const { return n_max1 + 1; }
    int dim2() const { return n_max2 + 1; }
    int dimension() const { return dim1() * dim2(); }
    // Row/column of |n1, n2>.
    int index(int n1, int n2) const { return n1 * dim2() + n2; }

    bool operator==(const FockBasis &) const = default;
};

inline constexpr int default_max_dimension = 4096;

// Throws DomainError for cutoffs below 1 or a dimension above the budget.
void check_basis(const FockBasis &basis, int max_dimension = default_max_dimension);

// Rough photon numbers from the semiclassical steady state (or the free-running
// laser intensity when undriven).
std::pair<double, double> estimated_photon_numbers(const SystemConfig &config);

// Cutoff max(8, 4 ceil(<n>)) per mode from the estimate above.
FockBasis default_basis(const SystemConfig &config);

// Warning text when an estimated photon number exceeds half its cutoff.
std::optional<std::string> cutoff_warning(const SystemConfig &config, const FockBasis &basis);

struct DensityMatrix
{
    FockBasis basis;
    Eigen::MatrixXcd rho;
};

DensityMatrix vacuum(const FockBasis &basis);
DensityMatrix fock_state(const FockBasis &basis, int n1, int n2);
// Product of truncated coherent states, renormalised after truncation.
DensityMatrix coherent_state(const FockBasis &basis, Complex alpha1, Complex alpha2);
// Diagonal thermal-like state with the given mean photon numbers (before truncation).
DensityMatrix thermal_state(const FockBasis &basis, double n1, double n2);

struct ModeOperators
{
    SparseOp a1, a2, n1, n2;
};

ModeOperators mode_operators(const FockBasis &basis);

enum class MasterEquationForm
{
    NonLindbladian, // Scully-Lamb form with the B-dependent jump terms
    Lindblad        // L1 = sqrt(A) a1^+(1 - B a1 a1^+ / 2A), L2 = sqrt(3B) a1 a1^+ / 2, L3, L4
};

const char *to_string(MasterEquationForm form);

// rho -> d rho / dt as K rho + rho K^+ + sum_k c_k L_k rho R_k with sparse
// mode operators; the d^2 x d^2 superoperator is never formed.
class Generator
{
public:
    Generator(const SystemConfig &config, const FockBasis &basis, MasterEquationForm form,
              int max_dimension = default_max_dimension);

    void apply(const Eigen::MatrixXcd &rho, Eigen::MatrixXcd &out) const;
    Eigen::MatrixXcd operator()(const Eigen::MatrixXcd &rho) const;

    const FockBasis &basis() const { return basis_; }
    const SystemConfig &config() const { return config_; }
    MasterEquationForm form() const { return form_; }
    const ModeOperators &ops() const { return ops_; }
    // Largest rate in the generator, used to nondimensionalise time.
    double rate_scale() const { return rate_scale_; }
    const std::optional<std::string> &warning() const { return warning_; }

private:
    struct Sandwich
    {
        double coefficient;
        SparseOp left;
        SparseOp right;
    };

    SystemConfig config_;
    FockBasis basis_;
    MasterEquationForm form_;
    ModeOperators ops_;
    SparseOp K_;
    SparseOp K_adjoint_;
    std::vector<Sandwich> sandwiches_;
    double rate_scale_ = 1.0;
    std::optional<std::string> warning_;
};

struct Expectations
{
    Complex a1;
    Complex a2;
    double n1 = 0.0;
    double n2 = 0.0;
    Complex a1_dag_a1_a1; // <a1^+ a1 a1>
    double trace = 0.0;
    double purity = 0.0;
};

Expectations expectations(const Eigen::MatrixXcd &rho, const FockBasis &basis);
inline Expectations expectations(const DensityMatrix &state)
{
    return expectations(state.rho, state.basis);
}

// Population of the outermost Fock layer of either mode.
double top_layer_population(const Eigen::MatrixXcd &rho, const FockBasis &basis);

struct EvolveConfig
{
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    // Output times in seconds, ascending, relative to t = 0. Empty: only the
    // final state is recorded.
    std::vector<double> sample_times;
    bool keep_states = false;
    bool track_positivity = true;
    double trace_tolerance = 1e-6;
    double leakage_threshold = 1e-6;
};

struct QuantumTrajectory
{
    std::vector<double> times;
    std::vector<Expectations> values;
    std::vector<Eigen::MatrixXcd> states; // filled when keep_states is set
    DensityMatrix final_state;
    double max_trace_drift = 0.0;
    double min_eigenvalue = 0.0; // over the recorded samples
    bool positivity_violated = false; // some eigenvalue below -1e-8
    double max_leakage = 0.0;
    bool leakage_warning = false;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

// Integrates d rho/dt = L(rho) to t_final. The state is re-symmetrised after
// every accepted step; a trace drift above the tolerance throws
// QuantumIntegrationError.
QuantumTrajectory evolve(const DensityMatrix &rho0, const Generator &generator, double t_final,
                         const EvolveConfig &config = {});

struct RateResidual
{
    // Mismatch of the first-moment equations using a five-point finite
    // difference of the sampled <a_k>(t).
    double finite_difference = 0.0;
    // Same equations with d<a_k>/dt = Tr[a_k L(rho)] on the stored states.
    double exact = 0.0;
    // rate x amplitude yardstick both residuals are divided by.
    double scale = 0.0;
};

// Right-hand side of the first-moment equations for <a1>, <a2> with the
// third-order moment <a1^+ a1 a1> taken from the state.
std::pair<Complex, Complex> moment_rhs(const Expectations &e, const SystemConfig &config);

// Requires uniformly spaced samples and, for the exact column, stored states.
RateResidual rate_equation_residual(const QuantumTrajectory &trajectory, const Generator &generator);

} // namespace ptring::quantum

#endif // PTRING_QUANTUM_HPP
