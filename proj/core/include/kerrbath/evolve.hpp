#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kerrbath/error.hpp"
#include "kerrbath/fock.hpp"
#include "kerrbath/kernels.hpp"
#include "kerrbath/model.hpp"

namespace kerrbath {

enum class EvolutionMode { closed, born_markov_asymptotic, born_markov_transient, lindblad_rwa };

std::string_view to_string(EvolutionMode m);
/// Accepts the names printed by to_string; throws ValidationError otherwise.
EvolutionMode parse_mode(std::string_view name);

/// rk4 advances the full equation; integrating_factor applies the free
/// evolution exactly as elementwise phases and uses RK4 for the bath part only.
enum class Stepper { integrating_factor, rk4 };

std::string_view to_string(Stepper s);
Stepper parse_stepper(std::string_view name);

struct IntegratorConfig {
    double dt = 0.0;  ///< 0 selects the default step
    Stepper stepper = Stepper::integrating_factor;
    int stride = 1;
    double tau_end = 1.0;
    double positivity_tol = 1e-6;
    int eigen_every = 0;  ///< check the spectrum every k-th sample; 0 disables
    bool keep_snapshots = false;
    /// Record <alpha(tau)| rho |beta(tau)> with both kets evolved by the free
    /// Hamiltonian, i.e. the overlap in the interaction frame.
    std::optional<std::pair<cplx, cplx>> cat_pair;
    int transient_points = 96;  ///< coefficient table size in transient mode
};

/// min(0.02 / Omega_{N-1}, tau_E / 200), further capped for RK4 stability.
double default_step(const SystemParams& p, int dim);

struct Trajectory {
    std::vector<double> tau;
    std::vector<cplx> a;              ///< <a>
    std::vector<cplx> a_interaction;  ///< sum sqrt(n+1) rho(n+1,n) e^{i Omega_n tau}
    std::vector<double> x;
    std::vector<double> n;
    std::vector<double> energy;  ///< <n + mu_bar n^2>
    std::vector<double> trace;
    std::vector<double> herm_defect;
    std::vector<cplx> cat_overlap;
    std::vector<double> eigen_tau;
    std::vector<double> min_eigenvalue;
    std::vector<Matrix> snapshots;
    std::vector<std::string> warnings;

    double dt = 0.0;
    long steps = 0;
    int dimension = 0;

    std::size_t size() const { return tau.size(); }
    double max_trace_error() const;
    double max_herm_defect() const;
    double max_energy_drift() const;  ///< relative to the first sample
    double min_eigen() const;         ///< +inf when never checked
};

/// Integration failure; carries everything sampled before the failure.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, Trajectory partial)
        : Error(what), partial_(std::move(partial)) {}
    const Trajectory& partial() const noexcept { return partial_; }

private:
    Trajectory partial_;
};

// Dense reference right-hand sides. They build every operator explicitly and
// are used to cross-check the banded implementation in MasterEquation.
Matrix free_rhs(const Matrix& rho, const LadderOperators& ops, double mu_bar);
Matrix dissipation_rhs(const Matrix& rho, const LadderOperators& ops, const BathCoefficients& c);
Matrix noise_rhs(const Matrix& rho, const LadderOperators& ops, const BathCoefficients& c);
Matrix lindblad_rhs(const Matrix& rho, const LadderOperators& ops, double mu_bar, double gamma);

/// Banded right-hand side for one mode, O(N^2) per call.
class MasterEquation {
public:
    MasterEquation(EvolutionMode mode, const SystemParams& p, int dim, int transient_points = 96);

    /// Replaces the coefficient table (Born-Markov modes).
    void set_coefficients(const BathCoefficients& c);
    /// Coefficients at time tau; only consulted in transient mode.
    void update_time(double tau);

    void operator()(const Matrix& rho, Matrix& out) const;
    /// Everything except -i[H, rho].
    void bath(const Matrix& rho, Matrix& out) const;

    EvolutionMode mode() const { return mode_; }
    int dimension() const { return dim_; }

private:
    struct Table {
        std::vector<double> tau;
        std::vector<BathCoefficients> values;
        BathCoefficients asymptote;
        double t_settle = 0.0;
    };

    void load(const BathCoefficients& c);
    void add_bath(const Matrix& rho, Matrix& out) const;

    EvolutionMode mode_;
    SystemParams p_;
    int dim_;
    std::vector<double> energy_;
    std::vector<double> sqrt_;
    // Off-diagonal entries L(k-1,k), L(k,k-1) and R(k-1,k), R(k,k-1)
    // of (iP -+ Q)/2, indexed by k.
    std::vector<cplx> lu_, ll_, ru_, rl_;
    std::optional<Table> table_;
};

Trajectory integrate(const DensityMatrix& rho0, EvolutionMode mode, const SystemParams& p,
                     const IntegratorConfig& cfg);

}  // namespace kerrbath
