#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kerrbath {

/// Dimensionless inputs of one simulation.
///
/// Times are measured in units of the inverse linear frequency, energies in
/// units of hbar*omega. The struct is a plain aggregate so that invalid
/// inputs can be inspected by validate_params(); every physics operation
/// calls require_valid() first.
struct SystemParams {
    double mu_bar = 0.1;       ///< Kerr nonlinearity, >= 0
    double intensity = 50.0;   ///< I0 = |alpha|^2, > 0
    double theta = 0.0;        ///< alpha = sqrt(I0) exp(-i theta)
    double beta_bar = 1.0;     ///< hbar omega / kT, > 0
    double gamma = 1e-4;       ///< system-bath coupling, >= 0
    double lambda_bar = 10.0;  ///< Ohmic UV cutoff, > 0

    /// Quasi-classical parameter epsilon = 1/I0.
    double epsilon() const { return 1.0 / intensity; }
    /// Classical nonlinearity mu_cl = mu_bar * I0.
    double mu_classical() const { return mu_bar * intensity; }
    /// Frequency of the initial coherent state, 1 + mu_bar (1 + 2 I0).
    double omega_bar() const { return 1.0 + mu_bar * (1.0 + 2.0 * intensity); }

    bool operator==(const SystemParams&) const = default;
};

/// Cutoff used when none is given explicitly: ten times the system frequency.
double default_cutoff(double mu_bar, double intensity);

struct Violation {
    enum class Severity { error, warning };
    Severity severity;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const;  ///< no errors (warnings allowed)
    std::vector<std::string> errors() const;
    std::vector<std::string> warnings() const;
};

ValidationReport validate_params(const SystemParams& p);

/// Throws ValidationError listing every error-level violation.
void require_valid(const SystemParams& p);

enum class DecoherenceFormula {
    headline,  ///< tanh(beta Omega / 2) / (I0 gamma Omega), cutoff factor dropped
    exact,     ///< 1 / (2 B1(inf) I0) including the Lorentzian cutoff factor
};

struct Timescales {
    double tau_cl = 0.0;
    double tau_E = 0.0;
    double tau_R = 0.0;
    double tau_D = 0.0;
    double tau_gamma = 0.0;
    double theta_ratio = 0.0;  ///< tau_gamma / tau_E
};

Timescales derive_timescales(const SystemParams& p,
                             DecoherenceFormula formula = DecoherenceFormula::headline);

enum class Regime { isolated, quantum_surviving, classical, intermediate };

std::string_view to_string(Regime r);

inline constexpr double kThetaQuantum = 10.0;
inline constexpr double kThetaClassical = 0.5;

struct NamedTimescale {
    std::string name;
    double value;
};

struct RegimeReport {
    Regime regime;
    std::vector<NamedTimescale> ordering;  ///< ascending; infinite scales last
};

RegimeReport classify_regime(const Timescales& t);

/// Survival figure of merit for a trapped condensate.
///
/// Inputs are SI: scattering length in m, atomic mass in kg, trap frequency in
/// rad/s; tau_gamma is dimensionless.
double theta_bec(double scattering_length, double mass, double trap_omega,
                 double particle_count, double tau_gamma);

/// Survival figure of merit 4 mu_cl Q / sqrt(n) for a mechanical resonator.
double theta_cantilever(double mu_cl, double quality_factor, double levels);

inline constexpr double kHbar = 1.054571817e-34;  // J s

}  // namespace kerrbath
