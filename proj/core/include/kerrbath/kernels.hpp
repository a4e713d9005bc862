#pragma once

#include <vector>

#include "kerrbath/model.hpp"

namespace kerrbath {

/// J(w) = gamma w L^2 / (L^2 + w^2).
struct OhmicSpectralDensity {
    double gamma = 0.0;
    double lambda_bar = 10.0;
};

double spectral_density_at(const OhmicSpectralDensity& J, double omega_bar);

/// Bath coefficients of one Fock level, evaluated at its transition
/// frequency Omega_n = 1 + mu_bar (1 + 2n).
struct LevelCoefficients {
    double omega = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
};

struct BathCoefficients {
    enum class Mode { transient, asymptotic };

    Mode mode = Mode::asymptotic;
    double tau = 0.0;  ///< evaluation time for transient tables
    std::vector<LevelCoefficients> levels;
    double max_error = 0.0;  ///< largest quadrature error estimate over all levels
};

/// Bath parameters needed by the coefficient integrals.
struct BathSpec {
    double gamma = 0.0;
    double lambda_bar = 10.0;
    double beta_bar = 1.0;
};

BathSpec bath_of(const SystemParams& p);

/// Closed form (gamma Omega / 2) L^2/(L^2 + Omega^2) coth(beta Omega / 2).
double asymptotic_b1(double omega, const BathSpec& bath);
/// Closed form J(Omega) / 2.
double asymptotic_a2(double omega, const BathSpec& bath);
/// Closed form gamma L^3 / (2 (L^2 + Omega^2)); the principal value of the
/// dissipation integral.
double asymptotic_a1(double omega, const BathSpec& bath);
/// Principal-value noise integral, evaluated by symmetric subtraction about
/// Omega and adaptive quadrature.
double asymptotic_b2(double omega, const BathSpec& bath, double* error_estimate = nullptr);

/// All four asymptotic coefficients at an arbitrary frequency.
LevelCoefficients asymptotic_at(double omega, const BathSpec& bath);

/// All four coefficients integrated up to time tau (> 0).
///
/// Inner time integrals are done analytically; the outer frequency integrals
/// run over panels on [0, W] with an asymptotic oscillatory tail beyond W.
/// Throws QuadratureError if the estimated error exceeds rel_tol times the
/// coefficient scale.
LevelCoefficients transient_at(double omega, const BathSpec& bath, double tau,
                               double rel_tol = 1e-6, double* error_estimate = nullptr);

/// Frequency of Fock level n.
double level_frequency(double mu_bar, int n);

BathCoefficients asymptotic_coefficients(const SystemParams& p, int levels);
BathCoefficients transient_coefficients(const SystemParams& p, int levels, double tau);

/// sqrt(Omega^2 - gamma L^3 / (L^2 + Omega^2)) at the coherent-state frequency.
/// Throws ValidationError (over-damped) when the radicand is not positive.
double effective_frequency(const SystemParams& p);

/// Time after which every transient coefficient is within its asymptote to
/// the precision used by the integrators.
double settling_time(const BathSpec& bath);

}  // namespace kerrbath
