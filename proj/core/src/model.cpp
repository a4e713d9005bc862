#include "kerrbath/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kerrbath/error.hpp"
#include "kerrbath/kernels.hpp"

namespace kerrbath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Above this intensity the truncation rule needs more than ~320 levels.
constexpr double kFeasibleIntensity = 200.0;

}  // namespace

double default_cutoff(double mu_bar, double intensity) {
    return 10.0 * (1.0 + mu_bar * (1.0 + 2.0 * intensity));
}

bool ValidationReport::ok() const {
    return std::none_of(violations.begin(), violations.end(), [](const Violation& v) {
        return v.severity == Violation::Severity::error;
    });
}

std::vector<std::string> ValidationReport::errors() const {
    std::vector<std::string> out;
    for (const auto& v : violations)
        if (v.severity == Violation::Severity::error) out.push_back(v.message);
    return out;
}

std::vector<std::string> ValidationReport::warnings() const {
    std::vector<std::string> out;
    for (const auto& v : violations)
        if (v.severity == Violation::Severity::warning) out.push_back(v.message);
    return out;
}

ValidationReport validate_params(const SystemParams& p) {
    ValidationReport report;
    auto error = [&](std::string msg) {
        report.violations.push_back({Violation::Severity::error, std::move(msg)});
    };
    auto warning = [&](std::string msg) {
        report.violations.push_back({Violation::Severity::warning, std::move(msg)});
    };

    // Written as negated comparisons so that NaN is rejected too.
    if (!(p.mu_bar >= 0.0) || !std::isfinite(p.mu_bar)) error("mu_bar must be >= 0");
    if (!(p.intensity > 0.0) || !std::isfinite(p.intensity)) error("intensity must be > 0");
    if (!std::isfinite(p.theta)) error("theta must be finite");
    if (!(p.beta_bar > 0.0)) error("beta_bar must be > 0");
    if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma)) error("gamma must be >= 0");
    if (!(p.lambda_bar > 0.0) || !std::isfinite(p.lambda_bar)) error("lambda_bar must be > 0");

    if (report.ok()) {
        if (p.lambda_bar <= p.omega_bar()) {
            std::ostringstream os;
            os << "cutoff below system frequency (lambda_bar=" << p.lambda_bar
               << " <= Omega=" << p.omega_bar() << ")";
            warning(os.str());
        }
        if (p.intensity > kFeasibleIntensity)
            warning("intensity above 200: Fock truncation is expensive");
    }
    return report;
}

void require_valid(const SystemParams& p) {
    const auto report = validate_params(p);
    if (report.ok()) return;
    std::string msg = "invalid parameters:";
    for (const auto& e : report.errors()) msg += " " + e + ";";
    throw ValidationError(msg);
}

Timescales derive_timescales(const SystemParams& p, DecoherenceFormula formula) {
    require_valid(p);
    using std::numbers::pi;

    Timescales t;
    const double omega_cl = 1.0 + 2.0 * p.mu_bar * p.intensity;
    const double omega = p.omega_bar();
    t.tau_cl = 2.0 * pi / omega_cl;
    t.tau_E = p.mu_bar > 0.0 ? 1.0 / (2.0 * p.mu_bar * std::sqrt(p.intensity)) : kInf;
    t.tau_R = p.mu_bar > 0.0 ? pi / p.mu_bar : kInf;
    t.tau_gamma = p.gamma > 0.0 ? 2.0 / p.gamma : kInf;

    if (p.gamma <= 0.0) {
        t.tau_D = kInf;
    } else if (formula == DecoherenceFormula::headline) {
        t.tau_D = std::tanh(p.beta_bar * omega / 2.0) / (p.intensity * p.gamma * omega);
    } else {
        t.tau_D = 1.0 / (2.0 * asymptotic_b1(omega, bath_of(p)) * p.intensity);
    }

    if (!std::isfinite(t.tau_E))
        t.theta_ratio = 0.0;
    else
        t.theta_ratio = t.tau_gamma / t.tau_E;
    return t;
}

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::isolated: return "isolated";
        case Regime::quantum_surviving: return "quantum-surviving";
        case Regime::classical: return "classical";
        case Regime::intermediate: return "intermediate";
    }
    return "unknown";
}

RegimeReport classify_regime(const Timescales& t) {
    RegimeReport report;
    if (!std::isfinite(t.tau_gamma))
        report.regime = Regime::isolated;
    else if (t.theta_ratio > kThetaQuantum)
        report.regime = Regime::quantum_surviving;
    else if (t.theta_ratio < kThetaClassical)
        report.regime = Regime::classical;
    else
        report.regime = Regime::intermediate;

    report.ordering = {{"tau_cl", t.tau_cl},
                       {"tau_E", t.tau_E},
                       {"tau_R", t.tau_R},
                       {"tau_D", t.tau_D},
                       {"tau_gamma", t.tau_gamma}};
    std::stable_sort(report.ordering.begin(), report.ordering.end(),
                     [](const NamedTimescale& a, const NamedTimescale& b) { return a.value < b.value; });
    return report;
}

double theta_bec(double scattering_length, double mass, double trap_omega,
                 double particle_count, double tau_gamma) {
    if (!(scattering_length > 0.0) || !(mass > 0.0) || !(trap_omega > 0.0) ||
        !(particle_count > 0.0) || !(tau_gamma > 0.0))
        throw ValidationError("theta_bec: all inputs must be positive");
    return scattering_length *
           std::sqrt(2.0 * mass * trap_omega * particle_count / (std::numbers::pi * kHbar)) *
           tau_gamma;
}

double theta_cantilever(double mu_cl, double quality_factor, double levels) {
    if (!(mu_cl >= 0.0) || !(quality_factor > 0.0) || !(levels > 0.0))
        throw ValidationError("theta_cantilever: mu_cl must be >= 0, Q and n must be positive");
    return 4.0 * mu_cl * quality_factor / std::sqrt(levels);
}

}  // namespace kerrbath
