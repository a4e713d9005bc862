#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "cli/config.hpp"

namespace kerrbath::cli {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitIntegration = 3, kExitTolerance = 4 };

inline constexpr const char* kSchemaVersion = "1";
const char* tool_version();

// Every command writes its files under c.out_dir and log lines to log.
// Validation problems surface as ValidationError before any file is created.

int cmd_timescales(const RunConfig& c, std::ostream& log);
int cmd_simulate(const RunConfig& c, std::ostream& log);
int cmd_compare(const RunConfig& c, std::ostream& log);
int cmd_sweep(const RunConfig& c, std::ostream& log);
/// input: trajectory CSV written by simulate; empty runs the config afresh.
int cmd_spectrum(const RunConfig& c, const std::string& input, std::ostream& log);

struct BecInputs {
    double scattering_length = 5e-9;  // m
    double mass = 1.5e-25;            // kg
    double trap_omega = 2e2 * 3.141592653589793;
    double particles = 1e4;
    double tau_gamma = 2e2 * 3.141592653589793;
};

struct CantileverInputs {
    double mu_cl = 0.19;
    double quality = 1e6;
    double levels = 6e11;
};

int cmd_regimes_bec(const BecInputs& in, const std::string& out_dir, std::ostream& log);
int cmd_regimes_cantilever(const CantileverInputs& in, const std::string& out_dir, std::ostream& log);

/// "satisfied" above the quantum threshold, "failed" below the classical one,
/// "marginal" in between.
std::string survival_condition(double theta);

}  // namespace kerrbath::cli
