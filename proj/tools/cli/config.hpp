#pragma once

#include <cstdint>
#include <map>
#include <numbers>
#include <string>

#include "kerrbath/analysis.hpp"
#include "kerrbath/evolve.hpp"
#include "kerrbath/model.hpp"

namespace kerrbath::cli {

enum class InitialState { coherent, cat };

struct SweepRanges {
    double intensity_min = 20.0, intensity_max = 100.0;
    double mu_min = 1e-3, mu_max = 4.0;
    double beta_min = 1e-2, beta_max = 1.0;
    double gamma_min = 1e-5, gamma_max = 1e-2;
    bool desk_clamp = true;  ///< I0 <= 50, mu_bar <= 1

    bool operator==(const SweepRanges&) const = default;
};

/// Everything a subcommand needs. Serialized as flat "key = value" lines.
struct RunConfig {
    SystemParams params;
    bool lambda_auto = true;  ///< lambda_bar = 10 * Omega_bar
    EvolutionMode mode = EvolutionMode::born_markov_asymptotic;
    IntegratorConfig integrator;
    InitialState initial = InitialState::coherent;
    double cat_phase = std::numbers::pi;  ///< cat partner is alpha * e^{i cat_phase}
    DecoherenceFormula formula = DecoherenceFormula::headline;

    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int workers = 1;
    double tolerance = 0.0;  ///< 0 selects the per-command default

    int draws = 20;
    SweepRanges ranges;

    bool spectrum_hann = false;
    int spectrum_zero_pad = 1;
    /// Fresh spectrum runs span this many recurrence times (last sample
    /// dropped); 0 uses tau_end as given.
    double spectrum_recurrences = 2.0;

    RunConfig();
    /// params with the automatic cutoff applied.
    SystemParams resolved() const;
    bool operator==(const RunConfig& o) const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys and
/// malformed values throw ValidationError naming the line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& c);
/// Applies one key; shared by the parser and command-line overrides.
void set_key(RunConfig& c, const std::string& key, const std::string& value);
/// Ordered key/value view of a config, as written by serialize_config.
std::map<std::string, std::string> config_entries(const RunConfig& c);

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_number(double v);

}  // namespace kerrbath::cli
