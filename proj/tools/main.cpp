#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "kerrbath/error.hpp"
#include "kerrbath/evolve.hpp"

using namespace kerrbath;
using namespace kerrbath::cli;

namespace {

struct CommonFlags {
    std::string config;
    std::string out;
    std::string seed;
    std::string workers;
    std::string mode;
    std::string tolerance;
    std::vector<std::string> sets;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--config", f.config, "key = value configuration file");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--seed", f.seed, "RNG seed (sweeps)");
    sub->add_option("--workers", f.workers, "worker threads (sweeps)");
    sub->add_option("--mode", f.mode, "closed | born-markov | born-markov-transient | lindblad-rwa");
    sub->add_option("--tolerance", f.tolerance, "relative tolerance (compare)");
    sub->add_option("--set", f.sets, "override one config key, KEY=VALUE; repeatable");
}

RunConfig build_config(const CommonFlags& f) {
    RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
    for (const auto& kv : f.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ValidationError("--set expects KEY=VALUE, got '" + kv + "'");
        set_key(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!f.out.empty()) set_key(c, "out", f.out);
    if (!f.seed.empty()) set_key(c, "seed", f.seed);
    if (!f.workers.empty()) set_key(c, "workers", f.workers);
    if (!f.mode.empty()) set_key(c, "mode", f.mode);
    if (!f.tolerance.empty()) set_key(c, "tolerance", f.tolerance);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kerr oscillator in a thermal bath: simulations, closed forms and fits"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));

    CommonFlags f;
    auto* timescales = app.add_subcommand("timescales", "derived timescales and regime");
    auto* simulate = app.add_subcommand("simulate", "integrate the master equation; CSV + JSON");
    auto* compare = app.add_subcommand("compare", "numerical vs closed-form <a>");
    auto* sweep = app.add_subcommand("sweep", "seeded decoherence-time sweep");
    auto* spectrum = app.add_subcommand("spectrum", "Fourier spectrum of x and its width");
    std::string input;
    spectrum->add_option("--input", input, "trajectory CSV from simulate; default runs the config");
    for (auto* s : {timescales, simulate, compare, sweep, spectrum}) add_common(s, f);

    auto* regimes = app.add_subcommand("regimes", "survival estimates in physical units");
    regimes->require_subcommand(1);
    std::string regimes_out = "out";
    regimes->add_option("--out", regimes_out, "output directory");
    BecInputs bec;
    auto* bec_cmd = regimes->add_subcommand("bec", "trapped condensate");
    bec_cmd->add_option("--scattering-length", bec.scattering_length, "m")->capture_default_str();
    bec_cmd->add_option("--mass", bec.mass, "kg")->capture_default_str();
    bec_cmd->add_option("--trap-omega", bec.trap_omega, "rad/s")->capture_default_str();
    bec_cmd->add_option("--particles", bec.particles)->capture_default_str();
    bec_cmd->add_option("--tau-gamma", bec.tau_gamma, "dimensionless")->capture_default_str();
    CantileverInputs cant;
    auto* cant_cmd = regimes->add_subcommand("cantilever", "mechanical resonator");
    cant_cmd->add_option("--mu-cl", cant.mu_cl)->capture_default_str();
    cant_cmd->add_option("--quality", cant.quality)->capture_default_str();
    cant_cmd->add_option("--levels", cant.levels, "thermal occupation n")->capture_default_str();
    for (auto* s : {bec_cmd, cant_cmd}) s->add_option("--out", regimes_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (regimes->parsed()) {
            if (bec_cmd->parsed()) return cmd_regimes_bec(bec, regimes_out, std::cout);
            return cmd_regimes_cantilever(cant, regimes_out, std::cout);
        }
        const RunConfig c = build_config(f);
        if (timescales->parsed()) return cmd_timescales(c, std::cout);
        if (simulate->parsed()) return cmd_simulate(c, std::cout);
        if (compare->parsed()) return cmd_compare(c, std::cout);
        if (sweep->parsed()) return cmd_sweep(c, std::cout);
        return cmd_spectrum(c, input, std::cout);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IntegrationError& e) {
        std::cerr << "integration failed: " << e.what() << '\n';
        return kExitIntegration;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
