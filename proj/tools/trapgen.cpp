// trapgen: batch front end for simulations, Talbot studies, darkness sweeps
// and the constants table. Exit codes: 0 ok, 2 config/validation, 3 numerical.

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "trapgen/error.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void add_run_options(CLI::App* sub, trapgen::cli::RunOptions& opt, std::uint64_t& seed) {
  sub->add_option("--config", opt.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", opt.out_dir, "output directory (created after validation)");
  sub->add_option("--seed", seed, "override the source seed");
  sub->add_option("--threads", opt.threads, "worker threads, 0 = hardware concurrency");
  sub->add_flag("--verify-fft", opt.verify_fft, "cross-check analytic and FFT results inline");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Designs and simulates passive 4f-filtered optical trap arrays"};
  app.require_subcommand(1);

  trapgen::cli::RunOptions opt;
  std::uint64_t seed = 0;
  int digits = 3;

  auto* simulate = app.add_subcommand("simulate", "4f simulation with metrics, profiles and field dumps");
  auto* talbot = app.add_subcommand("talbot", "coherent and incoherent Talbot-plane study");
  auto* sweep = app.add_subcommand("sweep", "darkness maps over relative phase and iris radius");
  auto* constants = app.add_subcommand("constants", "print the regression constants as CSV");
  for (auto* sub : {simulate, talbot, sweep}) add_run_options(sub, opt, seed);
  constants->add_option("--digits", digits, "significant figures")->check(CLI::Range(1, 17));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  for (auto* sub : {simulate, talbot, sweep}) {
    if (sub->parsed() && sub->count("--seed") > 0) opt.seed = seed;
  }

  try {
    if (simulate->parsed()) trapgen::cli::cmd_simulate(opt, std::cerr);
    if (talbot->parsed()) trapgen::cli::cmd_talbot(opt, std::cerr);
    if (sweep->parsed()) trapgen::cli::cmd_sweep(opt, std::cerr);
    if (constants->parsed()) trapgen::cli::cmd_constants(std::cout, digits);
  } catch (const trapgen::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const trapgen::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const trapgen::InvalidProfile& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const trapgen::Error& e) {
    // Invalid arguments, geometry, range, aliasing and infeasible balances.
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
