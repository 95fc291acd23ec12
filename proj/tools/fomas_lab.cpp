#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fomas/commands.hpp"

using namespace fomas;

int main(int argc, char** argv) {
  CLI::App app{"Robust non-fragile consensus design for fractional-order multi-agent systems"};
  app.require_subcommand(1);

  std::string scenario_arg;
  int nc = -1;
  std::string method;
  commands::CommandOptions opts;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_arg, "Scenario JSON file or built-in name")->required();
    sub->add_option("--nc", nc, "Controller order override")->check(CLI::NonNegativeNumber);
    sub->add_option("--method", method, "theorem2 or corollary1")
        ->check(CLI::IsMember({"theorem2", "corollary1"}));
    sub->add_option("--out", opts.out_dir, "Output directory");
    sub->add_flag("--paper-literal-pi", opts.paper_literal_pi,
                  "Use unweighted, unsquared norm terms in the Pi block");
  };
  CLI::App* synth = app.add_subcommand("synth", "Synthesize and certify a controller");
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate the closed loop");
  CLI::App* verify = app.add_subcommand("verify", "Certify closed-loop stability");
  CLI::App* sweep = app.add_subcommand("sweep", "Robustness sweep over uncertainty and fragility");
  CLI::App* show = app.add_subcommand("scenario", "Print a scenario as JSON");
  for (CLI::App* sub : {synth, simulate, verify, sweep, show}) common(sub);
  sweep->add_option("--seed", opts.seed, "Random seed");
  sweep->add_option("--draws", opts.draws, "Number of draws")->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (nc >= 0) opts.n_c = nc;
    if (!method.empty()) opts.method = synthesis::ParseMethod(method);
    const scenario::Scenario s = commands::ApplyOverrides(scenario::Load(scenario_arg), opts);
    if (show->parsed()) {
      std::cout << scenario::ToJson(s).dump(2) << "\n";
      return commands::kOk;
    }
    commands::RunReport r;
    if (synth->parsed()) {
      r = commands::CmdSynth(s, opts);
    } else if (simulate->parsed()) {
      r = commands::CmdSimulate(s, opts);
    } else if (verify->parsed()) {
      r = commands::CmdVerify(s, opts);
    } else {
      r = commands::CmdSweep(s, opts);
    }
    std::cout << r.report.dump(2) << "\n";
    return r.exit_code;
  } catch (const scenario::ScenarioError& e) {
    commands::Log(commands::LogLevel::kError, e.what());
    return commands::kConfigError;
  } catch (const DimensionError& e) {
    commands::Log(commands::LogLevel::kError, e.what());
    return commands::kConfigError;
  } catch (const std::invalid_argument& e) {
    commands::Log(commands::LogLevel::kError, e.what());
    return commands::kConfigError;
  } catch (const std::exception& e) {
    commands::Log(commands::LogLevel::kError, e.what());
    return commands::kSolverFailure;
  }
}
