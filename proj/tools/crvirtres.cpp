// crvirtres: command-line front end for the virtual-reservation model.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "crvirtres/commands.hpp"

int main(int argc, char** argv) {
  using namespace crvirtres;

  CLI::App app{"Reservation analysis and simulation for secondary spectrum users"};
  std::string command;
  std::string scenario_path;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  std::optional<int> reps;
  app.add_option("command", command, "solve | simulate | validate | optimize | sweep-pft | sweep-pb | "
                                     "sweep-throughput | sweep-mu1 | sweep-cmin | drift")
      ->required();
  app.add_option("--scenario", scenario_path, "Scenario file (defaults apply when omitted)");
  app.add_option("--alpha", alpha, "Forced-termination weight in the reservation cost");
  app.add_option("--seed", seed, "Master RNG seed for simulation commands");
  app.add_option("--horizon", horizon, "Simulated time per replication");
  app.add_option("--reps", reps, "Number of simulation replications");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << usage();
    return kExitInputError;
  }

  Scenario sc;
  try {
    if (!scenario_path.empty()) sc = parse_scenario_file(scenario_path);
    if (alpha) sc.alpha = *alpha;
    if (seed) sc.simulation.seed = *seed;
    if (horizon) sc.simulation.horizon = *horizon;
    if (reps) sc.simulation.replications = *reps;
    validate(sc);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return run_command(command, sc, std::cout, std::cerr);
}
