#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Convergence diagnostics and sequential termination for MCMC output"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");

  int rc = 0;
  register_diagnose(app, rc);
  register_threshold(app, rc);
  register_ess(app, rc);
  register_simulate(app, rc);
  register_monitor(app, rc);
  register_reproduce(app, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version exit 0; any parse failure is 1
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return rc;
}
