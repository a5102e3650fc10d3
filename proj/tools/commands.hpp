#pragma once

namespace CLI {
class App;
}

// Each register_* wires one subcommand onto the app. Callbacks write the
// process exit code into rc: 0 converged / success, 3 not converged. Errors
// are reported by throwing; main turns them into exit code 1.
void register_diagnose(CLI::App& app, int& rc);
void register_threshold(CLI::App& app, int& rc);
void register_ess(CLI::App& app, int& rc);
void register_simulate(CLI::App& app, int& rc);
void register_monitor(CLI::App& app, int& rc);
void register_reproduce(CLI::App& app, int& rc);
