#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "fpnet/cli.hpp"

namespace {

struct Flags {
  std::optional<std::string> problem, mode, config;
  std::optional<double> p, gamma, tol;
  std::optional<std::int64_t> seed, max_iters;
  std::string out = ".";
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--problem", f.problem, "lasso_huber | lasso_augmented | minimax_fir | minimax_fir_split | svm | sparse_equalizer");
  cmd->add_option("--mode", f.mode, "sync | async");
  cmd->add_option("--p", f.p, "trigger probability for async mode");
  cmd->add_option("--gamma", f.gamma, "damping in (0, 1]");
  cmd->add_option("--seed", f.seed, "trigger seed");
  cmd->add_option("--tol", f.tol, "relative self-residual tolerance");
  cmd->add_option("--max-iters", f.max_iters, "iteration budget");
  cmd->add_option("--config", f.config, "JSON configuration file");
  cmd->add_option("--out", f.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-point network solver"};
  app.require_subcommand(1);
  Flags flags;
  for (const char* name : {"run", "verify", "compare"}) {
    add_flags(app.add_subcommand(name, std::string(name) == "run"      ? "run an experiment and write a trace"
                                       : std::string(name) == "verify" ? "check convergence certificates"
                                                                       : "compare against a reference solver"),
              flags);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fpnet::cli::kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    nlohmann::json j = nlohmann::json::object();
    if (flags.config) {
      try {
        j = nlohmann::json::parse(fpnet::read_text_file(*flags.config));
      } catch (const nlohmann::json::parse_error& e) {
        throw fpnet::ConfigError(std::string("config: invalid JSON: ") + e.what());
      }
    }
    if (!j.is_object()) throw fpnet::ConfigError("config: expected a JSON object");
    if (flags.problem) j["problem"] = *flags.problem;
    if (flags.mode) j["mode"] = *flags.mode;
    if (flags.p) j["p"] = *flags.p;
    if (flags.gamma) j["gamma"] = *flags.gamma;
    if (flags.seed) j["seed"] = *flags.seed;
    if (flags.tol) j["tol"] = *flags.tol;
    if (flags.max_iters) j["max_iters"] = *flags.max_iters;
    const fpnet::cli::RunConfig cfg = fpnet::cli::config_from_json(j);
    return fpnet::cli::dispatch(command, cfg, flags.out);
  } catch (const fpnet::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fpnet::cli::kConfigError;
  }
}
