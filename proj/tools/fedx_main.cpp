// fedx: run, sweep and check federated compositional pairwise risk optimizers.
//
//   fedx run --config <path> [--seed S] [--out <path>]
//   fedx sweep --config <path> --axis K|N --values v1,v2,... --out-dir <dir>
//   fedx oracle --config <path>
//   fedx selftest
//
// Exit codes: 0 success, 2 config error, 3 runtime error, 4 selftest failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedx/errors.hpp"
#include "fedx/harness.hpp"
#include "selftest.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitSelftest = 4;

std::vector<int> parse_values(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw fedx::ConfigError("--values", "'" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw fedx::ConfigError("--values", "no values given");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated optimization of compositional pairwise risks"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  auto* run_cmd = app.add_subcommand("run", "Run one configuration and write its trace");
  run_cmd->add_option("--config", config_path, "Config file")->required();
  run_cmd->add_option("--seed", seed, "Override data and algorithm seed");
  run_cmd->add_option("--out", out_path, "Trace CSV path (overrides output_path)");

  std::string axis;
  std::string values_text;
  std::string out_dir;
  auto* sweep_cmd = app.add_subcommand("sweep", "Vary K or N and summarize");
  sweep_cmd->add_option("--config", config_path, "Base config file")->required();
  sweep_cmd->add_option("--axis", axis, "K or N")->required()->check(CLI::IsMember({"K", "N"}));
  sweep_cmd->add_option("--values", values_text, "Comma-separated values")->required();
  sweep_cmd->add_option("--out-dir", out_dir, "Output directory")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "Exact objective and gradient at w0");
  oracle_cmd->add_option("--config", config_path, "Config file")->required();

  auto* selftest_cmd = app.add_subcommand("selftest", "Run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const fedx::RunEnv env{fedx::threads_from_env(), &std::cout};
    if (*selftest_cmd) return fedx::tools::run_selftest(std::cout) ? 0 : kExitSelftest;

    fedx::RunConfig config = fedx::load_config(config_path);
    if (*run_cmd) {
      if (seed) {
        config.data.seed = *seed;
        config.hyper.seed = *seed;
      }
      if (!out_path.empty()) config.output_path = out_path;
      fedx::run(config, env);
      return 0;
    }
    if (*sweep_cmd) {
      const auto result = fedx::sweep(config, axis == "K" ? fedx::SweepAxis::kK : fedx::SweepAxis::kN,
                                      parse_values(values_text), out_dir, env);
      std::cout << "wrote " << result.rows.size() << " runs to " << out_dir << "\n";
      return 0;
    }
    if (*oracle_cmd) {
      const auto report = fedx::oracle(config);
      std::cout << "objective " << fedx::format_real(report.objective) << "\n"
                << "grad_norm_sq " << fedx::format_real(report.grad_norm_sq) << "\n"
                << "grad";
      for (double g : report.grad) std::cout << ' ' << fedx::format_real(g);
      std::cout << "\n";
      return 0;
    }
  } catch (const fedx::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
