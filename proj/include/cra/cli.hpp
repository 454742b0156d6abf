#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cra/api.hpp"
#include "cra/miner.hpp"

namespace cra::cli {

inline constexpr std::uint64_t kDefaultSeed = 42;

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitRuntime = 2 };

/// Resolved settings. Precedence, highest first: command-line flag,
/// environment variable, config file, built-in default.
struct CliConfig {
  std::filesystem::path store = "cra.db";
  miner::MinerConfig miner;
  /// Default artifact for predict when --model is not given.
  std::filesystem::path model;
  std::uint64_t seed = kDefaultSeed;
  std::string log_level = "info";
  /// Holds lexicons/; empty means textfeat::default_data_dir().
  std::filesystem::path data_dir;

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path static_dir;
  std::string deep_link_template;
  std::vector<api::UserAccount> users;
  long long session_ttl_seconds = 8 * 3600;
};

/// Reads a JSON config file. Unknown keys are rejected so typos surface.
/// Throws InvalidArgument or IoFailure.
CliConfig load_config(const std::filesystem::path& file, CliConfig base = {});

/// Applies CRA_STORE, CRA_MODEL, CRA_SEED, CRA_LOG_LEVEL, CRA_DATA_DIR and
/// CRA_MINER_URL from `env`. The miner credential is read by the miner
/// itself and never passes through here.
CliConfig apply_env(CliConfig config, const std::map<std::string, std::string>& env);

/// Snapshot of the process environment restricted to the CRA_ variables.
std::map<std::string, std::string> process_env();

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cra::cli
