#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "dsgda/config.hpp"

namespace dsgda {

struct CliOptions {
  std::optional<std::string> out_dir;
  int workers = 1;
  std::optional<std::uint64_t> seed_base;
};

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // run diverged, checks failed, all cells failed
inline constexpr int kExitUsage = 2;    // config or input errors

// --out wins over DSGDA_OUT_DIR, which wins over the config's directory.
std::string resolve_out_dir(const std::string& configured, const CliOptions& opt);

int cmd_run(const std::string& config_path, const CliOptions& opt, std::ostream& out,
            std::ostream& err);
int cmd_sweep(const std::string& config_path, const CliOptions& opt, std::ostream& out,
              std::ostream& err);
int cmd_bounds(const std::string& constants_path, const CliOptions& opt, std::ostream& out,
               std::ostream& err);
// `target` is a matrix file or a topology name; names need `m`.
int cmd_validate_topology(const std::string& target, int m, const std::string& weighting,
                          std::ostream& out, std::ostream& err);

}  // namespace dsgda
