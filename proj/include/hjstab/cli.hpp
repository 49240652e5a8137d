#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "hjstab/config.hpp"

namespace hjstab {

enum class Subcommand { Aubry, Certify, Evolve, Stability, Periodic, Example1, Example2 };

std::optional<Subcommand> parse_subcommand(std::string_view name) noexcept;

struct RunOptions {
    std::filesystem::path out_dir = ".";
    bool quiet = false;
};

/// Executes one subcommand and writes its outputs under out_dir.
/// Returns 0 when every check passes, 1 otherwise.
int run(const ExperimentConfig& config, Subcommand subcommand, const RunOptions& options);

/// Command-line entry point: 0 all pass, 1 any FAIL, 2 config error.
int cli_main(int argc, char** argv);

}  // namespace hjstab
