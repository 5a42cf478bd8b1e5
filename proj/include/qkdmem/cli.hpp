#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qkdmem {

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::string> out;
    std::optional<std::string> format;
};

int cmd_simulate(const std::string& config_path, const CliOverrides& ov);
int cmd_demo(const std::string& which, const std::string& out_dir);
int cmd_analyze(const std::string& ids_csv, const std::vector<std::string>& files,
                const CliOverrides& ov);

// Exit codes: 0 success, 2 usage/config errors, 3 runtime failures.
int run_cli(int argc, char** argv);

}  // namespace qkdmem
