#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mislearn/config.hpp"

namespace mislearn::cli {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides the config seed
    int threads = 1;
};

int cmd_simulate(const KeyValueConfig& cfg, const GlobalArgs& args);
int cmd_fit(const KeyValueConfig& cfg, const GlobalArgs& args);
int cmd_regress(const KeyValueConfig& cfg, const GlobalArgs& args);
int cmd_xsec(const KeyValueConfig& cfg, const GlobalArgs& args);
int cmd_report(const KeyValueConfig& cfg, const GlobalArgs& args);

}  // namespace mislearn::cli
