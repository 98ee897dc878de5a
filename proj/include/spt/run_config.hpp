#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spt/sim.hpp"

namespace spt {

/// Contents of a run configuration file (JSON): an optional simulated-market
/// block and a list of portfolio specs ("name" or "name:key=value,...").
struct FileConfig {
    std::optional<SimConfig> sim;
    std::vector<std::string> portfolios;
    std::string data_path;
    std::string universe_path;
    std::string out_dir;
};

FileConfig load_config(const std::string& path);

} // namespace spt
