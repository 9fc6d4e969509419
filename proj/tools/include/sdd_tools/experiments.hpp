#pragma once

#include "sdd_tools/config.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sdd::tools {

struct RunContext {
    std::filesystem::path output_dir = ".";
    unsigned workers = 1;
    std::uint64_t seed = 1;
};

struct RunSummary {
    std::vector<std::string> outputs;            // file names inside output_dir
    std::map<std::string, std::string> derived;  // headline numbers echoed in the manifest
};

const std::vector<std::string>& experiment_names();
std::string experiment_description(const std::string& name);

// Reads the experiment's keys from cfg, rejects unknown keys, runs it and
// writes its CSV files into ctx.output_dir.
RunSummary run_experiment(const std::string& name, Config& cfg, const RunContext& ctx);

void write_manifest(const std::filesystem::path& path, const std::string& name, const std::string& config_path,
                    const Config& cfg, const RunContext& ctx, const RunSummary& summary);

// 0 success, 2 configuration error, 3 simulation error.
int exit_code(const Error& e);

} // namespace sdd::tools
