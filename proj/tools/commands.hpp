#pragma once

#include "run_config.hpp"

#include <burgers/csv.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kBudgetError = 3 };

// Result files of one run: <dir>/<stem>.csv, <dir>/<stem>-<part>.csv.
class OutputSet {
public:
    OutputSet(std::filesystem::path dir, std::string stem);

    std::ofstream open(std::string_view part = {});
    const std::vector<std::filesystem::path>& files() const { return files_; }
    std::filesystem::path manifest_path() const;
    const std::string& stem() const { return stem_; }

private:
    std::filesystem::path dir_;
    std::string stem_;
    std::vector<std::filesystem::path> files_;
};

struct Context {
    const Config& config;
    RunSettings settings;
    OutputSet& out;
    std::ostream& log;
};

using Handler = void (*)(Context&);

struct CommandInfo {
    std::string_view name;
    std::string_view summary;
    Handler handler;
};

const std::vector<CommandInfo>& command_table();

struct Invocation {
    std::string command;
    std::filesystem::path config_path;
    std::filesystem::path out_dir = ".";
    Overrides overrides;
};

// Loads the config, writes the manifest, runs the command and maps failures to
// exit codes.
int run(const Invocation& inv, std::ostream& log, std::ostream& err);

}  // namespace cli
