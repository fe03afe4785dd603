#pragma once

#include "pandora/contracts.hpp"
#include "pandora/error.hpp"

#include <cstddef>
#include <filesystem>
#include <string>

namespace pandora::cli {

enum ExitCode : int { kOk = 0, kOther = 1, kValidation = 2, kInfeasible = 3, kBudget = 4 };

ExitCode exit_code(ErrorCode code) noexcept;

/// CSV with header `y,wage,principal` on a uniform grid over [0, y_max] plus every breakpoint in range.
std::string emit_plot_data(const Contract& w, double y_max, std::size_t n);

struct RunOptions {
    /// Base for relative output paths; empty selects PANDORA_OUTPUT_DIR or the working directory.
    std::filesystem::path output_dir;
    bool quiet = false;
};

/// Executes a scenario file and writes its report files; returns the process exit code.
int run_scenario(const std::filesystem::path& path, const RunOptions& opts = {});

/// Entry point of the `pandora` executable.
int main(int argc, char** argv);

} // namespace pandora::cli
