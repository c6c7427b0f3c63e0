#pragma once

#include "opfield/operator.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace opfield::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest text that still round-trips a double exactly; CSV cells and the
// config echo both use it so reruns are byte-comparable.
std::string format_g17(double x);

// Fully validated run description; unused fields keep their per-command
// defaults so effective_entries can echo the whole thing.
struct RunConfig {
    std::string command;
    std::uint64_t seed = 0;

    int d = 1;
    int n = 4;
    double mass = 1.0;
    double coupling = 0.1;     // lambda
    double alpha = 0.0;
    double beta = 0.3;
    double radius = 1.0;
    double tol = 1e-10;
    int max_iter = 0;
    double shell_floor = 1e-8;
    double start_scale = 0.0;
    double field_scale = 0.3;
    double gs = 0.7;
    double ridge = 1e-3;
    int colors = 2;
    int k = 2;
    int samples = 16;
    int points = 3;
    int level = 2;
    int levels = 4;
    int trials = 50;
    std::string signature = "euclidean";
    std::string manifest;      // qcd-residual only; empty means generate fields
    PotentialCoeffs coeffs;    // c2..cN keys
};

// One key = value per line; '#' starts a comment, blank lines are skipped.
// Duplicate keys within one stream are rejected here; cross-source overrides
// are the caller's business.
std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in,
                                                                 const std::string& origin);

// Validates keys against the command's whitelist and builds the config.
RunConfig parse_config(const std::string& command,
                       const std::vector<std::pair<std::string, std::string>>& pairs);

// File must carry the command key itself.
RunConfig load_config(const std::filesystem::path& path);

// CLI entry: subcommand names the command (the file may repeat it, but must
// agree), and each override is a "key=value" applied after the file.
RunConfig load_config(const std::filesystem::path& path, const std::string& command,
                      const std::vector<std::string>& overrides);

// Echo of the full effective config in a fixed order, numbers in %.17g.
std::vector<std::pair<std::string, std::string>> effective_entries(const RunConfig& cfg);

// Executes the named pipeline and writes report.json plus the command's data
// files under out_dir.  Returns 0, or 2 when the run finished but its
// certificate/check failed; hard errors throw.
int run_command(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace opfield::cli
