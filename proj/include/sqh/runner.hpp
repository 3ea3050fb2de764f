#pragma once
#include <string>
#include <vector>

#include "sqh/config.hpp"

namespace sqh {

inline constexpr const char* kLibraryName = "squeezed-harmonics";
inline constexpr const char* kLibraryVersion = "1.0.0";
inline constexpr int kManifestSchemaVersion = 1;

struct RunOptions {
  std::string out_dir = ".";
  int threads = 0;            // 0: SQHARM_THREADS env or hardware default
  bool allow_expensive = false;
};

struct RunResult {
  std::vector<std::string> output_files;  // paths of written data files
  std::string manifest_path;
};

// Execute the scenario described by the configuration. The 'task' key
// selects the computation; every task writes plot-ready CSV files plus a
// run manifest (JSON) with the config hash and per-file checksums. Output
// data files are byte-identical across reruns of the same config.
RunResult run_scenario(const Config& cfg, const RunOptions& opt);

// Canned figure registry. Each id maps to one configuration file shipped in
// the repository's configs/ directory (override the directory with the
// SQHARM_CONFIG_DIR environment variable).
std::vector<std::string> figure_ids();
std::string figure_config_path(const std::string& id);
RunResult reproduce_figure(const std::string& id, const RunOptions& opt);

// Validate without running. Throws ConfigError on problems.
void validate_config(const Config& cfg);

// Re-run a spectrum configuration at a refined grid (time step halved, both
// momentum counts doubled, same extents) and report the largest relative
// change over reported band photon numbers. Returns that change.
double convergence_check(const Config& cfg, const RunOptions& opt);

int resolve_threads(int requested);

}  // namespace sqh
