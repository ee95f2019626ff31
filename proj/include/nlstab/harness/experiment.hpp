#pragma once

#include "nlstab/harness/config.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace nlstab::harness {

std::string tool_version();

struct RunManifest {
    std::string pipeline;
    std::string config_hash;
    std::string tool_version;
    std::uint64_t seed = 0;
    /// (step, seconds) in execution order. Timings are the only
    /// non-deterministic content of a run.
    std::vector<std::pair<std::string, double>> timings;
    /// File names relative to the output directory, sorted; includes the
    /// manifest itself.
    std::vector<std::string> files;
    bool complete = false;
    std::vector<std::string> failures;
};

/// Validates the config, builds the domain and checks every law for
/// admissibility before anything is written; a failure there throws and
/// leaves no files. Then runs the pipeline, writes its CSV/JSON artifacts,
/// the canonical config (config.txt) and manifest.json into `out`. A solver
/// failure mid-run is recorded in the manifest (complete = false) next to the
/// artifacts written so far.
RunManifest run_experiment(const ExperimentConfig& config, const std::filesystem::path& out, int workers = 1);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

} // namespace nlstab::harness
