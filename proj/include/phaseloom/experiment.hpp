#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phaseloom/field.hpp"
#include "phaseloom/noise.hpp"
#include "phaseloom/solvers.hpp"

namespace phaseloom {

// One validation finding, addressed by a JSON-pointer style path into
// the config document.
struct Diagnostic {
    std::string path;
    std::string message;
};

struct StageConfig {
    OperatorKind kind = OperatorKind::AP;
    double relax = 0.0;
    std::size_t iters = 1;
};

struct SolverConfig {
    std::string name;
    std::vector<StageConfig> stages;
};

struct TruthPhaseConfig {
    enum class Kind { Zernike, File, RandomZernike };
    Kind kind = Kind::Zernike;
    std::vector<double> coefficients;       // Kind::Zernike
    std::filesystem::path file;             // Kind::File
    std::size_t random_modes = 15;          // Kind::RandomZernike
    double random_rms = 1.0;
    double random_max_abs = 2.9;            // keeps |phase| clear of the pi wrap
    std::uint64_t random_seed = 0;
};

struct GridConfig {
    std::size_t side = 128;
    bool physical = true;
    double na = 0.25;
    double wavelength_um = 0.633;
    double pixel_um = 0.44;
    double radius_px = 0.0;
};

// Fully resolved experiment description (defaults filled, paths made
// absolute against the config file location).
struct ExperimentConfig {
    GridConfig grid;
    bool diversities_from_files = false;
    std::vector<double> diversity_z;
    std::vector<std::filesystem::path> diversity_files;
    TruthPhaseConfig truth_phase;
    bool amplitude_uniform = true;
    std::filesystem::path amplitude_file;
    NoiseSpec noise;
    std::vector<SolverConfig> solvers;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path outputs;
    std::size_t report_zernike_modes = 37;
    bool report_reference_metrics = true;
    bool record_timing = false;
    bool previews = false;

    nlohmann::ordered_json to_json() const;
};

// Schema and consistency checks; empty result means runnable. base_dir
// anchors relative paths for existence checks.
std::vector<Diagnostic> validate_config(const nlohmann::json& config,
                                        const std::filesystem::path& base_dir);
std::vector<Diagnostic> validate_config_file(const std::filesystem::path& path);

// Requires a config that validates cleanly.
ExperimentConfig resolve_config(const nlohmann::json& config,
                                const std::filesystem::path& base_dir);

// Runs every (solver, seed) pair, writes artifacts under
// config.outputs, returns the process exit code (0 even when individual
// runs diverge; 1 on I/O failure).
int run_experiment(const ExperimentConfig& config);

// File-level entry points used by the CLI: parse + validate + run.
// Exit codes: 0 success, 1 I/O failure, 2 invalid config.
int run_experiment_file(const std::filesystem::path& config_path);

enum class SweepParam { Lambda, Snr, DiversityCount };

SweepParam sweep_param_from_name(const std::string& name);

// Applies each value to a copy of the base config, runs it into a
// per-value subdirectory, and writes a merged sweep summary.
int sweep_file(const std::filesystem::path& config_path, SweepParam param,
               const std::vector<std::string>& values);

// Worker-pool width: PHASELOOM_THREADS when set, hardware concurrency
// otherwise, never below 1.
std::size_t worker_count();

}  // namespace phaseloom
