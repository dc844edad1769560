#pragma once

#include "c2fmc/config.hpp"
#include "c2fmc/denoiser.hpp"
#include "c2fmc/forward.hpp"
#include "c2fmc/motion_sim.hpp"
#include "c2fmc/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

// File-level workflows behind the command-line tool. Each writer stages its
// outputs in a sibling temporary directory and renames it into place, so a
// failed run never leaves a half-written output directory.
namespace c2f::app {

namespace fs = std::filesystem;

enum class MotionKind { none, smooth, rigid };

struct SimulationConfig {
    std::uint64_t seed = 0;
    int n_states = 8;
    double acceleration = 8.0;  // of the combined mask before partitioning
    double density_decay = 2.0;
    AcsMode acs_mode = AcsMode::disjoint;
    int acs_width = 0;
    int n_coils = 4;
    MotionKind motion = MotionKind::smooth;
    double max_disp = 15.0;
    double damping = 2.0;
    double rigid_deg = 5.0;
    double rigid_px = 5.0;
    double sigma_meas = 0.0;

    void validate() const;
};

SimulationConfig simulation_config_from(const KeyValues &kv);
void write_simulation_config(const SimulationConfig &cfg, KeyValues &kv);

struct Simulation {
    MotionProblem problem;
    std::vector<DisplacementField> fields;
};

// Masks, fields, coil maps and noisy measurements for a ground-truth image.
// All randomness comes from cfg.seed.
Simulation simulate(const ComplexImage &truth, const SimulationConfig &cfg);

// Problem directory layout: maps, mask_<k>, field_<k>, data_<k>, truth (all
// CFL) and manifest.txt.
void write_problem(const fs::path &dir, const Simulation &sim, const ComplexImage *truth, const KeyValues &manifest);

struct LoadedProblem {
    MotionProblem problem;
    std::optional<ComplexImage> truth;
    std::vector<DisplacementField> true_fields;  // empty when not stored
    KeyValues manifest;
};
LoadedProblem read_problem(const fs::path &dir);

// Stem of every .cfl file directly inside `dir`, sorted by name.
std::vector<fs::path> cfl_stems(const fs::path &dir);
PowerSpectrum spectrum_from_dir(const fs::path &dir);

struct ReconRequest {
    fs::path problem_dir;
    fs::path spectrum;  // CFL stem
    ReconConfig config;
};

// Serialises a request so `request_from_manifest` reproduces it exactly.
KeyValues request_manifest(const ReconRequest &req);
ReconRequest request_from_manifest(const KeyValues &kv);

struct ReconOutputs {
    ReconResult result;
    std::optional<double> nrmse;
    std::optional<double> zero_filled_nrmse;
};

// Loads inputs, reconstructs, and writes image, field_<k>, metrics.txt,
// manifest.txt and PGM renderings into out_dir. out_dir must not exist.
ReconOutputs reconstruct_to_dir(const ReconRequest &req, const fs::path &out_dir);

// Writes files into a fresh temporary sibling of `dir` via `fill`, then
// renames it to `dir`. Throws if `dir` already exists.
template <class Fill>
void write_directory(const fs::path &dir, Fill &&fill) {
    if (fs::exists(dir)) throw std::runtime_error("output directory already exists: " + dir.string());
    const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
    fs::create_directories(parent);
    std::random_device rd;
    const fs::path staging = parent / ("." + dir.filename().string() + ".partial-" + std::to_string(rd()));
    fs::create_directory(staging);
    try {
        fill(staging);
        fs::rename(staging, dir);
    } catch (...) {
        std::error_code ec;
        fs::remove_all(staging, ec);
        throw;
    }
}

}  // namespace c2f::app
