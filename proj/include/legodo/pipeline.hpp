#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "legodo/config.hpp"
#include "legodo/dataset_io.hpp"
#include "legodo/metrics.hpp"

namespace legodo {

enum class DetectorMode { FSM, GLRT, FUSED };

const char* detector_name(DetectorMode mode);
DetectorMode parse_detector(const std::string& name);  // throws DataError

struct RunOptions {
    DetectorMode detector = DetectorMode::FUSED;
    std::optional<double> sigma_base;  // overrides the config value when set
    std::string diagnostics_path;      // per-step CSV; empty disables
};

struct RunStats {
    std::uint64_t frames = 0;
    std::uint64_t propagations = 0;
    std::uint64_t updates_accepted = 0;
    std::uint64_t updates_rejected = 0;
    std::uint64_t updates_skipped = 0;
    std::uint64_t invalid_leg_samples = 0;
    std::uint64_t timing_gaps = 0;  // inter-frame dt above 0.1 s
};

struct RunResult {
    Trajectory est;  // one pose per frame
    NominalState final_state;
    RunStats stats;
};

/// Streams merged frames through the error-state filter. The first
/// `init_window` seconds seed the initial state (gravity roll/pitch, stance
/// legs for velocity, ground truth for position and yaw when supplied), then
/// every frame is filtered. Throws NumericalError if the state stops being
/// finite.
RunResult run_estimator(const std::vector<SyncedFrame>& frames,
                        const PipelineConfig& cfg, const RunOptions& opts,
                        const Trajectory* gt_seed = nullptr);

// Command entry points shared by the CLI and the test suite. They catch
// domain errors and translate them to exit codes: 0 ok, 2 data error,
// 3 numerical failure. Messages go to stderr.
int cmd_sim(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override = std::nullopt);
int cmd_run(const std::string& dataset_dir, const std::string& config_path,
            const std::string& out_dir, const RunOptions& opts);
int cmd_eval(const std::string& est_path, const std::string& gt_path,
             const std::string& out_dir, bool svg = false);

}  // namespace legodo
