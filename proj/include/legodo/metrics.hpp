#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "legodo/so3.hpp"

namespace legodo {

struct TimedPose {
    double t = 0.0;
    Vec3 p = Vec3::Zero();
    Rot3 R = Rot3::Identity();
};

using Trajectory = std::vector<TimedPose>;

/// Heading of the body x axis projected to the world horizontal plane, rad.
double yaw_of(const Rot3& R);

/// Wrap an angle in degrees to (-180, 180].
double wrap_deg(double deg);

double path_length(const Trajectory& traj);

/// Nearest-timestamp pairing, one pair per ground-truth pose; pairs farther
/// apart than max_dt are dropped. Throws DataError when nothing survives.
std::vector<std::pair<std::size_t, std::size_t>> associate(
    const Trajectory& est, const Trajectory& gt, double max_dt = 0.05);

double ate_rmse(const Trajectory& est, const Trajectory& gt,
                const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

double ahe_rmse_deg(
    const Trajectory& est, const Trajectory& gt,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

struct RpeResult {
    double trans_pct = 0.0;
    double rot_deg_per_m = 0.0;
    std::size_t segments = 0;
};

/// Relative error over all segments spanning delta_m of ground-truth arc
/// length. Empty when the trajectory is too short to form one segment.
std::optional<RpeResult> rpe(
    const Trajectory& est, const Trajectory& gt,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
    double delta_m = 10.0);

struct EndpointMetrics {
    double fpe_m = 0.0;
    double drift_pct = 0.0;
    double length_err_pct = 0.0;
};

/// Final-position error plus drift and path-length error, both as percent of
/// ground-truth path length. Throws DataError below 0.1 m of path.
EndpointMetrics endpoint_metrics(const Trajectory& est, const Trajectory& gt);

/// Discrete Frechet distance between two polylines; inputs longer than 5000
/// points are subsampled with a uniform stride first.
double discrete_frechet(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

enum class Alignment { NONE, FIRST_POSE, UMEYAMA };

/// Rigidly re-express `est` so that its first pose (or, for UMEYAMA, its
/// least-squares fit) coincides with `gt`. NONE returns the input unchanged.
Trajectory align_trajectory(const Trajectory& est, const Trajectory& gt,
                            Alignment mode);

struct EvalOptions {
    double max_dt = 0.05;     // association tolerance, s
    double rpe_delta_m = 10;  // segment length, m
    Alignment alignment = Alignment::NONE;
};

struct MetricReport {
    double ate_m = 0.0;
    double ahe_deg = 0.0;
    std::optional<double> rpe_trans_pct;
    std::optional<double> rpe_rot_deg_per_m;
    double fpe_m = 0.0;
    double drift_pct = 0.0;
    double length_err_pct = 0.0;
    double frechet_m = 0.0;

    std::size_t pair_count = 0;
    std::size_t rpe_segments = 0;
    std::size_t est_poses = 0;
    std::size_t gt_poses = 0;
};

MetricReport evaluate(const Trajectory& est, const Trajectory& gt,
                      const EvalOptions& opts = {});

/// Stable-key JSON rendering of the report (two-space indent, '\n' EOL).
std::string report_to_json(const MetricReport& report);

}  // namespace legodo
