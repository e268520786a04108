#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "legodo/eskf.hpp"
#include "legodo/gait_sim.hpp"
#include "legodo/leg_kinematics.hpp"
#include "legodo/metrics.hpp"

namespace legodo {

/// One joint-encoder + force record for a single leg.
struct LegMeasurement {
    double t = 0.0;
    LegId leg_id = LegId::FL;
    Vec3 q = Vec3::Zero();
    Vec3 q_dot = Vec3::Zero();
    double force = 0.0;  // N, clamped to >= 0 on read
};

/// One merged 500 Hz processing step: an IMU sample plus all four legs.
struct SyncedFrame {
    double t = 0.0;
    ImuSample imu;
    std::array<LegMeasurement, 4> legs;
};

struct MergeStats {
    std::uint64_t frames_emitted = 0;
    std::uint64_t frames_dropped = 0;   // IMU samples missing >=1 leg match
    std::uint64_t forces_clamped = 0;   // negative force readings zeroed
};

struct DatasetManifest {
    std::string name;
    double sensor_rate = 500.0;  // Hz
    std::string imu_path;
    std::string legs_path;
    std::string gt_path;        // may be empty
    std::string contacts_path;  // may be empty
    std::string robot = "go2";  // robot-parameter preset or config reference
};

// Stream writers. Times print with fixed microsecond precision, values with
// 17 significant digits so a read-back is bit-exact.
void write_imu_csv(const std::string& path, const std::vector<ImuSample>& imu);
void write_legs_csv(const std::string& path,
                    const std::array<std::vector<LegSample>, 4>& legs);
void write_contacts_csv(
    const std::string& path,
    const std::array<std::vector<ContactTruthSample>, 4>& contacts);

std::vector<ImuSample> read_imu_csv(const std::string& path);
std::vector<LegMeasurement> read_legs_csv(const std::string& path,
                                          std::uint64_t* clamped = nullptr);

/// Trajectory file format: `t x y z qw qx qy qz`, space separated, one pose
/// per line, `#` starts a comment. Quaternions are written w-first with
/// qw >= 0 and must be unit to 1e-6 on read.
void write_trajectory(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory(const std::string& path);

void write_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

/// Single-consumer merged-frame iterator over an imu.csv / legs.csv pair.
/// Each IMU sample is matched with the nearest record of every leg within
/// `merge_tolerance` seconds; samples missing any leg are dropped and
/// counted.
class DatasetReader {
  public:
    DatasetReader(const std::string& imu_path, const std::string& legs_path,
                  double merge_tolerance = 1e-3);

    std::optional<SyncedFrame> next();
    const MergeStats& stats() const { return stats_; }

  private:
    std::vector<ImuSample> imu_;
    std::array<std::vector<LegMeasurement>, 4> legs_;
    std::array<std::size_t, 4> cursors_{};
    std::size_t imu_cursor_ = 0;
    double tol_;
    MergeStats stats_;
};

/// Drains a DatasetReader; `stats` (optional) receives the merge counters.
std::vector<SyncedFrame> read_frames(const std::string& imu_path,
                                     const std::string& legs_path,
                                     MergeStats* stats = nullptr,
                                     double merge_tolerance = 1e-3);

}  // namespace legodo
