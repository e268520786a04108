#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "legodo/contact_fsm.hpp"
#include "legodo/eskf.hpp"
#include "legodo/leg_kinematics.hpp"
#include "legodo/metrics.hpp"

namespace legodo {

enum class GaitType { STAND, TROT };

struct SlipEvent {
    double t_start = 0.0;
    double t_end = 0.0;
    LegId leg = LegId::FL;
    Vec3 slip_velocity = Vec3::Zero();  // world frame, m/s
};

struct GaitConfig {
    GaitType gait = GaitType::TROT;
    Vec3 body_speed = Vec3(0.5, 0.0, 0.0);  // body frame, m/s
    double yaw_rate = 0.0;                  // rad/s
    double step_frequency = 2.0;            // gait cycles per second
    double duty_factor = 0.6;               // stance fraction of a cycle
    double step_height = 0.06;              // swing apex, m
    double body_height = 0.30;              // hip plane above ground, m
    double duration = 60.0;                 // s
    double imu_rate = 500.0;                // Hz

    // Body oscillation riding on the base path (TROT only). Roll rocks with
    // the diagonal-pair exchange at the step frequency; pitch and the
    // vertical bob cycle once per support switch, i.e. at twice the step
    // frequency. Zero amplitudes give a rigid ride.
    double roll_amplitude = 0.0;   // rad
    double pitch_amplitude = 0.0;  // rad
    double bob_amplitude = 0.0;    // m

    NoiseParams noise;        // continuous-time IMU noise densities
    bool noise_enabled = true;
    Vec3 accel_bias = Vec3::Zero();
    Vec3 gyro_bias = Vec3::Zero();
    double force_noise_sigma = 2.0;    // N
    double stance_force_mean = 80.0;   // N

    std::vector<SlipEvent> slip_events;
    std::uint64_t rng_seed = 0;
};

struct ContactTruthSample {
    double t = 0.0;
    ContactPhase phase = ContactPhase::SWING;
    bool is_slipping = false;
};

/// One dataset record per leg per time step.
struct LegSample {
    double t = 0.0;
    LegId leg = LegId::FL;
    Vec3 q = Vec3::Zero();
    Vec3 dq = Vec3::Zero();
    double force = 0.0;
};

struct SimOutput {
    Trajectory ground_truth;  // body pose on the IMU grid
    std::vector<ImuSample> imu;
    std::array<std::vector<LegSample>, 4> legs;
    std::array<std::vector<ContactTruthSample>, 4> contact_truth;
};

/// Closed-form inverse of the 3-DOF serial chain. Throws DataError when the
/// target is outside the reach annulus. forward_kinematics of the result
/// matches the target to 1e-9.
Vec3 inverse_kinematics_3dof(const LegModel& model, const Vec3& p_target_B);

/// Generate a kinematically consistent synthetic trot (or stand) with exact
/// ground truth. Stance feet are pinned to world anchors so a foot in clean
/// stance has exactly zero world velocity; slip events translate the anchor
/// while the force stays loaded.
SimOutput simulate(const GaitConfig& cfg, const std::array<LegModel, 4>& legs);

}  // namespace legodo
