#pragma once

#include <array>
#include <string>

#include "legodo/contact_fsm.hpp"
#include "legodo/contact_glrt.hpp"
#include "legodo/eskf.hpp"
#include "legodo/fusion.hpp"
#include "legodo/gait_sim.hpp"
#include "legodo/leg_kinematics.hpp"

namespace legodo {

/// Symmetric quadruped geometry; expands to four mirrored leg models.
struct RobotParams {
    double hip_x = 0.1934;      // fore/aft hip offset from body center, m
    double hip_y = 0.0465;      // lateral hip offset, m
    double l_hip = 0.0955;      // abduction link length, m
    double l_thigh = 0.213;     // m
    double l_calf = 0.213;      // m
    double foot_radius = 0.0;   // m
};

std::array<LegModel, 4> make_legs(const RobotParams& params);

struct MetricsConfig {
    double assoc_max_dt = 0.05;  // s, association window
    double rpe_delta_m = 10.0;   // m, relative-error segment length
};

struct FilterInitConfig {
    double pos_var = 0.01;        // m^2
    double vel_var = 0.01;        // (m/s)^2
    double att_var = 1e-4;        // rad^2
    double accel_bias_var = 2.5e-3;
    double gyro_bias_var = 1e-4;
    double init_window = 0.5;     // s of data buffered before filtering
};

/// Everything the simulator, estimator, and evaluator need, loadable from a
/// single JSON file. Missing keys keep their defaults.
struct PipelineConfig {
    RobotParams robot;
    NoiseParams noise;
    FsmConfig fsm;
    GlrtConfig glrt;
    FusionConfig fusion;
    GateConfig gate;
    FilterInitConfig init;
    MetricsConfig metrics;
    GaitConfig sim;
};

Mat15 initial_covariance(const FilterInitConfig& init);

PipelineConfig default_config();
PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& cfg, const std::string& path);

}  // namespace legodo
