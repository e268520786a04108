#pragma once

#include "legodo/contact_fsm.hpp"
#include "legodo/leg_kinematics.hpp"
#include "legodo/so3.hpp"

namespace legodo {

struct FusionConfig {
    double sigma_base = 1.0;  // m/s, measurement noise at full confidence
    double epsilon = 1e-6;    // confidence floor; caps sigma at sigma_base/eps
    // When set, a stance vote from the force FSM is dropped if the kinematic
    // score is exactly zero, instead of updating with a huge covariance.
    bool strict_stationarity = false;
};

struct ContactAssessment {
    LegId leg_id = LegId::FL;
    ContactPhase fsm_phase = ContactPhase::SWING;
    double glrt_statistic = 0.0;
    double q_fsm = 0.0;
    double q_glrt = 0.0;
    double q_final = 0.0;
    double sigma = 0.0;
    Mat3 R_meas = Mat3::Identity();
    bool stance_gate = false;  // whether a zero-velocity update is attempted
};

/// Soft AND-gate of the two detector scores plus the adaptive measurement
/// covariance. The binary decision to attempt an update comes from the
/// debounced FSM phase; the continuous confidence only shapes R_meas.
ContactAssessment fuse(double q_fsm, double q_glrt, ContactPhase fsm_phase,
                       const FusionConfig& cfg);

}  // namespace legodo
