#pragma once

#include <array>
#include <string>

#include "legodo/so3.hpp"

namespace legodo {

enum class LegId { FL = 0, FR = 1, RL = 2, RR = 3 };

inline constexpr std::array<LegId, 4> kLegOrder = {LegId::FL, LegId::FR,
                                                   LegId::RL, LegId::RR};

const char* leg_name(LegId id);

/// 3-DOF leg: abduction about x at the hip, then thigh and calf pitch about y.
/// axis_signs maps stored joint angles onto the canonical chain so one model
/// class covers left and right legs (left legs use sign +1 on abduction,
/// right legs -1, with the hip link mirrored through hip_offset.y()).
struct LegModel {
    LegId leg_id = LegId::FL;
    Vec3 hip_offset = Vec3::Zero();   // base frame -> abduction axis
    double l_hip = 0.0;               // lateral offset along the abducted y axis
    double l_thigh = 0.0;
    double l_calf = 0.0;
    Vec3 axis_signs = Vec3::Ones();   // per-joint sign convention
    double foot_radius = 0.0;         // added to the calf length for a ball foot
};

struct JointState {
    Vec3 q = Vec3::Zero();
    Vec3 dq = Vec3::Zero();
};

struct FootKinematics {
    Vec3 p_foot = Vec3::Zero();   // foot position in the base frame
    Vec3 v_rel = Vec3::Zero();    // foot velocity relative to base, base frame
    Mat3 jacobian = Mat3::Zero();
};

/// Foot position in the base frame.
Vec3 forward_kinematics(const LegModel& leg, const Vec3& q);

/// Analytic Jacobian d(p_foot)/d(q), 3x3.
Mat3 velocity_jacobian(const LegModel& leg, const Vec3& q);

/// Foot velocity relative to the base, expressed in the base frame:
/// omega_b x p_foot + J(q) dq.  omega_b is the base angular velocity.
Vec3 relative_foot_velocity(const LegModel& leg, const JointState& joints,
                            const Vec3& omega_b);

FootKinematics foot_kinematics(const LegModel& leg, const JointState& joints,
                               const Vec3& omega_b);

/// Dimensions of a Unitree Go2-class quadruped, FL/FR/RL/RR order.
std::array<LegModel, 4> default_go2_legs();

}  // namespace legodo
