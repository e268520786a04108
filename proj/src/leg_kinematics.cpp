#include "legodo/leg_kinematics.hpp"

namespace legodo {

const char* leg_name(LegId id) {
    switch (id) {
        case LegId::FL: return "FL";
        case LegId::FR: return "FR";
        case LegId::RL: return "RL";
        case LegId::RR: return "RR";
    }
    return "??";
}

Vec3 forward_kinematics(const LegModel& leg, const Vec3& q) {
    const double s1 = leg.axis_signs.x();
    const double s2 = leg.axis_signs.y();
    const double s3 = leg.axis_signs.z();

    const Mat3 rx1 = rot_x(s1 * q.x());
    const Mat3 ry2 = rot_y(s2 * q.y());
    const Mat3 ry3 = rot_y(s3 * q.z());

    const Vec3 hip_link(0.0, s1 * leg.l_hip, 0.0);
    const Vec3 thigh_link(0.0, 0.0, -leg.l_thigh);
    const Vec3 calf_link(0.0, 0.0, -(leg.l_calf + leg.foot_radius));

    return leg.hip_offset +
           rx1 * (hip_link + ry2 * (thigh_link + ry3 * calf_link));
}

Mat3 velocity_jacobian(const LegModel& leg, const Vec3& q) {
    const double s1 = leg.axis_signs.x();
    const double s2 = leg.axis_signs.y();
    const double s3 = leg.axis_signs.z();

    const Mat3 rx1 = rot_x(s1 * q.x());
    const Mat3 ry2 = rot_y(s2 * q.y());
    const Mat3 ry3 = rot_y(s3 * q.z());

    const Vec3 hip_link(0.0, s1 * leg.l_hip, 0.0);
    const Vec3 thigh_link(0.0, 0.0, -leg.l_thigh);
    const Vec3 calf_link(0.0, 0.0, -(leg.l_calf + leg.foot_radius));

    const Vec3 calf_rot = ry3 * calf_link;
    const Vec3 below_hip = ry2 * (thigh_link + calf_rot);
    const Vec3 ex = Vec3::UnitX();
    const Vec3 ey = Vec3::UnitY();

    Mat3 j;
    j.col(0) = s1 * ex.cross(rx1 * (hip_link + below_hip));
    j.col(1) = s2 * rx1 * ey.cross(below_hip);
    j.col(2) = s3 * rx1 * (ry2 * ey.cross(calf_rot));
    return j;
}

Vec3 relative_foot_velocity(const LegModel& leg, const JointState& joints,
                            const Vec3& omega_b) {
    const Vec3 p_foot = forward_kinematics(leg, joints.q);
    return omega_b.cross(p_foot) + velocity_jacobian(leg, joints.q) * joints.dq;
}

FootKinematics foot_kinematics(const LegModel& leg, const JointState& joints,
                               const Vec3& omega_b) {
    FootKinematics m;
    m.p_foot = forward_kinematics(leg, joints.q);
    m.jacobian = velocity_jacobian(leg, joints.q);
    m.v_rel = omega_b.cross(m.p_foot) + m.jacobian * joints.dq;
    return m;
}

std::array<LegModel, 4> default_go2_legs() {
    std::array<LegModel, 4> legs;
    const double kx = 0.1934;
    const double ky = 0.0465;
    const double l_hip = 0.0955;
    const double l_thigh = 0.213;
    const double l_calf = 0.213;

    auto make = [&](LegId id, double sx, double sy, double s1) {
        LegModel leg;
        leg.leg_id = id;
        leg.hip_offset = Vec3(sx * kx, sy * ky, 0.0);
        leg.l_hip = l_hip;
        leg.l_thigh = l_thigh;
        leg.l_calf = l_calf;
        leg.axis_signs = Vec3(s1, 1.0, 1.0);
        return leg;
    };

    legs[static_cast<int>(LegId::FL)] = make(LegId::FL, 1.0, 1.0, 1.0);
    legs[static_cast<int>(LegId::FR)] = make(LegId::FR, 1.0, -1.0, -1.0);
    legs[static_cast<int>(LegId::RL)] = make(LegId::RL, -1.0, 1.0, 1.0);
    legs[static_cast<int>(LegId::RR)] = make(LegId::RR, -1.0, -1.0, -1.0);
    return legs;
}

}  // namespace legodo
