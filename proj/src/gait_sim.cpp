#include "legodo/gait_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "legodo/errors.hpp"

namespace legodo {

namespace {

struct BodyState {
    Vec3 p = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    Vec3 a = Vec3::Zero();
    Rot3 R = Rot3::Identity();
    Vec3 omega = Vec3::Zero();  // body frame
};

/// Constant body-frame velocity + constant yaw rate arc, closed form, with an
/// optional gait-locked attitude/height oscillation on top.
class BodyPath {
  public:
    BodyPath(const GaitConfig& cfg) {
        if (cfg.gait == GaitType::TROT) {
            v_body_ = Vec3(cfg.body_speed.x(), cfg.body_speed.y(), 0.0);
            omega_z_ = cfg.yaw_rate;
            roll_amp_ = cfg.roll_amplitude;
            pitch_amp_ = cfg.pitch_amplitude;
            bob_amp_ = cfg.bob_amplitude;
            w_roll_ = 2.0 * M_PI * cfg.step_frequency;
            w_pitch_ = 2.0 * w_roll_;
        }
        height_ = cfg.body_height;
    }

    BodyState at(double t) const {
        BodyState s;
        const double yaw = omega_z_ * t;
        const double roll = roll_amp_ * std::sin(w_roll_ * t);
        const double pitch = pitch_amp_ * std::sin(w_pitch_ * t + 0.4);
        const double roll_dot = roll_amp_ * w_roll_ * std::cos(w_roll_ * t);
        const double pitch_dot =
            pitch_amp_ * w_pitch_ * std::cos(w_pitch_ * t + 0.4);
        s.R = rot_z(yaw) * rot_y(pitch) * rot_x(roll);
        // Z-Y-X Euler rates mapped to body rates.
        const double sr = std::sin(roll);
        const double cr = std::cos(roll);
        const double sp = std::sin(pitch);
        const double cp = std::cos(pitch);
        s.omega = Vec3(roll_dot - omega_z_ * sp,
                       pitch_dot * cr + omega_z_ * cp * sr,
                       -pitch_dot * sr + omega_z_ * cp * cr);
        const Rot3 yaw_R = rot_z(yaw);
        s.v = yaw_R * v_body_;
        s.a = omega_z_ * Vec3(0.0, 0.0, 1.0).cross(s.v);
        if (std::abs(omega_z_) < 1e-9) {
            s.p = v_body_ * t;
        } else {
            const double c = std::cos(yaw);
            const double sn = std::sin(yaw);
            const double ux = v_body_.x();
            const double uy = v_body_.y();
            s.p.x() = (ux * sn + uy * (c - 1.0)) / omega_z_;
            s.p.y() = (-ux * (c - 1.0) + uy * sn) / omega_z_;
        }
        s.p.z() = height_ + bob_amp_ * std::sin(w_pitch_ * t + 1.2);
        s.v.z() += bob_amp_ * w_pitch_ * std::cos(w_pitch_ * t + 1.2);
        s.a.z() -= bob_amp_ * w_pitch_ * w_pitch_ * std::sin(w_pitch_ * t + 1.2);
        return s;
    }

  private:
    Vec3 v_body_ = Vec3::Zero();
    double omega_z_ = 0.0;
    double height_ = 0.3;
    double roll_amp_ = 0.0;
    double pitch_amp_ = 0.0;
    double bob_amp_ = 0.0;
    double w_roll_ = 0.0;
    double w_pitch_ = 0.0;
};

double smoothstep01(double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * (3.0 - 2.0 * x);
}

double quintic(double tau) {
    return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
}

double quintic_dot(double tau) {
    return tau * tau * (30.0 + tau * (-60.0 + 30.0 * tau));
}

/// Loaded fraction of the stance force profile at normalized progress u in
/// [0,1): smooth ramps over the first and last 15% of stance.
double force_profile(double u) {
    constexpr double kRamp = 0.15;
    if (u < kRamp) {
        return smoothstep01(u / kRamp);
    }
    if (u > 1.0 - kRamp) {
        return smoothstep01((1.0 - u) / kRamp);
    }
    return 1.0;
}

struct FootTarget {
    Vec3 p_world = Vec3::Zero();
    Vec3 v_world = Vec3::Zero();
    bool stance = false;
    bool slipping = false;
    double force_scale = 0.0;  // 0..1, before noise
};

class LegSchedule {
  public:
    LegSchedule(const GaitConfig& cfg, const LegModel& model,
                const BodyPath& path, double phase_offset)
        : cfg_(cfg), path_(path), offset_(phase_offset) {
        neutral_ = model.hip_offset +
                   Vec3(0.0, model.axis_signs.x() * model.l_hip, 0.0);
        leg_ = model.leg_id;
        const int cycles = static_cast<int>(
                               cfg.step_frequency * cfg.duration + offset_) +
                           2;
        anchors_.reserve(static_cast<std::size_t>(cycles) + 1);
        for (int k = 0; k <= cycles; ++k) {
            anchors_.push_back(anchor_for_cycle(k));
        }
    }

    FootTarget at(double t) const {
        FootTarget out;
        if (cfg_.gait == GaitType::STAND) {
            out.stance = true;
            out.p_world = anchors_[0];
            out.force_scale = 1.0;
            return out;
        }
        const double phi = cfg_.step_frequency * t + offset_;
        const int k = static_cast<int>(std::floor(phi));
        const double u = phi - static_cast<double>(k);
        const double d = cfg_.duty_factor;
        if (u < d) {
            out.stance = true;
            out.force_scale = force_profile(u / d);
            out.p_world = anchors_[static_cast<std::size_t>(k)] +
                          slip_displacement(k, t, &out.slipping);
            out.v_world = out.slipping ? slip_velocity(t) : Vec3::Zero();
        } else {
            const double tau = (u - d) / (1.0 - d);
            const double tau_dot = cfg_.step_frequency / (1.0 - d);
            bool ignored = false;
            const Vec3 from = anchors_[static_cast<std::size_t>(k)] +
                              slip_displacement(k, stance_end(k), &ignored);
            const Vec3 to = anchors_[static_cast<std::size_t>(k) + 1];
            const double s = quintic(tau);
            const double sp = std::sin(M_PI * tau);
            out.p_world = from + (to - from) * s;
            out.p_world.z() += cfg_.step_height * sp * sp;
            out.v_world = (to - from) * quintic_dot(tau) * tau_dot;
            out.v_world.z() +=
                cfg_.step_height * M_PI * std::sin(2.0 * M_PI * tau) * tau_dot;
        }
        return out;
    }

  private:
    double stance_start(int k) const {
        return (static_cast<double>(k) - offset_) / cfg_.step_frequency;
    }
    double stance_end(int k) const {
        return (static_cast<double>(k) - offset_ + cfg_.duty_factor) /
               cfg_.step_frequency;
    }

    Vec3 anchor_for_cycle(int k) const {
        const double t_mid = std::max(
            (static_cast<double>(k) - offset_ + 0.5 * cfg_.duty_factor) /
                cfg_.step_frequency,
            0.0);
        const BodyState body = path_.at(t_mid);
        Vec3 anchor = body.p + body.R * neutral_;
        anchor.z() = 0.0;
        return anchor;
    }

    Vec3 slip_displacement(int k, double t, bool* slipping_now) const {
        Vec3 disp = Vec3::Zero();
        const double t0 = stance_start(k);
        const double t1 = stance_end(k);
        for (const SlipEvent& ev : cfg_.slip_events) {
            if (ev.leg != leg_) {
                continue;
            }
            const double o0 = std::max(ev.t_start, t0);
            const double o1 = std::min(ev.t_end, t1);
            if (o1 <= o0) {
                continue;
            }
            disp += ev.slip_velocity * (std::clamp(t, o0, o1) - o0);
            if (t >= o0 && t < o1) {
                *slipping_now = true;
            }
        }
        return disp;
    }

    Vec3 slip_velocity(double t) const {
        Vec3 v = Vec3::Zero();
        for (const SlipEvent& ev : cfg_.slip_events) {
            if (ev.leg == leg_ && t >= ev.t_start && t < ev.t_end) {
                v += ev.slip_velocity;
            }
        }
        return v;
    }

    const GaitConfig& cfg_;
    const BodyPath& path_;
    double offset_;
    Vec3 neutral_;
    LegId leg_;
    std::vector<Vec3> anchors_;
};

void validate_config(const GaitConfig& cfg) {
    if (cfg.duration <= 0.0 || cfg.imu_rate <= 0.0 ||
        cfg.step_frequency <= 0.0 || cfg.body_height <= 0.0) {
        throw DataError("gait config: rates, duration, and height must be > 0");
    }
    if (cfg.gait == GaitType::TROT &&
        (cfg.duty_factor <= 0.5 || cfg.duty_factor > 0.9)) {
        throw DataError("gait config: trot duty factor must lie in (0.5, 0.9]");
    }
    if (cfg.step_height < 0.0 || cfg.force_noise_sigma < 0.0 ||
        cfg.stance_force_mean <= 0.0) {
        throw DataError("gait config: negative force/step parameters");
    }
    if (cfg.roll_amplitude < 0.0 || cfg.roll_amplitude > 0.35 ||
        cfg.pitch_amplitude < 0.0 || cfg.pitch_amplitude > 0.35 ||
        cfg.bob_amplitude < 0.0 || cfg.bob_amplitude > 0.1) {
        throw DataError(
            "gait config: oscillation amplitudes outside [0, 0.35] rad / "
            "[0, 0.1] m");
    }
}

}  // namespace

Vec3 inverse_kinematics_3dof(const LegModel& model, const Vec3& p_target_B) {
    const double s1 = model.axis_signs.x();
    const double s2 = model.axis_signs.y();
    const double s3 = model.axis_signs.z();
    const double L = s1 * model.l_hip;
    const double l_t = model.l_thigh;
    const double l_c = model.l_calf + model.foot_radius;

    const Vec3 r = p_target_B - model.hip_offset;
    const double rho = std::hypot(r.y(), r.z());
    if (rho < std::abs(L) - 1e-9) {
        std::ostringstream msg;
        msg << "inverse kinematics: target " << rho
            << " m from the abduction axis, hip link needs " << std::abs(L);
        throw DataError(msg.str());
    }

    const double alpha = std::atan2(r.z(), r.y());
    const double beta =
        std::acos(std::clamp(L / std::max(rho, 1e-12), -1.0, 1.0));

    // Two abduction candidates; prefer the one with the foot below the hip
    // plane, tie-break on the smaller rotation.
    const double cand_a = std::remainder(alpha + beta, 2.0 * M_PI);
    const double cand_b = std::remainder(alpha - beta, 2.0 * M_PI);
    const auto z_after = [&](double th) {
        return -r.y() * std::sin(th) + r.z() * std::cos(th);
    };
    const bool below_a = z_after(cand_a) <= 1e-12;
    const bool below_b = z_after(cand_b) <= 1e-12;
    double theta1;
    if (below_a != below_b) {
        theta1 = below_a ? cand_a : cand_b;
    } else {
        theta1 = std::abs(cand_a) <= std::abs(cand_b) ? cand_a : cand_b;
    }

    Vec3 w = rot_x(-theta1) * r;
    w.y() -= L;
    const double D_sq = w.x() * w.x() + w.z() * w.z();
    const double D = std::sqrt(D_sq);
    const double reach_max = l_t + l_c;
    const double reach_min = std::abs(l_t - l_c);
    if (D > reach_max + 1e-9 || D < reach_min - 1e-9) {
        std::ostringstream msg;
        msg << "inverse kinematics: planar target distance " << D
            << " m outside reach [" << reach_min << ", " << reach_max << "]";
        throw DataError(msg.str());
    }

    const double c3 = std::clamp((D_sq - l_t * l_t - l_c * l_c) /
                                     (2.0 * l_t * l_c),
                                 -1.0, 1.0);
    const double theta3 = -std::acos(c3);

    const double ux = -l_c * std::sin(theta3);
    const double uz = -l_t - l_c * std::cos(theta3);
    const double theta2 =
        std::atan2(w.x() * uz - w.z() * ux, w.x() * ux + w.z() * uz);

    return Vec3(s1 * theta1, s2 * theta2, s3 * theta3);
}

SimOutput simulate(const GaitConfig& cfg, const std::array<LegModel, 4>& legs) {
    validate_config(cfg);

    const BodyPath path(cfg);
    const std::array<double, 4> offsets = {0.0, 0.5, 0.5, 0.0};  // FL FR RL RR
    std::vector<LegSchedule> schedule;
    schedule.reserve(4);
    for (int i = 0; i < 4; ++i) {
        schedule.emplace_back(cfg, legs[static_cast<std::size_t>(i)], path,
                              offsets[static_cast<std::size_t>(i)]);
    }

    const double dt = 1.0 / cfg.imu_rate;
    const std::size_t steps =
        static_cast<std::size_t>(std::llround(cfg.duration * cfg.imu_rate));

    // Reachability scan before any stream is assembled.
    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const BodyState body = path.at(t);
        for (int leg = 0; leg < 4; ++leg) {
            const FootTarget target =
                schedule[static_cast<std::size_t>(leg)].at(t);
            const Vec3 p_B = body.R.transpose() * (target.p_world - body.p);
            inverse_kinematics_3dof(legs[static_cast<std::size_t>(leg)], p_B);
        }
    }

    std::mt19937_64 rng(cfg.rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double accel_sigma =
        cfg.noise_enabled ? cfg.noise.sigma_a * std::sqrt(cfg.imu_rate) : 0.0;
    const double gyro_sigma =
        cfg.noise_enabled ? cfg.noise.sigma_g * std::sqrt(cfg.imu_rate) : 0.0;
    const double force_sigma = cfg.noise_enabled ? cfg.force_noise_sigma : 0.0;

    SimOutput out;
    out.ground_truth.reserve(steps + 1);
    out.imu.reserve(steps + 1);
    for (auto& stream : out.legs) {
        stream.reserve(steps + 1);
    }
    for (auto& stream : out.contact_truth) {
        stream.reserve(steps + 1);
    }

    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const BodyState body = path.at(t);

        out.ground_truth.push_back({t, body.p, body.R});

        ImuSample imu;
        imu.t = t;
        imu.a_raw = body.R.transpose() * (body.a - cfg.noise.gravity) +
                    cfg.accel_bias +
                    accel_sigma * Vec3(gauss(rng), gauss(rng), gauss(rng));
        imu.omega_raw = body.omega + cfg.gyro_bias +
                        gyro_sigma * Vec3(gauss(rng), gauss(rng), gauss(rng));
        out.imu.push_back(imu);

        for (int leg = 0; leg < 4; ++leg) {
            const auto li = static_cast<std::size_t>(leg);
            const LegModel& model = legs[li];
            const FootTarget target = schedule[li].at(t);

            const Vec3 p_B = body.R.transpose() * (target.p_world - body.p);
            const Vec3 q = inverse_kinematics_3dof(model, p_B);
            const Mat3 J = velocity_jacobian(model, q);
            const Vec3 rhs = body.R.transpose() * (target.v_world - body.v) -
                             body.omega.cross(p_B);
            const Vec3 dq = J.partialPivLu().solve(rhs);

            LegSample sample;
            sample.t = t;
            sample.leg = static_cast<LegId>(leg);
            sample.q = q;
            sample.dq = dq;
            const double noise = force_sigma * gauss(rng);
            sample.force = std::max(
                cfg.stance_force_mean * target.force_scale + noise, 0.0);
            out.legs[li].push_back(sample);

            out.contact_truth[li].push_back(
                {t, target.stance ? ContactPhase::STANCE : ContactPhase::SWING,
                 target.slipping});
        }
    }
    return out;
}

}  // namespace legodo
