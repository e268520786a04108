#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "legodo/leg_kinematics.hpp"
#include "legodo/so3.hpp"

namespace legodo {

using Mat15 = Eigen::Matrix<double, 15, 15>;
using Mat3x15 = Eigen::Matrix<double, 3, 15>;
using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat15x12 = Eigen::Matrix<double, 15, 12>;

// Error-state block offsets within the 15-vector (dp, dv, dtheta, dba, dbg).
inline constexpr int kIdxP = 0;
inline constexpr int kIdxV = 3;
inline constexpr int kIdxTheta = 6;
inline constexpr int kIdxBa = 9;
inline constexpr int kIdxBg = 12;

struct NominalState {
    double t = 0.0;
    Vec3 p = Vec3::Zero();      // world
    Vec3 v = Vec3::Zero();      // world
    Rot3 R = Rot3::Identity();  // body -> world
    Vec3 b_a = Vec3::Zero();    // body
    Vec3 b_g = Vec3::Zero();    // body
};

struct ImuSample {
    double t = 0.0;
    Vec3 a_raw = Vec3::Zero();      // body, includes gravity reaction
    Vec3 omega_raw = Vec3::Zero();  // body
};

struct NoiseParams {
    double sigma_a = 0.02;     // m/s^2/sqrt(Hz)
    double sigma_g = 0.002;    // rad/s/sqrt(Hz)
    double sigma_ba = 1e-4;    // m/s^3/sqrt(Hz)
    double sigma_bg = 1e-5;    // rad/s^2/sqrt(Hz)
    Vec3 gravity = Vec3(0.0, 0.0, -9.81);
};

struct GateConfig {
    double gamma_95 = 7.815;  // chi-square, 3 dof, 95%
};

enum class UpdateOutcome {
    NO_UPDATE,  // leg not in stance, or invalid sample
    ACCEPTED,
    REJECTED,  // failed the chi-square gate
    SKIPPED,   // innovation covariance not invertible
};

struct UpdateReport {
    UpdateOutcome outcome = UpdateOutcome::NO_UPDATE;
    double mahalanobis_sq = 0.0;
    Vec3 innovation = Vec3::Zero();
};

/// Everything the filter needs from one leg at one step. Kinematics and
/// contact assessment happen upstream; the filter only consumes the results.
struct LegUpdate {
    bool valid = false;   // joint sample passed sanity checks
    bool stance = false;  // binary contact decision (gate)
    Vec3 v_rel = Vec3::Zero();
    Vec3 p_foot = Vec3::Zero();
    Mat3 R_meas = Mat3::Identity();
};

struct StepReport {
    bool propagated = false;
    std::array<UpdateReport, 4> legs;
};

/// Nominal-state Euler integration over one IMU interval.
NominalState propagate_nominal(const NominalState& state, const ImuSample& imu,
                               double dt, const NoiseParams& noise);

/// Discrete error-state transition F_d = I + F_c*dt, linearized at `state`.
Mat15 error_transition(const NominalState& state, const ImuSample& imu,
                       double dt);

/// Discrete process noise Q_d = G*Q_c*G^T*dt.
Mat15 process_noise(const NominalState& state, double dt,
                    const NoiseParams& noise);

/// Joint nominal + covariance propagation. Returns false (state untouched)
/// when dt or the IMU sample is unusable.
bool propagate(NominalState& state, Mat15& P, const ImuSample& imu, double dt,
               const NoiseParams& noise);

/// Predicted world-frame velocity of a foot: v + R*v_rel. Zero in clean
/// stance, which is exactly what the zero-velocity update exploits.
Vec3 measurement_model(const NominalState& state, const Vec3& v_rel);

/// 3x15 measurement Jacobian [0 | I | -R*skew(v_rel) | 0 | R*skew(p_foot)].
Mat3x15 measurement_jacobian(const NominalState& state, const Vec3& v_rel,
                             const Vec3& p_foot_B);

/// One zero-velocity update for a single stance foot, with chi-square gating
/// and Joseph-form covariance correction.
UpdateReport zupt_update(NominalState& state, Mat15& P, const Vec3& v_rel,
                         const Vec3& p_foot_B, const Mat3& R_meas,
                         const GateConfig& gate);

/// Filter front object owning state + covariance, with periodic rotation
/// re-orthonormalization. Contact decisions arrive precomputed per leg.
class Eskf {
  public:
    Eskf(const NominalState& initial, const Mat15& P0,
         const NoiseParams& noise, const GateConfig& gate);

    StepReport step(const ImuSample& imu, double dt,
                    const std::array<LegUpdate, 4>& legs);

    const NominalState& state() const { return state_; }
    const Mat15& covariance() const { return P_; }
    std::uint64_t rejected_samples() const { return rejected_samples_; }

  private:
    NominalState state_;
    Mat15 P_;
    NoiseParams noise_;
    GateConfig gate_;
    std::uint64_t propagations_ = 0;
    std::uint64_t rejected_samples_ = 0;
};

/// Default initial covariance: broad position/velocity, tight attitude and
/// bias blocks (per-axis 0.01, 0.01, 1e-4, 2.5e-3, 1e-4).
Mat15 default_initial_covariance();

}  // namespace legodo
