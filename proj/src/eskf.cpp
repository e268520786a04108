#include "legodo/eskf.hpp"

#include <Eigen/Eigenvalues>

namespace legodo {

namespace {

constexpr double kMinDt = 1e-4;
constexpr double kMaxDt = 0.01;
constexpr double kMaxConditionNumber = 1e12;
constexpr std::uint64_t kReorthonormalizeEvery = 1000;

void symmetrize(Mat15& P) { P = 0.5 * (P + P.transpose()).eval(); }

}  // namespace

NominalState propagate_nominal(const NominalState& state, const ImuSample& imu,
                               double dt, const NoiseParams& noise) {
    const Vec3 a = imu.a_raw - state.b_a;
    const Vec3 omega = imu.omega_raw - state.b_g;

    NominalState next = state;
    next.t = state.t + dt;
    next.p = state.p + state.v * dt;
    next.v = state.v + (state.R * a + noise.gravity) * dt;
    next.R = state.R * exp_map(omega * dt);
    return next;
}

Mat15 error_transition(const NominalState& state, const ImuSample& imu,
                       double dt) {
    const Vec3 a = imu.a_raw - state.b_a;
    const Vec3 omega = imu.omega_raw - state.b_g;

    Mat15 Fc = Mat15::Zero();
    Fc.block<3, 3>(kIdxP, kIdxV) = Mat3::Identity();
    Fc.block<3, 3>(kIdxV, kIdxTheta) = -state.R * skew(a);
    Fc.block<3, 3>(kIdxV, kIdxBa) = -state.R;
    Fc.block<3, 3>(kIdxTheta, kIdxTheta) = -skew(omega);
    Fc.block<3, 3>(kIdxTheta, kIdxBg) = -Mat3::Identity();
    return Mat15::Identity() + Fc * dt;
}

Mat15 process_noise(const NominalState& state, double dt,
                    const NoiseParams& noise) {
    Mat15x12 G = Mat15x12::Zero();
    G.block<3, 3>(kIdxV, 0) = -state.R;
    G.block<3, 3>(kIdxTheta, 3) = -Mat3::Identity();
    G.block<3, 3>(kIdxBa, 6) = Mat3::Identity();
    G.block<3, 3>(kIdxBg, 9) = Mat3::Identity();

    Mat12 Qc = Mat12::Zero();
    Qc.block<3, 3>(0, 0) = noise.sigma_a * noise.sigma_a * Mat3::Identity();
    Qc.block<3, 3>(3, 3) = noise.sigma_g * noise.sigma_g * Mat3::Identity();
    Qc.block<3, 3>(6, 6) = noise.sigma_ba * noise.sigma_ba * Mat3::Identity();
    Qc.block<3, 3>(9, 9) = noise.sigma_bg * noise.sigma_bg * Mat3::Identity();

    return G * Qc * G.transpose() * dt;
}

bool propagate(NominalState& state, Mat15& P, const ImuSample& imu, double dt,
               const NoiseParams& noise) {
    if (!(dt > 0.0) || !std::isfinite(dt) || !imu.a_raw.allFinite() ||
        !imu.omega_raw.allFinite()) {
        return false;
    }
    const double dt_c = std::clamp(dt, kMinDt, kMaxDt);

    const Mat15 Fd = error_transition(state, imu, dt_c);
    P = Fd * P * Fd.transpose() + process_noise(state, dt_c, noise);
    symmetrize(P);
    state = propagate_nominal(state, imu, dt_c, noise);
    return true;
}

Vec3 measurement_model(const NominalState& state, const Vec3& v_rel) {
    return state.v + state.R * v_rel;
}

Mat3x15 measurement_jacobian(const NominalState& state, const Vec3& v_rel,
                             const Vec3& p_foot_B) {
    Mat3x15 H = Mat3x15::Zero();
    H.block<3, 3>(0, kIdxV) = Mat3::Identity();
    H.block<3, 3>(0, kIdxTheta) = -state.R * skew(v_rel);
    H.block<3, 3>(0, kIdxBg) = state.R * skew(p_foot_B);
    return H;
}

UpdateReport zupt_update(NominalState& state, Mat15& P, const Vec3& v_rel,
                         const Vec3& p_foot_B, const Mat3& R_meas,
                         const GateConfig& gate) {
    UpdateReport report;

    const Mat3x15 H = measurement_jacobian(state, v_rel, p_foot_B);
    const Vec3 nu = -measurement_model(state, v_rel);
    const Mat3 S = H * P * H.transpose() + R_meas;

    Eigen::SelfAdjointEigenSolver<Mat3> eig(S);
    const double lambda_min = eig.eigenvalues().minCoeff();
    const double lambda_max = eig.eigenvalues().maxCoeff();
    if (!(lambda_min > 0.0) || lambda_max > kMaxConditionNumber * lambda_min) {
        report.outcome = UpdateOutcome::SKIPPED;
        report.innovation = nu;
        return report;
    }

    const Mat3 S_inv = eig.eigenvectors() *
                       eig.eigenvalues().cwiseInverse().asDiagonal() *
                       eig.eigenvectors().transpose();
    report.innovation = nu;
    report.mahalanobis_sq = nu.dot(S_inv * nu);
    if (report.mahalanobis_sq > gate.gamma_95) {
        report.outcome = UpdateOutcome::REJECTED;
        return report;
    }

    const Eigen::Matrix<double, 15, 3> K = P * H.transpose() * S_inv;
    const Vec15 dx = K * nu;

    const Mat15 IKH = Mat15::Identity() - K * H;
    P = IKH * P * IKH.transpose() + K * R_meas * K.transpose();
    symmetrize(P);

    state.p += dx.segment<3>(kIdxP);
    state.v += dx.segment<3>(kIdxV);
    // Attitude error lives in the body frame (the measurement Jacobian is
    // linearized for R*Exp(dtheta)), so the correction composes on the right.
    state.R = state.R * exp_map(dx.segment<3>(kIdxTheta));
    state.b_a += dx.segment<3>(kIdxBa);
    state.b_g += dx.segment<3>(kIdxBg);

    report.outcome = UpdateOutcome::ACCEPTED;
    return report;
}

Eskf::Eskf(const NominalState& initial, const Mat15& P0,
           const NoiseParams& noise, const GateConfig& gate)
    : state_(initial), P_(P0), noise_(noise), gate_(gate) {}

StepReport Eskf::step(const ImuSample& imu, double dt,
                      const std::array<LegUpdate, 4>& legs) {
    StepReport report;
    report.propagated = propagate(state_, P_, imu, dt, noise_);
    if (!report.propagated) {
        ++rejected_samples_;
        return report;
    }

    ++propagations_;
    if (propagations_ % kReorthonormalizeEvery == 0) {
        state_.R = orthonormalize(state_.R);
    }

    for (int i = 0; i < 4; ++i) {
        const LegUpdate& leg = legs[static_cast<std::size_t>(i)];
        if (!leg.valid || !leg.stance) {
            continue;
        }
        report.legs[static_cast<std::size_t>(i)] =
            zupt_update(state_, P_, leg.v_rel, leg.p_foot, leg.R_meas, gate_);
    }
    return report;
}

Mat15 default_initial_covariance() {
    Vec15 d;
    d << 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 1e-4, 1e-4, 1e-4, 2.5e-3, 2.5e-3,
        2.5e-3, 1e-4, 1e-4, 1e-4;
    return d.asDiagonal();
}

}  // namespace legodo
