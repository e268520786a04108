#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace legodo {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
// Rotation matrices are plain 3x3 matrices; validity is checked, not typed.
using Rot3 = Eigen::Matrix3d;

/// Skew-symmetric operator: skew(v) * w == v x w.
inline Mat3 skew(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return m;
}

/// Exponential map R^3 -> SO(3), Rodrigues form R = I + a*[phi]x + b*[phi]x^2.
/// Below ||phi|| = 1e-8 the coefficients switch to their second-order Taylor
/// expansions (a = 1 - t^2/6, b = 1/2 - t^2/24) to avoid 0/0.
inline Rot3 exp_map(const Vec3& phi) {
    const double theta_sq = phi.squaredNorm();
    const Mat3 k = skew(phi);
    double a;
    double b;
    if (theta_sq < 1e-16) {
        a = 1.0 - theta_sq / 6.0;
        b = 0.5 - theta_sq / 24.0;
    } else {
        const double theta = std::sqrt(theta_sq);
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / theta_sq;
    }
    return Mat3::Identity() + a * k + b * (k * k);
}

inline bool is_rotation(const Rot3& r, double tol = 1e-9) {
    if (!r.allFinite()) {
        return false;
    }
    const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
    return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

/// Nearest rotation matrix (polar projection via SVD). Used to re-orthonormalize
/// an integrated rotation whose orthogonality has drifted.
inline Rot3 orthonormalize(const Rot3& r) {
    Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 s = Mat3::Identity();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
        s(2, 2) = -1.0;
    }
    return svd.matrixU() * s * svd.matrixV().transpose();
}

inline Rot3 rot_x(double a) {
    const double c = std::cos(a);
    const double s = std::sin(a);
    Rot3 r;
    r << 1.0, 0.0, 0.0,
         0.0, c, -s,
         0.0, s, c;
    return r;
}

inline Rot3 rot_y(double a) {
    const double c = std::cos(a);
    const double s = std::sin(a);
    Rot3 r;
    r << c, 0.0, s,
         0.0, 1.0, 0.0,
         -s, 0.0, c;
    return r;
}

inline Rot3 rot_z(double a) {
    const double c = std::cos(a);
    const double s = std::sin(a);
    Rot3 r;
    r << c, -s, 0.0,
         s, c, 0.0,
         0.0, 0.0, 1.0;
    return r;
}

}  // namespace legodo
