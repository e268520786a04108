#include "legodo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "legodo/errors.hpp"

namespace legodo {

namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

double geodesic_angle(const Rot3& R) {
    const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
    return std::acos(c);
}

std::vector<Vec3> subsample(const std::vector<Vec3>& pts, std::size_t cap) {
    if (pts.size() <= cap) {
        return pts;
    }
    const std::size_t stride = (pts.size() + cap - 1) / cap;
    std::vector<Vec3> out;
    out.reserve(cap + 1);
    for (std::size_t i = 0; i < pts.size(); i += stride) {
        out.push_back(pts[i]);
    }
    if ((pts.size() - 1) % stride != 0) {
        out.push_back(pts.back());
    }
    return out;
}

}  // namespace

double yaw_of(const Rot3& R) { return std::atan2(R(1, 0), R(0, 0)); }

double wrap_deg(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w > 180.0) {
        w -= 360.0;
    } else if (w <= -180.0) {
        w += 360.0;
    }
    return w;
}

double path_length(const Trajectory& traj) {
    double len = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        len += (traj[i].p - traj[i - 1].p).norm();
    }
    return len;
}

std::vector<std::pair<std::size_t, std::size_t>> associate(
    const Trajectory& est, const Trajectory& gt, double max_dt) {
    if (est.empty() || gt.empty()) {
        throw DataError("associate: empty trajectory");
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(gt.size());
    std::size_t e = 0;
    for (std::size_t g = 0; g < gt.size(); ++g) {
        const double t = gt[g].t;
        while (e + 1 < est.size() &&
               std::abs(est[e + 1].t - t) <= std::abs(est[e].t - t)) {
            ++e;
        }
        if (std::abs(est[e].t - t) <= max_dt) {
            pairs.emplace_back(e, g);
        }
    }
    if (pairs.empty()) {
        std::ostringstream msg;
        msg << "associate: no pairs within " << max_dt << " s (est spans "
            << est.front().t << ".." << est.back().t << ", gt spans "
            << gt.front().t << ".." << gt.back().t << ")";
        throw DataError(msg.str());
    }
    return pairs;
}

double ate_rmse(const Trajectory& est, const Trajectory& gt,
                const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    double sum_sq = 0.0;
    for (const auto& [e, g] : pairs) {
        sum_sq += (est[e].p - gt[g].p).squaredNorm();
    }
    return std::sqrt(sum_sq / static_cast<double>(pairs.size()));
}

double ahe_rmse_deg(
    const Trajectory& est, const Trajectory& gt,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    double sum_sq = 0.0;
    for (const auto& [e, g] : pairs) {
        const double diff =
            wrap_deg((yaw_of(est[e].R) - yaw_of(gt[g].R)) * kRadToDeg);
        sum_sq += diff * diff;
    }
    return std::sqrt(sum_sq / static_cast<double>(pairs.size()));
}

std::optional<RpeResult> rpe(
    const Trajectory& est, const Trajectory& gt,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
    double delta_m) {
    // Arc length along the ground truth, sampled at the paired poses.
    std::vector<double> arc(pairs.size(), 0.0);
    for (std::size_t i = 1; i < pairs.size(); ++i) {
        arc[i] = arc[i - 1] +
                 (gt[pairs[i].second].p - gt[pairs[i - 1].second].p).norm();
    }

    double trans_sq = 0.0;
    double rot_sq = 0.0;
    std::size_t count = 0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (j < i) {
            j = i;
        }
        while (j < pairs.size() && arc[j] - arc[i] < delta_m) {
            ++j;
        }
        if (j >= pairs.size()) {
            break;
        }
        const auto& [ei, gi] = pairs[i];
        const auto& [ej, gj] = pairs[j];

        // Relative motion over the segment, in each trajectory's own frame.
        const Rot3 dR_gt = gt[gi].R.transpose() * gt[gj].R;
        const Vec3 dp_gt = gt[gi].R.transpose() * (gt[gj].p - gt[gi].p);
        const Rot3 dR_est = est[ei].R.transpose() * est[ej].R;
        const Vec3 dp_est = est[ei].R.transpose() * (est[ej].p - est[ei].p);

        const Rot3 R_err = dR_gt.transpose() * dR_est;
        const Vec3 p_err = dR_gt.transpose() * (dp_est - dp_gt);
        trans_sq += p_err.squaredNorm();
        const double ang = geodesic_angle(R_err) * kRadToDeg;
        rot_sq += ang * ang;
        ++count;
    }
    if (count == 0) {
        return std::nullopt;
    }
    RpeResult out;
    out.segments = count;
    out.trans_pct =
        std::sqrt(trans_sq / static_cast<double>(count)) / delta_m * 100.0;
    out.rot_deg_per_m =
        std::sqrt(rot_sq / static_cast<double>(count)) / delta_m;
    return out;
}

EndpointMetrics endpoint_metrics(const Trajectory& est, const Trajectory& gt) {
    if (est.size() < 2 || gt.size() < 2) {
        throw DataError("endpoint_metrics: need at least two poses");
    }
    const double gt_len = path_length(gt);
    if (gt_len < 0.1) {
        throw DataError("endpoint_metrics: ground-truth path under 0.1 m");
    }
    EndpointMetrics out;
    out.fpe_m = (est.back().p - gt.back().p).norm();
    out.drift_pct = out.fpe_m / gt_len * 100.0;
    out.length_err_pct = std::abs(path_length(est) - gt_len) / gt_len * 100.0;
    return out;
}

double discrete_frechet(const std::vector<Vec3>& a_in,
                        const std::vector<Vec3>& b_in) {
    if (a_in.empty() || b_in.empty()) {
        throw DataError("discrete_frechet: empty curve");
    }
    const std::vector<Vec3> a = subsample(a_in, 5000);
    const std::vector<Vec3> b = subsample(b_in, 5000);
    const std::size_t n = a.size();
    const std::size_t m = b.size();

    // Two-row DP keeps memory linear in the shorter curve.
    std::vector<double> prev(m);
    std::vector<double> curr(m);
    prev[0] = (a[0] - b[0]).norm();
    for (std::size_t j = 1; j < m; ++j) {
        prev[j] = std::max(prev[j - 1], (a[0] - b[j]).norm());
    }
    for (std::size_t i = 1; i < n; ++i) {
        curr[0] = std::max(prev[0], (a[i] - b[0]).norm());
        for (std::size_t j = 1; j < m; ++j) {
            const double reach =
                std::min({prev[j], prev[j - 1], curr[j - 1]});
            curr[j] = std::max(reach, (a[i] - b[j]).norm());
        }
        std::swap(prev, curr);
    }
    return prev[m - 1];
}

Trajectory align_trajectory(const Trajectory& est, const Trajectory& gt,
                            Alignment mode) {
    if (mode == Alignment::NONE || est.empty() || gt.empty()) {
        return est;
    }
    Rot3 R_align;
    Vec3 t_align;
    if (mode == Alignment::FIRST_POSE) {
        R_align = gt.front().R * est.front().R.transpose();
        t_align = gt.front().p - R_align * est.front().p;
    } else {
        const std::size_t n = std::min(est.size(), gt.size());
        Eigen::Matrix3Xd src(3, n);
        Eigen::Matrix3Xd dst(3, n);
        for (std::size_t i = 0; i < n; ++i) {
            src.col(static_cast<Eigen::Index>(i)) = est[i].p;
            dst.col(static_cast<Eigen::Index>(i)) = gt[i].p;
        }
        const Eigen::Matrix4d T = Eigen::umeyama(src, dst, false);
        R_align = T.topLeftCorner<3, 3>();
        t_align = T.topRightCorner<3, 1>();
    }
    Trajectory out = est;
    for (auto& pose : out) {
        pose.p = R_align * pose.p + t_align;
        pose.R = R_align * pose.R;
    }
    return out;
}

MetricReport evaluate(const Trajectory& est_in, const Trajectory& gt,
                      const EvalOptions& opts) {
    const Trajectory est = align_trajectory(est_in, gt, opts.alignment);
    const auto pairs = associate(est, gt, opts.max_dt);

    MetricReport report;
    report.est_poses = est.size();
    report.gt_poses = gt.size();
    report.pair_count = pairs.size();
    report.ate_m = ate_rmse(est, gt, pairs);
    report.ahe_deg = ahe_rmse_deg(est, gt, pairs);
    if (const auto r = rpe(est, gt, pairs, opts.rpe_delta_m)) {
        report.rpe_trans_pct = r->trans_pct;
        report.rpe_rot_deg_per_m = r->rot_deg_per_m;
        report.rpe_segments = r->segments;
    }
    const EndpointMetrics ep = endpoint_metrics(est, gt);
    report.fpe_m = ep.fpe_m;
    report.drift_pct = ep.drift_pct;
    report.length_err_pct = ep.length_err_pct;

    std::vector<Vec3> est_pts;
    std::vector<Vec3> gt_pts;
    est_pts.reserve(est.size());
    gt_pts.reserve(gt.size());
    for (const auto& pose : est) {
        est_pts.push_back(pose.p);
    }
    for (const auto& pose : gt) {
        gt_pts.push_back(pose.p);
    }
    report.frechet_m = discrete_frechet(est_pts, gt_pts);
    return report;
}

std::string report_to_json(const MetricReport& report) {
    nlohmann::json j;
    j["ate_m"] = report.ate_m;
    j["ahe_deg"] = report.ahe_deg;
    if (report.rpe_trans_pct) {
        j["rpe_trans_pct"] = *report.rpe_trans_pct;
        j["rpe_rot_deg_per_m"] = *report.rpe_rot_deg_per_m;
    } else {
        j["rpe_trans_pct"] = nullptr;
        j["rpe_rot_deg_per_m"] = nullptr;
    }
    j["fpe_m"] = report.fpe_m;
    j["drift_pct"] = report.drift_pct;
    j["length_err_pct"] = report.length_err_pct;
    j["frechet_m"] = report.frechet_m;
    j["meta"] = {{"pair_count", report.pair_count},
                 {"rpe_segments", report.rpe_segments},
                 {"est_poses", report.est_poses},
                 {"gt_poses", report.gt_poses}};
    return j.dump(2) + "\n";
}

}  // namespace legodo
