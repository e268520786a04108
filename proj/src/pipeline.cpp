#include "legodo/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "legodo/contact_fsm.hpp"
#include "legodo/contact_glrt.hpp"
#include "legodo/errors.hpp"
#include "legodo/eskf.hpp"
#include "legodo/fusion.hpp"
#include "legodo/log.hpp"
#include "legodo/so3.hpp"

namespace legodo {

namespace fs = std::filesystem;

namespace {

constexpr double kMaxJointRate = 100.0;  // rad/s sanity ceiling
constexpr double kGapThreshold = 0.1;    // s

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

bool leg_sample_valid(const LegMeasurement& m) {
    return std::isfinite(m.t) && m.q.allFinite() && m.q_dot.allFinite() &&
           std::isfinite(m.force) &&
           m.q_dot.cwiseAbs().maxCoeff() < kMaxJointRate;
}

/// Roll/pitch of the gravity direction seen by a resting accelerometer.
Rot3 attitude_from_gravity(const Vec3& a_mean, double yaw) {
    const double roll = std::atan2(a_mean.y(), a_mean.z());
    const double pitch = std::atan2(
        -a_mean.x(), std::hypot(a_mean.y(), a_mean.z()));
    return rot_z(yaw) * rot_y(pitch) * rot_x(roll);
}

NominalState initial_state(const std::vector<SyncedFrame>& frames,
                           std::size_t n_init, const PipelineConfig& cfg,
                           const std::array<LegModel, 4>& legs,
                           const Trajectory* gt_seed) {
    Vec3 a_mean = Vec3::Zero();
    for (std::size_t i = 0; i < n_init; ++i) {
        a_mean += frames[i].imu.a_raw;
    }
    a_mean /= static_cast<double>(n_init);

    double yaw = 0.0;
    Vec3 p0 = Vec3::Zero();
    if (gt_seed != nullptr && !gt_seed->empty()) {
        yaw = yaw_of(gt_seed->front().R);
        p0 = gt_seed->front().p;
    }
    NominalState x0;
    x0.t = frames.front().t;
    x0.p = p0;
    x0.R = attitude_from_gravity(a_mean, yaw);

    // Initial velocity from legs that are clearly loaded: each stance foot
    // is stationary, so v = -R * v_rel.
    Vec3 v_sum = Vec3::Zero();
    std::size_t v_count = 0;
    for (std::size_t i = 0; i < n_init; ++i) {
        const SyncedFrame& frame = frames[i];
        for (std::size_t leg = 0; leg < 4; ++leg) {
            const LegMeasurement& m = frame.legs[leg];
            if (!leg_sample_valid(m) || m.force < cfg.fsm.fallback.F_on) {
                continue;
            }
            JointState js;
            js.q = m.q;
            js.dq = m.q_dot;
            const FootKinematics fk =
                foot_kinematics(legs[leg], js, frame.imu.omega_raw);
            v_sum += -(x0.R * fk.v_rel);
            ++v_count;
        }
    }
    if (v_count > 0) {
        x0.v = v_sum / static_cast<double>(v_count);
    }
    return x0;
}

const char* outcome_name(UpdateOutcome outcome) {
    switch (outcome) {
        case UpdateOutcome::NO_UPDATE: return "idle";
        case UpdateOutcome::ACCEPTED: return "accepted";
        case UpdateOutcome::REJECTED: return "rejected";
        case UpdateOutcome::SKIPPED: return "skipped";
    }
    return "?";
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const NumericalError& e) {
        log_message(LogLevel::ERROR, e.what());
        return 3;
    } catch (const DataError& e) {
        log_message(LogLevel::ERROR, e.what());
        return 2;
    } catch (const std::exception& e) {
        log_message(LogLevel::ERROR, e.what());
        return 2;
    }
}

PipelineConfig config_or_default(const std::string& path) {
    if (path.empty()) {
        return default_config();
    }
    return load_config(path);
}

void write_svg_overlay(const Trajectory& est, const Trajectory& gt,
                       const std::string& path) {
    double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
    for (const Trajectory* traj : {&est, &gt}) {
        for (const auto& pose : *traj) {
            min_x = std::min(min_x, pose.p.x());
            max_x = std::max(max_x, pose.p.x());
            min_y = std::min(min_y, pose.p.y());
            max_y = std::max(max_y, pose.p.y());
        }
    }
    const double span = std::max({max_x - min_x, max_y - min_y, 1e-6});
    const double scale = 560.0 / span;
    auto sx = [&](double x) { return 20.0 + (x - min_x) * scale; };
    auto sy = [&](double y) { return 580.0 - (y - min_y) * scale; };

    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot open for writing: " + path);
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" "
           "height=\"600\" viewBox=\"0 0 600 600\">\n";
    out << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
    const struct {
        const Trajectory* traj;
        const char* color;
    } layers[] = {{&gt, "#202020"}, {&est, "#d62728"}};
    for (const auto& layer : layers) {
        out << "<polyline fill=\"none\" stroke=\"" << layer.color
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& pose : *layer.traj) {
            out << fmt(sx(pose.p.x()), "%.2f") << ','
                << fmt(sy(pose.p.y()), "%.2f") << ' ';
        }
        out << "\"/>\n";
    }
    out << "<text x=\"30\" y=\"30\" fill=\"#202020\">ground truth</text>\n";
    out << "<text x=\"30\" y=\"50\" fill=\"#d62728\">estimate</text>\n";
    out << "</svg>\n";
}

}  // namespace

const char* detector_name(DetectorMode mode) {
    switch (mode) {
        case DetectorMode::FSM: return "fsm";
        case DetectorMode::GLRT: return "glrt";
        case DetectorMode::FUSED: return "fused";
    }
    return "?";
}

DetectorMode parse_detector(const std::string& name) {
    if (name == "fsm") return DetectorMode::FSM;
    if (name == "glrt") return DetectorMode::GLRT;
    if (name == "fused") return DetectorMode::FUSED;
    throw DataError("unknown detector '" + name +
                    "' (expected fsm, glrt, or fused)");
}

RunResult run_estimator(const std::vector<SyncedFrame>& frames,
                        const PipelineConfig& cfg, const RunOptions& opts,
                        const Trajectory* gt_seed) {
    if (frames.empty()) {
        throw DataError("dataset contains no usable frames");
    }
    const std::array<LegModel, 4> legs = make_legs(cfg.robot);
    FusionConfig fusion_cfg = cfg.fusion;
    if (opts.sigma_base) {
        fusion_cfg.sigma_base = *opts.sigma_base;
    }

    const double t0 = frames.front().t;
    std::size_t n_init = 0;
    while (n_init < frames.size() &&
           frames[n_init].t - t0 <= cfg.init.init_window) {
        ++n_init;
    }
    n_init = std::max<std::size_t>(n_init, 1);

    NominalState state = initial_state(frames, n_init, cfg, legs, gt_seed);
    Mat15 P = initial_covariance(cfg.init);

    std::array<ForceContactDetector, 4> fsm = {
        ForceContactDetector(cfg.fsm), ForceContactDetector(cfg.fsm),
        ForceContactDetector(cfg.fsm), ForceContactDetector(cfg.fsm)};
    std::array<GlrtDetector, 4> glrt = {
        GlrtDetector(cfg.glrt), GlrtDetector(cfg.glrt),
        GlrtDetector(cfg.glrt), GlrtDetector(cfg.glrt)};

    std::ofstream diag;
    if (!opts.diagnostics_path.empty()) {
        diag.open(opts.diagnostics_path);
        if (!diag) {
            throw DataError("cannot open for writing: " +
                            opts.diagnostics_path);
        }
        diag << "t,leg,fsm_phase,glrt_T,q_fsm,q_glrt,q_final,sigma,"
                "outcome,mahalanobis_sq\n";
    }

    RunResult result;
    result.est.reserve(frames.size());
    RunStats& stats = result.stats;
    stats.frames = frames.size();

    double prev_t = t0;
    std::uint64_t propagations = 0;

    struct LegScratch {
        bool valid = false;
        FootKinematics fk;
        ContactAssessment assess;
        UpdateReport report;
    };
    std::array<LegScratch, 4> scratch;

    for (std::size_t i = 0; i < frames.size(); ++i) {
        const SyncedFrame& frame = frames[i];
        if (i > 0) {
            const double dt = frame.t - prev_t;
            if (dt > kGapThreshold) {
                ++stats.timing_gaps;
                log_message(LogLevel::WARN,
                            "timing gap of " + fmt(dt) + " s at t=" +
                                fmt(frame.t, "%.6f"));
            }
            if (propagate(state, P, frame.imu, dt, cfg.noise)) {
                ++stats.propagations;
                ++propagations;
                if (propagations % 1000 == 0) {
                    state.R = orthonormalize(state.R);
                }
            }
        }
        prev_t = frame.t;
        state.t = frame.t;

        // Pass 1: kinematics and contact scoring against the predicted
        // state, before any measurement is applied.
        for (std::size_t leg = 0; leg < 4; ++leg) {
            LegScratch& s = scratch[leg];
            const LegMeasurement& m = frame.legs[leg];
            s.valid = leg_sample_valid(m);
            s.report = UpdateReport{};
            if (!s.valid) {
                ++stats.invalid_leg_samples;
                glrt[leg].reset();
                s.assess = ContactAssessment{};
                s.assess.leg_id = static_cast<LegId>(leg);
                continue;
            }
            JointState js;
            js.q = m.q;
            js.dq = m.q_dot;
            const Vec3 omega_hat = frame.imu.omega_raw - state.b_g;
            s.fk = foot_kinematics(legs[leg], js, omega_hat);

            const ContactPhase fsm_phase = fsm[leg].update(m.force);
            const double q_fsm = fsm[leg].quality(m.force);
            const double T =
                glrt[leg].push(measurement_model(state, s.fk.v_rel));
            const double q_glrt = quality_glrt(T, cfg.glrt);

            switch (opts.detector) {
                case DetectorMode::FSM:
                    s.assess = fuse(q_fsm, 1.0, fsm_phase, fusion_cfg);
                    break;
                case DetectorMode::GLRT:
                    s.assess = fuse(1.0, q_glrt,
                                    classify_glrt(T, cfg.glrt), fusion_cfg);
                    break;
                case DetectorMode::FUSED:
                    s.assess = fuse(q_fsm, q_glrt, fsm_phase, fusion_cfg);
                    break;
            }
            s.assess.leg_id = static_cast<LegId>(leg);
            s.assess.glrt_statistic = T;
        }

        // Pass 2: sequential zero-velocity updates, FL FR RL RR.
        for (std::size_t leg = 0; leg < 4; ++leg) {
            LegScratch& s = scratch[leg];
            if (!s.valid || !s.assess.stance_gate) {
                continue;
            }
            s.report = zupt_update(state, P, s.fk.v_rel, s.fk.p_foot,
                                   s.assess.R_meas, cfg.gate);
            switch (s.report.outcome) {
                case UpdateOutcome::ACCEPTED: ++stats.updates_accepted; break;
                case UpdateOutcome::REJECTED: ++stats.updates_rejected; break;
                case UpdateOutcome::SKIPPED: ++stats.updates_skipped; break;
                case UpdateOutcome::NO_UPDATE: break;
            }
        }

        if (diag.is_open()) {
            for (std::size_t leg = 0; leg < 4; ++leg) {
                const LegScratch& s = scratch[leg];
                diag << fmt(frame.t, "%.6f") << ','
                     << leg_name(static_cast<LegId>(leg)) << ','
                     << (s.assess.fsm_phase == ContactPhase::STANCE
                             ? "stance"
                             : "swing")
                     << ',' << fmt(s.assess.glrt_statistic) << ','
                     << fmt(s.assess.q_fsm) << ',' << fmt(s.assess.q_glrt)
                     << ',' << fmt(s.assess.q_final) << ','
                     << fmt(s.assess.sigma) << ','
                     << (s.valid ? outcome_name(s.report.outcome) : "invalid")
                     << ',' << fmt(s.report.mahalanobis_sq) << '\n';
            }
        }

        if (!state.p.allFinite() || !state.v.allFinite() ||
            !state.R.allFinite()) {
            throw NumericalError("filter state lost finiteness at t=" +
                                 fmt(frame.t, "%.6f"));
        }
        result.est.push_back({frame.t, state.p, state.R});
    }
    result.final_state = state;
    return result;
}

int cmd_sim(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override) {
    return run_guarded([&]() {
        PipelineConfig cfg = config_or_default(config_path);
        if (seed_override) {
            cfg.sim.rng_seed = *seed_override;
        }
        const SimOutput sim = simulate(cfg.sim, make_legs(cfg.robot));
        fs::create_directories(out_dir);
        const fs::path dir(out_dir);
        write_imu_csv((dir / "imu.csv").string(), sim.imu);
        write_legs_csv((dir / "legs.csv").string(), sim.legs);
        write_contacts_csv((dir / "contacts.csv").string(),
                           sim.contact_truth);
        write_trajectory(sim.ground_truth, (dir / "gt.csv").string());
        DatasetManifest manifest;
        manifest.name = cfg.sim.gait == GaitType::TROT ? "trot" : "stand";
        manifest.sensor_rate = cfg.sim.imu_rate;
        manifest.imu_path = "imu.csv";
        manifest.legs_path = "legs.csv";
        manifest.gt_path = "gt.csv";
        manifest.contacts_path = "contacts.csv";
        write_manifest(manifest, (dir / "manifest.json").string());
        log_message(LogLevel::INFO,
                    "wrote " + std::to_string(sim.imu.size()) +
                        " frames to " + out_dir);
        return 0;
    });
}

int cmd_run(const std::string& dataset_dir, const std::string& config_path,
            const std::string& out_dir, const RunOptions& opts) {
    return run_guarded([&]() {
        PipelineConfig cfg = config_or_default(config_path);
        const fs::path dir(dataset_dir);
        MergeStats merge;
        const auto frames = read_frames((dir / "imu.csv").string(),
                                        (dir / "legs.csv").string(), &merge);
        if (merge.frames_dropped > 0) {
            log_message(LogLevel::WARN,
                        std::to_string(merge.frames_dropped) +
                            " frames dropped during merge");
        }
        Trajectory gt;
        const fs::path gt_path = dir / "gt.csv";
        if (fs::exists(gt_path)) {
            gt = read_trajectory(gt_path.string());
        }

        fs::create_directories(out_dir);
        RunOptions run_opts = opts;
        if (run_opts.diagnostics_path.empty()) {
            run_opts.diagnostics_path =
                (fs::path(out_dir) / "diagnostics.csv").string();
        }
        const RunResult result = run_estimator(
            frames, cfg, run_opts, gt.empty() ? nullptr : &gt);
        write_trajectory(result.est,
                         (fs::path(out_dir) / "est_traj.txt").string());
        log_message(
            LogLevel::INFO,
            "filtered " + std::to_string(result.stats.frames) + " frames (" +
                std::to_string(result.stats.updates_accepted) +
                " updates, " + std::to_string(result.stats.updates_rejected) +
                " gated out)");
        return 0;
    });
}

int cmd_eval(const std::string& est_path, const std::string& gt_path,
             const std::string& out_dir, bool svg) {
    return run_guarded([&]() {
        const Trajectory est = read_trajectory(est_path);
        const Trajectory gt = read_trajectory(gt_path);
        const MetricReport report = evaluate(est, gt);

        fs::create_directories(out_dir);
        const fs::path dir(out_dir);
        {
            std::ofstream out(dir / "report.json");
            if (!out) {
                throw DataError("cannot open for writing: " +
                                (dir / "report.json").string());
            }
            out << report_to_json(report);
        }
        {
            std::ofstream out(dir / "ate_plot.csv");
            if (!out) {
                throw DataError("cannot open for writing: " +
                                (dir / "ate_plot.csv").string());
            }
            out << "t,ate_t,x_est,y_est,x_gt,y_gt\n";
            for (const auto& [ei, gi] : associate(est, gt)) {
                const Vec3 d = est[ei].p - gt[gi].p;
                out << fmt(gt[gi].t, "%.6f") << ',' << fmt(d.norm()) << ','
                    << fmt(est[ei].p.x()) << ',' << fmt(est[ei].p.y()) << ','
                    << fmt(gt[gi].p.x()) << ',' << fmt(gt[gi].p.y()) << '\n';
            }
        }
        if (svg) {
            write_svg_overlay(est, gt, (dir / "overlay.svg").string());
        }
        return 0;
    });
}

}  // namespace legodo
