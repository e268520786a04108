#include "legodo/config.hpp"

#include <fstream>

#include "json.hpp"

#include "legodo/errors.hpp"

namespace legodo {

namespace {

using nlohmann::json;

Vec3 read_vec3(const json& j, const std::string& key, const Vec3& fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const auto& arr = j.at(key);
    if (!arr.is_array() || arr.size() != 3) {
        throw DataError("config key '" + key + "' must be a 3-array");
    }
    return Vec3(arr[0].get<double>(), arr[1].get<double>(),
                arr[2].get<double>());
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

void require_positive(double v, const std::string& key) {
    if (!(v > 0.0)) {
        throw DataError("config key '" + key + "' must be positive");
    }
}

}  // namespace

std::array<LegModel, 4> make_legs(const RobotParams& params) {
    auto make = [&](LegId id, double sx, double sy, double s1) {
        LegModel leg;
        leg.leg_id = id;
        leg.hip_offset = Vec3(sx * params.hip_x, sy * params.hip_y, 0.0);
        leg.l_hip = params.l_hip;
        leg.l_thigh = params.l_thigh;
        leg.l_calf = params.l_calf;
        leg.foot_radius = params.foot_radius;
        leg.axis_signs = Vec3(s1, 1.0, 1.0);
        return leg;
    };
    return {make(LegId::FL, 1.0, 1.0, 1.0), make(LegId::FR, 1.0, -1.0, -1.0),
            make(LegId::RL, -1.0, 1.0, 1.0),
            make(LegId::RR, -1.0, -1.0, -1.0)};
}

Mat15 initial_covariance(const FilterInitConfig& init) {
    Mat15 P = Mat15::Zero();
    P.block<3, 3>(kIdxP, kIdxP) = init.pos_var * Mat3::Identity();
    P.block<3, 3>(kIdxV, kIdxV) = init.vel_var * Mat3::Identity();
    P.block<3, 3>(kIdxTheta, kIdxTheta) = init.att_var * Mat3::Identity();
    P.block<3, 3>(kIdxBa, kIdxBa) = init.accel_bias_var * Mat3::Identity();
    P.block<3, 3>(kIdxBg, kIdxBg) = init.gyro_bias_var * Mat3::Identity();
    return P;
}

PipelineConfig default_config() { return {}; }

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open config: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(path, 1, e.what());
    }

    PipelineConfig cfg;
    if (j.contains("robot")) {
        const auto& r = j.at("robot");
        cfg.robot.hip_x = r.value("hip_x", cfg.robot.hip_x);
        cfg.robot.hip_y = r.value("hip_y", cfg.robot.hip_y);
        cfg.robot.l_hip = r.value("l_hip", cfg.robot.l_hip);
        cfg.robot.l_thigh = r.value("l_thigh", cfg.robot.l_thigh);
        cfg.robot.l_calf = r.value("l_calf", cfg.robot.l_calf);
        cfg.robot.foot_radius = r.value("foot_radius", cfg.robot.foot_radius);
        require_positive(cfg.robot.l_thigh, "robot.l_thigh");
        require_positive(cfg.robot.l_calf, "robot.l_calf");
        if (cfg.robot.l_hip < 0.0 || cfg.robot.foot_radius < 0.0) {
            throw DataError("robot link lengths must be non-negative");
        }
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        cfg.noise.sigma_a = n.value("sigma_a", cfg.noise.sigma_a);
        cfg.noise.sigma_g = n.value("sigma_g", cfg.noise.sigma_g);
        cfg.noise.sigma_ba = n.value("sigma_ba", cfg.noise.sigma_ba);
        cfg.noise.sigma_bg = n.value("sigma_bg", cfg.noise.sigma_bg);
        cfg.noise.gravity = read_vec3(n, "gravity", cfg.noise.gravity);
        require_positive(cfg.noise.sigma_a, "noise.sigma_a");
        require_positive(cfg.noise.sigma_g, "noise.sigma_g");
    }
    if (j.contains("contact")) {
        const auto& c = j.at("contact");
        if (c.contains("fsm")) {
            const auto& f = c.at("fsm");
            cfg.fsm.window_size = f.value("window_size", cfg.fsm.window_size);
            cfg.fsm.refit_interval =
                f.value("refit_interval", cfg.fsm.refit_interval);
            cfg.fsm.min_fit_samples =
                f.value("min_fit_samples", cfg.fsm.min_fit_samples);
            cfg.fsm.debounce = f.value("debounce", cfg.fsm.debounce);
            cfg.fsm.fallback.F_on =
                f.value("fallback_F_on", cfg.fsm.fallback.F_on);
            cfg.fsm.fallback.F_off =
                f.value("fallback_F_off", cfg.fsm.fallback.F_off);
            cfg.fsm.fallback.F_max =
                f.value("fallback_F_max", cfg.fsm.fallback.F_max);
        }
        if (c.contains("glrt")) {
            const auto& g = c.at("glrt");
            cfg.glrt = make_glrt_config(
                g.value("window_size", cfg.glrt.window_size),
                g.value("sigma_v", cfg.glrt.sigma_v));
            require_positive(cfg.glrt.sigma_v, "contact.glrt.sigma_v");
            if (cfg.glrt.window_size < 1) {
                throw DataError("contact.glrt.window_size must be >= 1");
            }
        }
        if (c.contains("fusion")) {
            const auto& f = c.at("fusion");
            cfg.fusion.sigma_base =
                f.value("sigma_base", cfg.fusion.sigma_base);
            cfg.fusion.epsilon = f.value("epsilon", cfg.fusion.epsilon);
            cfg.fusion.strict_stationarity = f.value(
                "strict_stationarity", cfg.fusion.strict_stationarity);
            require_positive(cfg.fusion.sigma_base,
                             "contact.fusion.sigma_base");
        }
    }
    if (j.contains("filter")) {
        const auto& f = j.at("filter");
        cfg.gate.gamma_95 = f.value("gate_gamma", cfg.gate.gamma_95);
        cfg.init.pos_var = f.value("pos_var", cfg.init.pos_var);
        cfg.init.vel_var = f.value("vel_var", cfg.init.vel_var);
        cfg.init.att_var = f.value("att_var", cfg.init.att_var);
        cfg.init.accel_bias_var =
            f.value("accel_bias_var", cfg.init.accel_bias_var);
        cfg.init.gyro_bias_var =
            f.value("gyro_bias_var", cfg.init.gyro_bias_var);
        cfg.init.init_window = f.value("init_window", cfg.init.init_window);
        require_positive(cfg.gate.gamma_95, "filter.gate_gamma");
    }
    if (j.contains("metrics")) {
        const auto& m = j.at("metrics");
        cfg.metrics.assoc_max_dt =
            m.value("assoc_max_dt", cfg.metrics.assoc_max_dt);
        cfg.metrics.rpe_delta_m =
            m.value("rpe_delta_m", cfg.metrics.rpe_delta_m);
        require_positive(cfg.metrics.assoc_max_dt, "metrics.assoc_max_dt");
        require_positive(cfg.metrics.rpe_delta_m, "metrics.rpe_delta_m");
    }
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        const std::string gait = s.value("gait", std::string{"trot"});
        if (gait == "trot") {
            cfg.sim.gait = GaitType::TROT;
        } else if (gait == "stand") {
            cfg.sim.gait = GaitType::STAND;
        } else {
            throw DataError("sim.gait must be 'trot' or 'stand', got '" +
                            gait + "'");
        }
        cfg.sim.body_speed = read_vec3(s, "body_speed", cfg.sim.body_speed);
        cfg.sim.yaw_rate = s.value("yaw_rate", cfg.sim.yaw_rate);
        cfg.sim.step_frequency =
            s.value("step_frequency", cfg.sim.step_frequency);
        cfg.sim.duty_factor = s.value("duty_factor", cfg.sim.duty_factor);
        cfg.sim.step_height = s.value("step_height", cfg.sim.step_height);
        cfg.sim.body_height = s.value("body_height", cfg.sim.body_height);
        cfg.sim.roll_amplitude =
            s.value("roll_amplitude", cfg.sim.roll_amplitude);
        cfg.sim.pitch_amplitude =
            s.value("pitch_amplitude", cfg.sim.pitch_amplitude);
        cfg.sim.bob_amplitude =
            s.value("bob_amplitude", cfg.sim.bob_amplitude);
        cfg.sim.duration = s.value("duration", cfg.sim.duration);
        cfg.sim.imu_rate = s.value("imu_rate", cfg.sim.imu_rate);
        cfg.sim.noise_enabled =
            s.value("noise_enabled", cfg.sim.noise_enabled);
        cfg.sim.accel_bias = read_vec3(s, "accel_bias", cfg.sim.accel_bias);
        cfg.sim.gyro_bias = read_vec3(s, "gyro_bias", cfg.sim.gyro_bias);
        cfg.sim.force_noise_sigma =
            s.value("force_noise_sigma", cfg.sim.force_noise_sigma);
        cfg.sim.stance_force_mean =
            s.value("stance_force_mean", cfg.sim.stance_force_mean);
        cfg.sim.rng_seed = s.value("rng_seed", cfg.sim.rng_seed);
        if (s.contains("slip_events")) {
            for (const auto& e : s.at("slip_events")) {
                SlipEvent ev;
                ev.t_start = e.value("t_start", 0.0);
                ev.t_end = e.value("t_end", 0.0);
                const int leg = e.value("leg", 0);
                if (leg < 0 || leg > 3) {
                    throw DataError("slip event leg must be 0..3");
                }
                ev.leg = static_cast<LegId>(leg);
                ev.slip_velocity =
                    read_vec3(e, "slip_velocity", Vec3::Zero());
                if (!(ev.t_end > ev.t_start)) {
                    throw DataError("slip event needs t_end > t_start");
                }
                cfg.sim.slip_events.push_back(ev);
            }
        }
    }
    cfg.sim.noise = cfg.noise;
    return cfg;
}

void save_config(const PipelineConfig& cfg, const std::string& path) {
    json j;
    j["robot"] = {{"hip_x", cfg.robot.hip_x},
                  {"hip_y", cfg.robot.hip_y},
                  {"l_hip", cfg.robot.l_hip},
                  {"l_thigh", cfg.robot.l_thigh},
                  {"l_calf", cfg.robot.l_calf},
                  {"foot_radius", cfg.robot.foot_radius}};
    j["noise"] = {{"sigma_a", cfg.noise.sigma_a},
                  {"sigma_g", cfg.noise.sigma_g},
                  {"sigma_ba", cfg.noise.sigma_ba},
                  {"sigma_bg", cfg.noise.sigma_bg},
                  {"gravity", vec3_to_json(cfg.noise.gravity)}};
    j["contact"]["fsm"] = {{"window_size", cfg.fsm.window_size},
                           {"refit_interval", cfg.fsm.refit_interval},
                           {"min_fit_samples", cfg.fsm.min_fit_samples},
                           {"debounce", cfg.fsm.debounce},
                           {"fallback_F_on", cfg.fsm.fallback.F_on},
                           {"fallback_F_off", cfg.fsm.fallback.F_off},
                           {"fallback_F_max", cfg.fsm.fallback.F_max}};
    j["contact"]["glrt"] = {{"window_size", cfg.glrt.window_size},
                            {"sigma_v", cfg.glrt.sigma_v}};
    j["contact"]["fusion"] = {
        {"sigma_base", cfg.fusion.sigma_base},
        {"epsilon", cfg.fusion.epsilon},
        {"strict_stationarity", cfg.fusion.strict_stationarity}};
    j["filter"] = {{"gate_gamma", cfg.gate.gamma_95},
                   {"pos_var", cfg.init.pos_var},
                   {"vel_var", cfg.init.vel_var},
                   {"att_var", cfg.init.att_var},
                   {"accel_bias_var", cfg.init.accel_bias_var},
                   {"gyro_bias_var", cfg.init.gyro_bias_var},
                   {"init_window", cfg.init.init_window}};
    j["metrics"] = {{"assoc_max_dt", cfg.metrics.assoc_max_dt},
                    {"rpe_delta_m", cfg.metrics.rpe_delta_m}};
    json sim;
    sim["gait"] = cfg.sim.gait == GaitType::TROT ? "trot" : "stand";
    sim["body_speed"] = vec3_to_json(cfg.sim.body_speed);
    sim["yaw_rate"] = cfg.sim.yaw_rate;
    sim["step_frequency"] = cfg.sim.step_frequency;
    sim["duty_factor"] = cfg.sim.duty_factor;
    sim["step_height"] = cfg.sim.step_height;
    sim["body_height"] = cfg.sim.body_height;
    sim["roll_amplitude"] = cfg.sim.roll_amplitude;
    sim["pitch_amplitude"] = cfg.sim.pitch_amplitude;
    sim["bob_amplitude"] = cfg.sim.bob_amplitude;
    sim["duration"] = cfg.sim.duration;
    sim["imu_rate"] = cfg.sim.imu_rate;
    sim["noise_enabled"] = cfg.sim.noise_enabled;
    sim["accel_bias"] = vec3_to_json(cfg.sim.accel_bias);
    sim["gyro_bias"] = vec3_to_json(cfg.sim.gyro_bias);
    sim["force_noise_sigma"] = cfg.sim.force_noise_sigma;
    sim["stance_force_mean"] = cfg.sim.stance_force_mean;
    sim["rng_seed"] = cfg.sim.rng_seed;
    if (!cfg.sim.slip_events.empty()) {
        json events = json::array();
        for (const auto& ev : cfg.sim.slip_events) {
            events.push_back({{"t_start", ev.t_start},
                              {"t_end", ev.t_end},
                              {"leg", static_cast<int>(ev.leg)},
                              {"slip_velocity",
                               vec3_to_json(ev.slip_velocity)}});
        }
        sim["slip_events"] = events;
    }
    j["sim"] = sim;

    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot open for writing: " + path);
    }
    out << j.dump(2) << '\n';
}

}  // namespace legodo
