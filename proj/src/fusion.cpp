#include "legodo/fusion.hpp"

namespace legodo {

ContactAssessment fuse(double q_fsm, double q_glrt, ContactPhase fsm_phase,
                       const FusionConfig& cfg) {
    ContactAssessment out;
    out.fsm_phase = fsm_phase;
    out.q_fsm = q_fsm;
    out.q_glrt = q_glrt;
    out.q_final = q_fsm * q_glrt;
    out.sigma = cfg.sigma_base / std::max(out.q_final, cfg.epsilon);
    out.R_meas = out.sigma * out.sigma * Mat3::Identity();
    out.stance_gate = fsm_phase == ContactPhase::STANCE;
    if (cfg.strict_stationarity && q_glrt == 0.0) {
        out.stance_gate = false;
    }
    return out;
}

}  // namespace legodo
