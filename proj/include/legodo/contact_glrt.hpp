#pragma once

#include <deque>

#include "legodo/contact_fsm.hpp"
#include "legodo/so3.hpp"

namespace legodo {

struct GlrtConfig {
    double sigma_v = 0.45;  // m/s, velocity noise scale under stance
    int window_size = 4;
    double gamma_on = 7.815 / 4.0;  // chi-square 95% threshold / window size
};

inline GlrtConfig make_glrt_config(int window_size, double sigma_v = 0.45) {
    GlrtConfig cfg;
    cfg.sigma_v = sigma_v;
    cfg.window_size = window_size;
    cfg.gamma_on = 7.815 / static_cast<double>(window_size);
    return cfg;
}

/// Normalized stationarity statistic over a full window of world-frame foot
/// velocities: T = ||mean||^2 / sigma_v^2. Returns +inf while the window is
/// still filling, which classifies as SWING.
double glrt_statistic(const std::deque<Vec3>& window, const GlrtConfig& cfg);

ContactPhase classify_glrt(double T, const GlrtConfig& cfg);

/// Confidence ramp: 1 at T = 0, linearly down to 0 at T = gamma_on.
double quality_glrt(double T, const GlrtConfig& cfg);

class GlrtDetector {
  public:
    explicit GlrtDetector(const GlrtConfig& cfg = {});

    /// Push one estimated world-frame foot velocity and return the statistic.
    double push(const Vec3& v_world);

    double statistic() const;
    ContactPhase classify() const { return classify_glrt(statistic(), cfg_); }
    double quality() const { return quality_glrt(statistic(), cfg_); }
    void reset();

  private:
    GlrtConfig cfg_;
    std::deque<Vec3> window_;
};

}  // namespace legodo
