#include "legodo/contact_glrt.hpp"

#include <limits>

namespace legodo {

double glrt_statistic(const std::deque<Vec3>& window, const GlrtConfig& cfg) {
    if (window.size() < static_cast<std::size_t>(cfg.window_size)) {
        return std::numeric_limits<double>::infinity();
    }
    Vec3 mean = Vec3::Zero();
    for (const Vec3& v : window) {
        mean += v;
    }
    mean /= static_cast<double>(window.size());
    return mean.squaredNorm() / (cfg.sigma_v * cfg.sigma_v);
}

ContactPhase classify_glrt(double T, const GlrtConfig& cfg) {
    return T < cfg.gamma_on ? ContactPhase::STANCE : ContactPhase::SWING;
}

double quality_glrt(double T, const GlrtConfig& cfg) {
    if (std::isinf(T)) {
        return 0.0;
    }
    return std::clamp(1.0 - T / cfg.gamma_on, 0.0, 1.0);
}

GlrtDetector::GlrtDetector(const GlrtConfig& cfg) : cfg_(cfg) {}

double GlrtDetector::push(const Vec3& v_world) {
    window_.push_back(v_world);
    if (window_.size() > static_cast<std::size_t>(cfg_.window_size)) {
        window_.pop_front();
    }
    return statistic();
}

double GlrtDetector::statistic() const { return glrt_statistic(window_, cfg_); }

void GlrtDetector::reset() { window_.clear(); }

}  // namespace legodo
