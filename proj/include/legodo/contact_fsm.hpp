#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

namespace legodo {

enum class ContactPhase { SWING, STANCE };

struct GmmComponent {
    double w = 0.5;
    double mu = 0.0;
    double sigma = 1.0;
};

struct GmmParams {
    GmmComponent swing;   // lower mean
    GmmComponent stance;  // higher mean
    bool degenerate = false;
    int iterations = 0;
    std::vector<double> log_likelihoods;  // one entry per EM iteration
};

struct GmmFitConfig {
    int max_iterations = 200;
    double tolerance = 1e-6;  // on |delta log-likelihood|
};

/// Two-component EM fit on scalar force data. Means initialize at the 10th
/// and 90th percentiles with equal weights and the sample std; variances are
/// floored at (0.01 * data range)^2 so a collapsing component cannot sink
/// the likelihood into a singularity.
GmmParams fit_gmm_1d(const std::vector<double>& samples,
                     const GmmFitConfig& cfg = {});

/// Separation test: components must be far apart relative to their spreads
/// and both carry real mass. Standing for the whole window, for example,
/// produces a single lump and fails this.
bool is_bimodal(const GmmParams& gmm);

struct ForceThresholds {
    double F_on = 20.0;   // touchdown, N
    double F_off = 10.0;  // liftoff, N
    double F_max = 80.0;  // saturation of the quality ramp, N
};

/// F_max = stance mean; F_off = swing mean + 3 swing sigma; F_on sits 10% of
/// the way from F_off to F_max. Empty when the ordering F_off < F_max fails.
std::optional<ForceThresholds> derive_thresholds(const GmmParams& gmm);

/// Linear confidence ramp from F_on (0) to F_max (1), clamped.
double quality_fsm(double F_mag, const ForceThresholds& th);

struct FsmConfig {
    std::size_t window_size = 10000;    // 20 s at 500 Hz
    std::size_t refit_interval = 2500;  // samples between GMM refits
    std::size_t min_fit_samples = 100;
    int debounce = 3;  // consecutive samples to confirm a transition
    ForceThresholds fallback;
    GmmFitConfig fit;
};

/// Per-leg hysteresis state machine over a sliding force window. Thresholds
/// adapt by periodic GMM refits and drop back to the configured initial set
/// whenever the window stops looking bimodal.
class ForceContactDetector {
  public:
    explicit ForceContactDetector(const FsmConfig& cfg = {});

    ContactPhase update(double F_mag);

    ContactPhase phase() const { return phase_; }
    const ForceThresholds& thresholds() const { return thresholds_; }
    bool fallback_active() const { return fallback_active_; }
    double quality(double F_mag) const {
        return quality_fsm(F_mag, thresholds_);
    }
    std::uint64_t negative_samples() const { return negative_samples_; }
    std::uint64_t refit_count() const { return refit_count_; }

  private:
    void refit();

    FsmConfig cfg_;
    std::deque<double> window_;
    ContactPhase phase_ = ContactPhase::SWING;
    int dwell_ = 0;
    ForceThresholds thresholds_;
    bool fallback_active_ = true;  // until the first successful fit
    std::uint64_t samples_seen_ = 0;
    std::uint64_t negative_samples_ = 0;
    std::uint64_t refit_count_ = 0;
};

}  // namespace legodo
