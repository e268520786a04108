#include "legodo/contact_fsm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace legodo {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;

double percentile(std::vector<double> sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

double log_normal_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return -kHalfLog2Pi - std::log(sigma) - 0.5 * z * z;
}

}  // namespace

GmmParams fit_gmm_1d(const std::vector<double>& samples,
                     const GmmFitConfig& cfg) {
    if (samples.size() < 100) {
        throw std::invalid_argument("fit_gmm_1d: need at least 100 samples");
    }
    const std::size_t n = samples.size();

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double range = sorted.back() - sorted.front();
    const double sigma_floor = std::max(0.01 * range, 1e-6);

    double mean = 0.0;
    for (double x : samples) {
        mean += x;
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : samples) {
        var += (x - mean) * (x - mean);
    }
    var /= static_cast<double>(n);
    const double init_sigma = std::max(std::sqrt(var), sigma_floor);

    GmmParams out;
    out.swing = {0.5, percentile(sorted, 0.10), init_sigma};
    out.stance = {0.5, percentile(sorted, 0.90), init_sigma};

    std::vector<double> r1(n);  // responsibility of the lower component
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double l1 = std::log(out.swing.w) +
                              log_normal_pdf(samples[i], out.swing.mu,
                                             out.swing.sigma);
            const double l2 = std::log(out.stance.w) +
                              log_normal_pdf(samples[i], out.stance.mu,
                                             out.stance.sigma);
            const double m = std::max(l1, l2);
            const double lse = m + std::log1p(std::exp(std::min(l1, l2) - m));
            ll += lse;
            r1[i] = std::exp(l1 - lse);
        }
        out.log_likelihoods.push_back(ll);
        out.iterations = iter + 1;

        double n1 = 0.0;
        double s1 = 0.0;
        double s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            n1 += r1[i];
            s1 += r1[i] * samples[i];
            s2 += (1.0 - r1[i]) * samples[i];
        }
        const double n2 = static_cast<double>(n) - n1;
        if (n1 > 1e-9) {
            out.swing.mu = s1 / n1;
        }
        if (n2 > 1e-9) {
            out.stance.mu = s2 / n2;
        }
        double v1 = 0.0;
        double v2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d1 = samples[i] - out.swing.mu;
            const double d2 = samples[i] - out.stance.mu;
            v1 += r1[i] * d1 * d1;
            v2 += (1.0 - r1[i]) * d2 * d2;
        }
        if (n1 > 1e-9) {
            out.swing.sigma = std::max(std::sqrt(v1 / n1), sigma_floor);
        }
        if (n2 > 1e-9) {
            out.stance.sigma = std::max(std::sqrt(v2 / n2), sigma_floor);
        }
        out.swing.w = std::max(n1 / static_cast<double>(n), 1e-12);
        out.stance.w = std::max(n2 / static_cast<double>(n), 1e-12);
        const double wsum = out.swing.w + out.stance.w;
        out.swing.w /= wsum;
        out.stance.w /= wsum;

        if (std::abs(ll - prev_ll) < cfg.tolerance) {
            break;
        }
        prev_ll = ll;
    }

    if (out.swing.mu > out.stance.mu) {
        std::swap(out.swing, out.stance);
    }
    out.degenerate = !is_bimodal(out);
    return out;
}

bool is_bimodal(const GmmParams& gmm) {
    const double separation = gmm.stance.mu - gmm.swing.mu;
    const double spread = 2.0 * (gmm.swing.sigma + gmm.stance.sigma);
    const double w_min = std::min(gmm.swing.w, gmm.stance.w);
    return separation > spread && w_min > 0.05;
}

std::optional<ForceThresholds> derive_thresholds(const GmmParams& gmm) {
    ForceThresholds th;
    th.F_max = gmm.stance.mu;
    th.F_off = gmm.swing.mu + 3.0 * gmm.swing.sigma;
    th.F_on = th.F_off + 0.1 * (th.F_max - th.F_off);
    if (th.F_off >= th.F_max) {
        return std::nullopt;
    }
    return th;
}

double quality_fsm(double F_mag, const ForceThresholds& th) {
    const double denom = th.F_max - th.F_on;
    if (denom <= 0.0) {
        return F_mag >= th.F_on ? 1.0 : 0.0;
    }
    return std::clamp((F_mag - th.F_on) / denom, 0.0, 1.0);
}

ForceContactDetector::ForceContactDetector(const FsmConfig& cfg)
    : cfg_(cfg), thresholds_(cfg.fallback) {}

ContactPhase ForceContactDetector::update(double F_mag) {
    if (F_mag < 0.0 || !std::isfinite(F_mag)) {
        ++negative_samples_;
        F_mag = std::max(F_mag, 0.0);
        if (!std::isfinite(F_mag)) {
            F_mag = 0.0;
        }
    }

    window_.push_back(F_mag);
    if (window_.size() > cfg_.window_size) {
        window_.pop_front();
    }
    ++samples_seen_;
    if (cfg_.refit_interval > 0 && samples_seen_ % cfg_.refit_interval == 0 &&
        window_.size() >= cfg_.min_fit_samples) {
        refit();
    }

    if (phase_ == ContactPhase::SWING) {
        if (F_mag >= thresholds_.F_on) {
            ++dwell_;
            if (dwell_ >= cfg_.debounce) {
                phase_ = ContactPhase::STANCE;
                dwell_ = 0;
            }
        } else {
            dwell_ = 0;
        }
    } else {
        if (F_mag <= thresholds_.F_off) {
            ++dwell_;
            if (dwell_ >= cfg_.debounce) {
                phase_ = ContactPhase::SWING;
                dwell_ = 0;
            }
        } else {
            dwell_ = 0;
        }
    }
    return phase_;
}

void ForceContactDetector::refit() {
    ++refit_count_;
    const std::vector<double> snapshot(window_.begin(), window_.end());
    const GmmParams gmm = fit_gmm_1d(snapshot, cfg_.fit);
    if (!gmm.degenerate) {
        if (auto th = derive_thresholds(gmm)) {
            thresholds_ = *th;
            fallback_active_ = false;
            return;
        }
    }
    thresholds_ = cfg_.fallback;
    fallback_active_ = true;
}

}  // namespace legodo
