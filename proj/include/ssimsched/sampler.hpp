#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "denoiser.hpp"
#include "errors.hpp"
#include "image.hpp"
#include "metrics.hpp"
#include "schedule.hpp"
#include "transforms.hpp"

namespace ssimsched {

// Exact posterior-mean denoiser for data ~ N(mean, diag(variance)) under
// additive Gaussian corruption: D(x; s) = mu + v/(v + s^2) * (x - mu).
// Lets the integrators be verified against a closed form without training.
class GaussianOracleDenoiser final : public DenoiserInterface {
  public:
    GaussianOracleDenoiser(DiffusionTensor mean, DiffusionTensor variance)
        : mean_(std::move(mean)), variance_(std::move(variance)) {
        if (!mean_.same_shape(variance_))
            throw ShapeError("GaussianOracleDenoiser: mean/variance shape mismatch");
        for (double v : variance_.data)
            if (!(v > 0.0)) throw DomainError("GaussianOracleDenoiser: variances must be > 0");
    }

    // Convenience for small hand-specified problems: a 1 x n x 1 tensor.
    static GaussianOracleDenoiser from_vectors(const std::vector<double>& mean,
                                               const std::vector<double>& variance) {
        if (mean.size() != variance.size() || mean.empty())
            throw ShapeError("GaussianOracleDenoiser: bad vector sizes");
        DiffusionTensor m(static_cast<int>(mean.size()), 1, 1);
        DiffusionTensor v(static_cast<int>(variance.size()), 1, 1);
        m.data = mean;
        v.data = variance;
        return GaussianOracleDenoiser(std::move(m), std::move(v));
    }

    DiffusionTensor evaluate(const DiffusionTensor& x, const DiffusionTensor* /*cond*/,
                             double sigma) const override {
        if (!x.same_shape(mean_)) throw ShapeError("GaussianOracleDenoiser: input shape mismatch");
        DiffusionTensor out = x;
        double s2 = sigma * sigma;
        for (std::size_t i = 0; i < out.data.size(); ++i) {
            double v = variance_.data[i];
            out.data[i] = mean_.data[i] + v / (v + s2) * (x.data[i] - mean_.data[i]);
        }
        return out;
    }

    const DiffusionTensor& mean() const { return mean_; }
    const DiffusionTensor& variance() const { return variance_; }

  private:
    DiffusionTensor mean_;
    DiffusionTensor variance_;
};

struct TraceStep {
    int index;     // descends from N-1 to 0
    double sigma;  // level the recorded state sits at
    std::optional<DiffusionTensor> snapshot;
};

struct RolloutTrace {
    std::vector<TraceStep> steps;
};

struct RolloutOptions {
    bool record_snapshots = false;
    // Flips the drift term so the update moves away from the denoiser output.
    // Exists only to compare against the opposite sign convention; rollouts
    // with it set do not converge to the data distribution.
    bool reverse_drift_sign = false;
};

namespace detail {

inline const std::vector<double>& rollout_sigmas(const SigmaSchedule& schedule) {
    if (schedule.order != ScheduleOrder::Descending)
        throw ScheduleError("rollout: schedule must be descending");
    if (schedule.size() < 2) throw ScheduleError("rollout: need at least 2 levels");
    for (double s : schedule.sigmas)
        if (!(s > 0.0)) throw ScheduleError("rollout: all schedule levels must be > 0");
    return schedule.sigmas;
}

inline void check_step(const DiffusionTensor& x, int index) {
    for (double v : x.data)
        if (!std::isfinite(v))
            throw NonFiniteError("rollout: non-finite state at step " + std::to_string(index));
}

inline DiffusionTensor eval_checked(const DenoiserInterface& den, const DiffusionTensor& x,
                                    const DiffusionTensor* cond, double sigma) {
    DiffusionTensor d = den.evaluate(x, cond, sigma);
    if (!d.same_shape(x)) throw ShapeError("rollout: denoiser output shape mismatch");
    return d;
}

}  // namespace detail

// Integrates dx/dsigma = (x - D(x; sigma))/sigma from sigma_max down to 0,
// one Euler step per schedule interval with a final step onto sigma = 0:
// x <- x + (dt/sigma)*(D - x), dt = sigma_i - sigma_{i-1}.
inline std::pair<DiffusionTensor, RolloutTrace> euler_rollout(const DenoiserInterface& denoiser,
                                                              const DiffusionTensor* cond,
                                                              const SigmaSchedule& schedule,
                                                              DiffusionTensor init,
                                                              const RolloutOptions& opts = {}) {
    const std::vector<double>& sigmas = detail::rollout_sigmas(schedule);
    int n = static_cast<int>(sigmas.size());
    DiffusionTensor x = std::move(init);
    RolloutTrace trace;
    trace.steps.reserve(static_cast<std::size_t>(n));

    for (int j = 0; j < n; ++j) {
        double sigma = sigmas[j];
        double sigma_next = j + 1 < n ? sigmas[j + 1] : 0.0;
        int index = n - 1 - j;
        trace.steps.push_back({index, sigma,
                               opts.record_snapshots ? std::optional<DiffusionTensor>(x)
                                                     : std::nullopt});

        DiffusionTensor d = detail::eval_checked(denoiser, x, cond, sigma);
        double coef = (sigma - sigma_next) / sigma;
        if (opts.reverse_drift_sign) coef = -coef;
        for (std::size_t i = 0; i < x.data.size(); ++i)
            x.data[i] += coef * (d.data[i] - x.data[i]);
        detail::check_step(x, index);
    }
    return {std::move(x), std::move(trace)};
}

// Heun (improved Euler): predictor step to the next level, trapezoidal
// correction with the slope there; the final step onto sigma = 0 stays a
// plain Euler step since the slope is undefined at zero.
inline std::pair<DiffusionTensor, RolloutTrace> heun_rollout(const DenoiserInterface& denoiser,
                                                             const DiffusionTensor* cond,
                                                             const SigmaSchedule& schedule,
                                                             DiffusionTensor init,
                                                             const RolloutOptions& opts = {}) {
    const std::vector<double>& sigmas = detail::rollout_sigmas(schedule);
    int n = static_cast<int>(sigmas.size());
    DiffusionTensor x = std::move(init);
    RolloutTrace trace;
    trace.steps.reserve(static_cast<std::size_t>(n));
    double sign = opts.reverse_drift_sign ? -1.0 : 1.0;

    for (int j = 0; j < n; ++j) {
        double sigma = sigmas[j];
        double sigma_next = j + 1 < n ? sigmas[j + 1] : 0.0;
        int index = n - 1 - j;
        trace.steps.push_back({index, sigma,
                               opts.record_snapshots ? std::optional<DiffusionTensor>(x)
                                                     : std::nullopt});

        double dt = sigma - sigma_next;
        DiffusionTensor d = detail::eval_checked(denoiser, x, cond, sigma);
        std::vector<double> d1(x.data.size());
        for (std::size_t i = 0; i < x.data.size(); ++i)
            d1[i] = sign * (x.data[i] - d.data[i]) / sigma;

        DiffusionTensor xe = x;
        for (std::size_t i = 0; i < x.data.size(); ++i) xe.data[i] -= dt * d1[i];

        if (sigma_next > 0.0) {
            DiffusionTensor d2t = detail::eval_checked(denoiser, xe, cond, sigma_next);
            for (std::size_t i = 0; i < x.data.size(); ++i) {
                double d2 = sign * (xe.data[i] - d2t.data[i]) / sigma_next;
                x.data[i] -= dt * 0.5 * (d1[i] + d2);
            }
        } else {
            x = std::move(xe);
        }
        detail::check_step(x, index);
    }
    return {std::move(x), std::move(trace)};
}

// Score approximation: grad log p(x; sigma) ~= (D(x; sigma) - x) / sigma^2
inline DiffusionTensor score_estimate(const DenoiserInterface& denoiser, const DiffusionTensor& x,
                                      const DiffusionTensor* cond, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("score_estimate: sigma must be > 0");
    DiffusionTensor d = detail::eval_checked(denoiser, x, cond, sigma);
    double inv = 1.0 / (sigma * sigma);
    for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] = (d.data[i] - x.data[i]) * inv;
    return d;
}

// Euler rollout with snapshots; each state at level sigma_i is compared to a
// clean reference, paired with phi(sigma_i). Returned in rollout order
// (descending sigma).
inline std::vector<std::pair<double, double>> trajectory_ssim_curve(
    const DenoiserInterface& denoiser, const DiffusionTensor* cond, const SigmaSchedule& schedule,
    const TransformSpec& phi, DiffusionTensor init, const ImageBuffer& reference,
    const SsimParams& ssim_params = {}) {
    RolloutOptions opts;
    opts.record_snapshots = true;
    auto [final_x, trace] = euler_rollout(denoiser, cond, schedule, std::move(init), opts);

    std::vector<std::pair<double, double>> curve;
    curve.reserve(trace.steps.size());
    for (const TraceStep& step : trace.steps) {
        ImageBuffer img = from_diffusion(*step.snapshot);
        curve.emplace_back(apply(phi, step.sigma), ssim(img, reference, ssim_params));
    }
    return curve;
}

}  // namespace ssimsched
