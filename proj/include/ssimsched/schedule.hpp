#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "image.hpp"
#include "rng.hpp"
#include "transforms.hpp"

namespace ssimsched {

enum class ScheduleOrder { Ascending, Descending };
enum class ScheduleSource { PhiSpace, EdmRho, DdpmCosine };

struct SigmaSchedule {
    std::vector<double> sigmas;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    ScheduleOrder order = ScheduleOrder::Ascending;
    ScheduleSource source = ScheduleSource::PhiSpace;

    TransformSpec transform;  // PhiSpace only
    double rho = 0.0;         // EdmRho only
    int t_steps = 0;          // DdpmCosine only

    std::size_t size() const { return sigmas.size(); }

    SigmaSchedule reversed() const {
        SigmaSchedule out = *this;
        std::reverse(out.sigmas.begin(), out.sigmas.end());
        out.order = order == ScheduleOrder::Ascending ? ScheduleOrder::Descending
                                                      : ScheduleOrder::Ascending;
        return out;
    }

    SigmaSchedule descending() const {
        return order == ScheduleOrder::Descending ? *this : reversed();
    }
};

namespace detail {

inline void validate_endpoints(double sigma_min, double sigma_max, int n) {
    if (!(sigma_min > 0.0) || !(sigma_max > sigma_min))
        throw DomainError("schedule: need 0 < sigma_min < sigma_max");
    if (n < 2) throw DomainError("schedule: need at least 2 levels");
}

}  // namespace detail

// Levels equidistant in phi-space: sigma_i = phi^-1(phi(min) + t_i*(phi(max)-phi(min))).
// Endpoints are pinned exactly.
inline SigmaSchedule phi_schedule(const TransformSpec& spec, double sigma_min, double sigma_max,
                                  int n, ScheduleOrder order = ScheduleOrder::Ascending) {
    detail::validate_endpoints(sigma_min, sigma_max, n);
    double a = apply(spec, sigma_min);
    double b = apply(spec, sigma_max);

    SigmaSchedule sched;
    sched.source = ScheduleSource::PhiSpace;
    sched.transform = spec;
    sched.sigma_min = sigma_min;
    sched.sigma_max = sigma_max;
    sched.order = ScheduleOrder::Ascending;
    sched.sigmas.resize(static_cast<std::size_t>(n));
    sched.sigmas.front() = sigma_min;
    sched.sigmas.back() = sigma_max;
    for (int i = 1; i < n - 1; ++i) {
        double t = static_cast<double>(i) / (n - 1);
        sched.sigmas[i] = invert(spec, a + t * (b - a));
    }
    if (order == ScheduleOrder::Descending) sched = sched.reversed();
    return sched;
}

// sigma_i = (max^(1/rho) + t_i*(min^(1/rho) - max^(1/rho)))^rho, descending.
inline SigmaSchedule edm_rho_schedule(double rho, double sigma_min, double sigma_max, int n) {
    detail::validate_endpoints(sigma_min, sigma_max, n);
    if (!(rho >= 1.0)) throw DomainError("edm_rho_schedule: rho must be >= 1");

    SigmaSchedule sched;
    sched.source = ScheduleSource::EdmRho;
    sched.rho = rho;
    sched.sigma_min = sigma_min;
    sched.sigma_max = sigma_max;
    sched.order = ScheduleOrder::Descending;
    sched.sigmas.resize(static_cast<std::size_t>(n));
    sched.sigmas.front() = sigma_max;
    sched.sigmas.back() = sigma_min;
    double max_r = std::pow(sigma_max, 1.0 / rho);
    double min_r = std::pow(sigma_min, 1.0 / rho);
    for (int i = 1; i < n - 1; ++i) {
        double t = static_cast<double>(i) / (n - 1);
        sched.sigmas[i] = std::pow(max_r + t * (min_r - max_r), rho);
    }
    return sched;
}

// alpha_bar = 1 / (1 + sigma^2) for the DDPM-scaled corruption sqrt(ab)*x + sqrt(1-ab)*eps
inline double alpha_bar_from_sigma(double sigma) { return 1.0 / (1.0 + sigma * sigma); }

// Cosine alpha_bar comparator: alpha_bar(t) = f(t)/f(0) with
// f(t) = cos^2(((t/T + s)/(1 + s)) * pi/2), s = 0.008, mapped to the
// equivalent sigma_t = sqrt((1 - ab)/ab) for t = 0..T-1. Ascending, starts
// at sigma = 0 (clean endpoint).
inline SigmaSchedule ddpm_cosine_equivalent_sigmas(int t_steps) {
    if (t_steps < 2) throw DomainError("ddpm_cosine_equivalent_sigmas: need t_steps >= 2");
    const double s = 0.008;
    const double pi = std::numbers::pi;
    auto f = [&](double t) {
        double c = std::cos(((t / t_steps + s) / (1.0 + s)) * pi / 2.0);
        return c * c;
    };
    double f0 = f(0.0);

    SigmaSchedule sched;
    sched.source = ScheduleSource::DdpmCosine;
    sched.t_steps = t_steps;
    sched.order = ScheduleOrder::Ascending;
    sched.sigmas.resize(static_cast<std::size_t>(t_steps));
    for (int t = 0; t < t_steps; ++t) {
        double ab = f(static_cast<double>(t)) / f0;
        sched.sigmas[t] = t == 0 ? 0.0 : std::sqrt((1.0 - ab) / ab);
    }
    sched.sigma_min = sched.sigmas.front();
    sched.sigma_max = sched.sigmas.back();
    return sched;
}

// x = x0 + sigma * eps, eps ~ N(0, I)
inline DiffusionTensor corrupt(const DiffusionTensor& x0, double sigma, GaussianRng& rng) {
    if (!(sigma >= 0.0)) throw DomainError("corrupt: sigma must be >= 0");
    DiffusionTensor out = x0;
    if (sigma > 0.0)
        for (double& v : out.data) v += sigma * rng.normal();
    return out;
}

// sqrt(alpha_bar) * x0 + sqrt(1 - alpha_bar) * eps with alpha_bar = 1/(1+sigma^2);
// the discrete-schedule corruption that matches a given equivalent sigma.
inline DiffusionTensor corrupt_ddpm(const DiffusionTensor& x0, double sigma_equiv, GaussianRng& rng) {
    if (!(sigma_equiv >= 0.0)) throw DomainError("corrupt_ddpm: sigma must be >= 0");
    double ab = alpha_bar_from_sigma(sigma_equiv);
    double sa = std::sqrt(ab), sn = std::sqrt(1.0 - ab);
    DiffusionTensor out = x0;
    if (sigma_equiv > 0.0)
        for (double& v : out.data) v = sa * v + sn * rng.normal();
    return out;
}

// Draws sigma such that phi(sigma) is uniform on [phi(sigma_min), phi(sigma_max)].
inline double sample_sigma_uniform_phi(const TransformSpec& spec, double sigma_min,
                                       double sigma_max, GaussianRng& rng) {
    detail::validate_endpoints(sigma_min, sigma_max, 2);
    double a = apply(spec, sigma_min);
    double b = apply(spec, sigma_max);
    double v = a + (b - a) * rng.uniform();
    double sigma = invert(spec, v);
    return std::clamp(sigma, sigma_min, sigma_max);
}

}  // namespace ssimsched
