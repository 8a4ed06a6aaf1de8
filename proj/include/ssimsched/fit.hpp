#pragma once

#include <algorithm>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "image.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "schedule.hpp"
#include "transforms.hpp"

namespace ssimsched {

struct ProfilePoint {
    double sigma;
    double phi;
    double mean_ssim;
};

struct DegradationProfile {
    TransformSpec spec;
    std::vector<ProfilePoint> points;  // sorted by sigma ascending
    double r_squared = 0.0;
};

// Ordinary least squares of y on x; R^2 = 1 - SS_res/SS_tot. When all y are
// equal, SS_tot = 0 and the convention is 1 (the fit is the constant).
inline double r_squared(std::span<const std::pair<double, double>> points) {
    std::size_t n = points.size();
    if (n < 2) throw DegenerateInputError("r_squared: need at least 2 points");

    double mx = 0.0, my = 0.0;
    for (auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (auto& [x, y] : points) {
        double dx = x - mx, dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw DegenerateInputError("r_squared: all x equal");

    double slope = sxy / sxx;
    double ss_res = 0.0;
    for (auto& [x, y] : points) {
        double e = y - (my + slope * (x - mx));
        ss_res += e * e;
    }
    if (syy == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / syy;
}

// Mean SSIM between each clean image and its corrupted version at every given
// sigma, averaged over corpus x draws in index order (deterministic
// reduction). Streams are keyed by (level, image, draw); the caller's key
// carries any higher-level identity such as the candidate transform.
inline std::vector<double> profile_at_sigmas(const std::vector<ImageBuffer>& corpus,
                                             std::span<const double> sigmas, int draws,
                                             StreamKey key, const SsimParams& params = {}) {
    if (corpus.empty()) throw EmptyCorpusError("profile: empty corpus");
    if (draws < 1) throw DomainError("profile: draws must be >= 1");

    std::vector<DiffusionTensor> clean;
    clean.reserve(corpus.size());
    for (const ImageBuffer& img : corpus) clean.push_back(to_diffusion(img));

    std::vector<double> means(sigmas.size(), 0.0);
    for (std::size_t li = 0; li < sigmas.size(); ++li) {
        double acc = 0.0;
        StreamKey level_key = key.child(li);
        for (std::size_t j = 0; j < corpus.size(); ++j) {
            StreamKey image_key = level_key.child(j);
            for (int d = 0; d < draws; ++d) {
                GaussianRng rng = image_key.child(static_cast<std::uint64_t>(d)).gaussian();
                ImageBuffer noisy = from_diffusion(corrupt(clean[j], sigmas[li], rng));
                acc += ssim(corpus[j], noisy, params);
            }
        }
        means[li] = acc / (static_cast<double>(corpus.size()) * draws);
    }
    return means;
}

// Degradation profile on the candidate's own phi-spaced grid, with the
// linearity score of mean SSIM against phi(sigma).
inline DegradationProfile profile(const std::vector<ImageBuffer>& corpus, const TransformSpec& spec,
                                  int n_levels, double sigma_min, double sigma_max, int draws,
                                  StreamKey key, const SsimParams& params = {}) {
    if (n_levels < 3) throw DomainError("profile: need at least 3 levels");
    SigmaSchedule sched = phi_schedule(spec, sigma_min, sigma_max, n_levels);
    std::vector<double> means = profile_at_sigmas(corpus, sched.sigmas, draws, key, params);

    DegradationProfile prof;
    prof.spec = spec;
    prof.points.reserve(sched.size());
    std::vector<std::pair<double, double>> pts;
    pts.reserve(sched.size());
    for (std::size_t i = 0; i < sched.size(); ++i) {
        double phi = apply(spec, sched.sigmas[i]);
        prof.points.push_back({sched.sigmas[i], phi, means[i]});
        pts.emplace_back(phi, means[i]);
    }
    prof.r_squared = r_squared(pts);
    return prof;
}

// Profiles every candidate on its own grid with a per-candidate stream (so
// evaluation order cannot matter) and ranks by R^2, ties resolved by input
// order.
inline std::vector<DegradationProfile> select_phi(const std::vector<ImageBuffer>& corpus,
                                                  const std::vector<TransformSpec>& candidates,
                                                  int n_levels, double sigma_min, double sigma_max,
                                                  int draws, StreamKey key,
                                                  const SsimParams& params = {}) {
    std::vector<DegradationProfile> profiles;
    profiles.reserve(candidates.size());
    for (const TransformSpec& cand : candidates)
        profiles.push_back(profile(corpus, cand, n_levels, sigma_min, sigma_max, draws,
                                   key.child(format_spec(cand)), params));
    std::stable_sort(profiles.begin(), profiles.end(),
                     [](const DegradationProfile& a, const DegradationProfile& b) {
                         return a.r_squared > b.r_squared;
                     });
    return profiles;
}

}  // namespace ssimsched
