#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "errors.hpp"
#include "image.hpp"

namespace ssimsched {

enum class ChannelPolicy { Luma, PerChannelMean };

struct SsimParams {
    int window_size = 11;
    double window_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
    ChannelPolicy channel_policy = ChannelPolicy::PerChannelMean;
};

inline constexpr double kMsSsimWeights5[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

namespace detail {

inline void validate_ssim_params(const SsimParams& p) {
    if (p.window_size < 3 || p.window_size % 2 == 0)
        throw DomainError("SsimParams: window_size must be odd and >= 3");
    if (!(p.window_sigma > 0.0)) throw DomainError("SsimParams: window_sigma must be > 0");
    if (!(p.k1 > 0.0) || !(p.k2 > 0.0)) throw DomainError("SsimParams: k1 and k2 must be > 0");
    if (!(p.dynamic_range > 0.0)) throw DomainError("SsimParams: dynamic_range must be > 0");
}

// valid-mode separable convolution with a symmetric 1-D kernel
inline void conv_valid(const std::vector<double>& src, int w, int h,
                       const std::vector<double>& taps,
                       std::vector<double>& tmp, std::vector<double>& dst) {
    int n = static_cast<int>(taps.size());
    int wv = w - n + 1, hv = h - n + 1;
    tmp.assign(static_cast<std::size_t>(wv) * h, 0.0);
    for (int y = 0; y < h; ++y) {
        const double* s = &src[static_cast<std::size_t>(y) * w];
        double* t = &tmp[static_cast<std::size_t>(y) * wv];
        for (int k = 0; k < n; ++k) {
            double wk = taps[k];
            for (int x = 0; x < wv; ++x) t[x] += wk * s[x + k];
        }
    }
    dst.assign(static_cast<std::size_t>(wv) * hv, 0.0);
    for (int k = 0; k < n; ++k) {
        double wk = taps[k];
        for (int y = 0; y < hv; ++y) {
            const double* t = &tmp[static_cast<std::size_t>(y + k) * wv];
            double* d = &dst[static_cast<std::size_t>(y) * wv];
            for (int x = 0; x < wv; ++x) d[x] += wk * t[x];
        }
    }
}

struct PlaneSsim {
    double mean_ssim;  // mean of l*cs over valid windows
    double mean_cs;    // mean of the contrast-structure term alone
};

inline PlaneSsim plane_ssim(const std::vector<double>& pa, const std::vector<double>& pb,
                            int w, int h, const SsimParams& p) {
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
    std::vector<double> taps = gaussian_taps(p.window_size, p.window_sigma);

    std::size_t n = pa.size();
    std::vector<double> aa(n), bb(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
        aa[i] = pa[i] * pa[i];
        bb[i] = pb[i] * pb[i];
        ab[i] = pa[i] * pb[i];
    }

    std::vector<double> tmp, mu_a, mu_b, m_aa, m_bb, m_ab;
    conv_valid(pa, w, h, taps, tmp, mu_a);
    conv_valid(pb, w, h, taps, tmp, mu_b);
    conv_valid(aa, w, h, taps, tmp, m_aa);
    conv_valid(bb, w, h, taps, tmp, m_bb);
    conv_valid(ab, w, h, taps, tmp, m_ab);

    double sum_ssim = 0.0, sum_cs = 0.0;
    std::size_t nv = mu_a.size();
    for (std::size_t i = 0; i < nv; ++i) {
        double ma = mu_a[i], mb = mu_b[i];
        double va = m_aa[i] - ma * ma;
        double vb = m_bb[i] - mb * mb;
        double cov = m_ab[i] - ma * mb;
        double l = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
        double cs = (2.0 * cov + c2) / (va + vb + c2);
        sum_ssim += l * cs;
        sum_cs += cs;
    }
    return {sum_ssim / nv, sum_cs / nv};
}

inline std::vector<double> extract_plane(const ImageBuffer& img, int c) {
    std::vector<double> p(static_cast<std::size_t>(img.width) * img.height);
    const double* s = img.data.data() + c;
    for (std::size_t i = 0; i < p.size(); ++i, s += img.channels) p[i] = *s;
    return p;
}

inline std::vector<std::vector<double>> planes_for_policy(const ImageBuffer& img, ChannelPolicy policy) {
    if (policy == ChannelPolicy::Luma) {
        ImageBuffer g = to_grayscale(img);
        return {std::move(g.data)};
    }
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(img.channels));
    for (int c = 0; c < img.channels; ++c) out.push_back(extract_plane(img, c));
    return out;
}

// 2x2 mean pooling, floor dimensions
inline std::vector<double> downsample2(const std::vector<double>& p, int w, int h, int& wo, int& ho) {
    wo = w / 2;
    ho = h / 2;
    std::vector<double> out(static_cast<std::size_t>(wo) * ho);
    for (int y = 0; y < ho; ++y)
        for (int x = 0; x < wo; ++x) {
            std::size_t i = static_cast<std::size_t>(2 * y) * w + 2 * x;
            out[static_cast<std::size_t>(y) * wo + x] =
                0.25 * (p[i] + p[i + 1] + p[i + w] + p[i + w + 1]);
        }
    return out;
}

}  // namespace detail

inline double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& p = {}) {
    detail::validate_ssim_params(p);
    if (!a.same_shape(b)) throw DimensionError("ssim: image shapes differ");
    if (std::min(a.width, a.height) < p.window_size)
        throw WindowError("ssim: image smaller than window");

    auto pa = detail::planes_for_policy(a, p.channel_policy);
    auto pb = detail::planes_for_policy(b, p.channel_policy);
    double acc = 0.0;
    for (std::size_t c = 0; c < pa.size(); ++c)
        acc += detail::plane_ssim(pa[c], pb[c], a.width, a.height, p).mean_ssim;
    return acc / pa.size();
}

// Product over scales of mean contrast-structure terms; the coarsest scale
// contributes the full SSIM mean (luminance applied there), so a single
// scale with weight 1 reduces exactly to ssim().
inline double ms_ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& p = {},
                      std::span<const double> weights = kMsSsimWeights5) {
    detail::validate_ssim_params(p);
    if (!a.same_shape(b)) throw DimensionError("ms_ssim: image shapes differ");
    if (weights.empty()) throw DomainError("ms_ssim: weights must be nonempty");
    int scales = static_cast<int>(weights.size());
    long min_side = std::min(a.width, a.height);
    if (min_side < static_cast<long>(p.window_size) << (scales - 1))
        throw ScaleError("ms_ssim: image too small for requested scale count");

    auto pa = detail::planes_for_policy(a, p.channel_policy);
    auto pb = detail::planes_for_policy(b, p.channel_policy);

    double acc = 0.0;
    for (std::size_t c = 0; c < pa.size(); ++c) {
        std::vector<double> xa = pa[c], xb = pb[c];
        int w = a.width, h = a.height;
        double value = 1.0;
        for (int s = 0; s < scales; ++s) {
            detail::PlaneSsim st = detail::plane_ssim(xa, xb, w, h, p);
            double term = (s == scales - 1) ? st.mean_ssim : st.mean_cs;
            value *= std::pow(std::max(term, 0.0), weights[s]);
            if (s + 1 < scales) {
                int wo, ho;
                xa = detail::downsample2(xa, w, h, wo, ho);
                xb = detail::downsample2(xb, w, h, wo, ho);
                w = wo;
                h = ho;
            }
        }
        acc += value;
    }
    return acc / pa.size();
}

// 10*log10(L^2 / MSE); +infinity for identical inputs
inline double psnr(const ImageBuffer& a, const ImageBuffer& b, double dynamic_range = 1.0) {
    if (!a.same_shape(b)) throw DimensionError("psnr: image shapes differ");
    if (!(dynamic_range > 0.0)) throw DomainError("psnr: dynamic_range must be > 0");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a.data[i] - b.data[i];
        mse += d * d;
    }
    mse /= a.size();
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(dynamic_range * dynamic_range / mse);
}

}  // namespace ssimsched
