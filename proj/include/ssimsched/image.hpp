#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace ssimsched {

// H x W x C raster, row-major, channel-interleaved, every sample in [0, 1].
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data;

    ImageBuffer() = default;

    ImageBuffer(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c) {
        if (w < 1 || h < 1) throw DimensionError("ImageBuffer: width and height must be >= 1");
        if (c != 1 && c != 3 && c != 4) throw DimensionError("ImageBuffer: channels must be 1, 3 or 4");
        data.assign(static_cast<std::size_t>(w) * h * c, fill);
    }

    std::size_t size() const { return data.size(); }

    double& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    void clamp01() {
        for (double& v : data) v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }

    bool same_shape(const ImageBuffer& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// Same layout as ImageBuffer but with unbounded sample range; this is the
// space in which noise is added and the reverse ODE is integrated.
struct DiffusionTensor {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data;

    DiffusionTensor() = default;

    DiffusionTensor(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c) {
        if (w < 1 || h < 1) throw DimensionError("DiffusionTensor: width and height must be >= 1");
        if (c < 1) throw DimensionError("DiffusionTensor: channels must be >= 1");
        data.assign(static_cast<std::size_t>(w) * h * c, fill);
    }

    std::size_t size() const { return data.size(); }

    bool same_shape(const DiffusionTensor& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

// BT.601 luma; 1-channel input passes through unchanged.
inline ImageBuffer to_grayscale(const ImageBuffer& img) {
    if (img.channels == 1) return img;
    if (img.channels != 3) throw FormatError("to_grayscale: expected 1 or 3 channels");
    ImageBuffer out(img.width, img.height, 1);
    const double* s = img.data.data();
    double* d = out.data.data();
    std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i, s += 3)
        d[i] = 0.299 * s[0] + 0.587 * s[1] + 0.114 * s[2];
    return out;
}

// [0,1] -> [-1,1]
inline DiffusionTensor to_diffusion(const ImageBuffer& img) {
    DiffusionTensor t(img.width, img.height, img.channels);
    for (std::size_t i = 0; i < img.size(); ++i) t.data[i] = 2.0 * img.data[i] - 1.0;
    return t;
}

// clamp((x+1)/2, 0, 1); NaN anywhere is an error rather than a silent clamp
inline ImageBuffer from_diffusion(const DiffusionTensor& t) {
    if (t.channels != 1 && t.channels != 3 && t.channels != 4)
        throw FormatError("from_diffusion: channels must be 1, 3 or 4");
    ImageBuffer img(t.width, t.height, t.channels);
    for (std::size_t i = 0; i < t.size(); ++i) {
        double s = 0.5 * (t.data[i] + 1.0);
        if (std::isnan(s)) throw NonFiniteError("from_diffusion: NaN sample");
        img.data[i] = s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s);
    }
    return img;
}

// Tiles in row-major order; unfilled cells stay black.
inline ImageBuffer make_grid(const std::vector<ImageBuffer>& images, int rows, int cols) {
    if (rows < 1 || cols < 1) throw DomainError("make_grid: rows and cols must be >= 1");
    if (images.empty()) throw DimensionError("make_grid: no images");
    if (images.size() > static_cast<std::size_t>(rows) * cols)
        throw DimensionError("make_grid: more images than cells");
    const ImageBuffer& first = images.front();
    for (const ImageBuffer& im : images)
        if (!im.same_shape(first)) throw DimensionError("make_grid: mismatched tile shapes");

    ImageBuffer out(cols * first.width, rows * first.height, first.channels, 0.0);
    for (std::size_t k = 0; k < images.size(); ++k) {
        int r = static_cast<int>(k) / cols;
        int c = static_cast<int>(k) % cols;
        const ImageBuffer& im = images[k];
        for (int y = 0; y < im.height; ++y) {
            const double* src = &im.data[static_cast<std::size_t>(y) * im.width * im.channels];
            double* dst = &out.at(c * im.width, r * im.height + y, 0);
            std::copy(src, src + static_cast<std::size_t>(im.width) * im.channels, dst);
        }
    }
    return out;
}

namespace detail {

inline std::vector<double> gaussian_taps(int n, double sigma) {
    std::vector<double> w(static_cast<std::size_t>(n));
    double half = (n - 1) * 0.5, sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = (i - half) / sigma;
        w[i] = std::exp(-0.5 * d * d);
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable gaussian blur of a single plane with replicated borders.
inline void blur_replicate(std::vector<double>& plane, int w, int h, double sigma) {
    if (sigma <= 0.0) return;
    int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> taps = gaussian_taps(2 * radius + 1, sigma);
    std::vector<double> tmp(plane.size());

    for (int y = 0; y < h; ++y) {
        const double* row = &plane[static_cast<std::size_t>(y) * w];
        double* out = &tmp[static_cast<std::size_t>(y) * w];
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                int xx = std::clamp(x + k, 0, w - 1);
                acc += taps[k + radius] * row[xx];
            }
            out[x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                int yy = std::clamp(y + k, 0, h - 1);
                acc += taps[k + radius] * tmp[static_cast<std::size_t>(yy) * w + x];
            }
            plane[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
}

}  // namespace detail

namespace detail {

// color draw pushed toward the ends of [0,1], clipped to [0.02, 0.98]
inline double saturated_color(GaussianRng& rng, double push) {
    double v = 0.5 + (0.5 + push) * (2.0 * rng.uniform() - 1.0) * 0.5;
    return std::clamp(v, 0.02, 0.98);
}

}  // namespace detail

// Deterministic synthetic corpus: shallow color gradients over saturated
// fills, a pile of opaque hard-edged outlined ellipses, plus band-limited
// noise. Flat regions lose SSIM under the faintest corruption while the
// saturated edges keep it alive at large sigma, which makes the degradation
// statistics nondegenerate across the whole noise range at desk scale.
inline std::vector<ImageBuffer> synth_corpus(std::uint64_t seed, int count, int size) {
    if (count < 0) throw DomainError("synth_corpus: count must be >= 0");
    if (count > 0 && size < 1) throw DomainError("synth_corpus: size must be >= 1");

    std::vector<ImageBuffer> out;
    out.reserve(static_cast<std::size_t>(count));
    const double pi = std::numbers::pi;

    for (int n = 0; n < count; ++n) {
        GaussianRng rng = StreamKey::root(seed).child("synth").child(static_cast<std::uint64_t>(n)).gaussian();
        ImageBuffer img(size, size, 3);

        // background: shallow linear gradient around a saturated base color
        double bg[3], slope[3];
        for (int c = 0; c < 3; ++c) bg[c] = detail::saturated_color(rng, 0.7);
        double theta = rng.uniform() * pi;
        double gx = std::cos(theta) / size, gy = std::sin(theta) / size;
        for (int c = 0; c < 3; ++c) slope[c] = 0.12 * (2.0 * rng.uniform() - 1.0);
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                double t = gx * x + gy * y;
                for (int c = 0; c < 3; ++c) img.at(x, y, c) = bg[c] + slope[c] * t;
            }

        // opaque ellipses with ~1px edges and dark outlines
        int n_ell = 5 + static_cast<int>(rng.uniform() * 6.0);
        for (int e = 0; e < n_ell; ++e) {
            double ecx = (0.1 + 0.8 * rng.uniform()) * size;
            double ecy = (0.1 + 0.8 * rng.uniform()) * size;
            double ax = (0.08 + 0.22 * rng.uniform()) * size;
            double ay = (0.08 + 0.22 * rng.uniform()) * size;
            double rot = rng.uniform() * pi;
            double col[3];
            for (int c = 0; c < 3; ++c) col[c] = detail::saturated_color(rng, 0.7);
            double cr = std::cos(rot), sr = std::sin(rot);
            double feather = 0.8 / std::min(ax, ay);
            double line = 1.2 / std::min(ax, ay);
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x) {
                    double dx = x - ecx, dy = y - ecy;
                    double u = (cr * dx + sr * dy) / ax;
                    double v = (-sr * dx + cr * dy) / ay;
                    double r = std::sqrt(u * u + v * v);
                    double a = std::clamp((1.0 - r) / feather, 0.0, 1.0);
                    if (a > 0.0)
                        for (int c = 0; c < 3; ++c)
                            img.at(x, y, c) = (1.0 - a) * img.at(x, y, c) + a * col[c];
                    double edge = std::clamp((line - std::fabs(r - 1.0)) / feather, 0.0, 1.0) * 0.85;
                    if (edge > 0.0)
                        for (int c = 0; c < 3; ++c)
                            img.at(x, y, c) = (1.0 - edge) * img.at(x, y, c) + edge * 0.04;
                }
        }

        // noise: a faint smooth band plus fine per-pixel texture
        std::vector<double> plane(static_cast<std::size_t>(size) * size);
        auto add_band = [&](int c, double band_amp, double band_sigma) {
            for (double& v : plane) v = rng.normal();
            if (band_sigma > 0.0) detail::blur_replicate(plane, size, size, band_sigma);
            double m = 0.0, m2 = 0.0;
            for (double v : plane) { m += v; m2 += v * v; }
            m /= plane.size();
            double sd = std::sqrt(std::max(m2 / plane.size() - m * m, 1e-12));
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x)
                    img.at(x, y, c) += band_amp * (plane[static_cast<std::size_t>(y) * size + x] - m) / sd;
        };
        for (int c = 0; c < 3; ++c) add_band(c, 0.02, 2.0);
        for (int c = 0; c < 3; ++c) add_band(c, 0.03, 0.0);

        img.clamp01();
        out.push_back(std::move(img));
    }
    return out;
}

}  // namespace ssimsched
