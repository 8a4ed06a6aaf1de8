#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "image.hpp"
#include "rng.hpp"

namespace ssimsched {

struct XdogParams {
    double sigma_small = 0.8;      // narrow gaussian std, pixels
    double k = 1.6;                // wide/narrow std ratio
    double tau = 0.98;             // wide-blur weight in the difference
    double epsilon = -0.05;        // soft-threshold level on the DoG response
    double phi_sharpness = 200.0;  // tanh steepness below the threshold
};

struct TpsWarpParams {
    int grid = 4;                  // control points per side
    double jitter_std = 0.03;      // displacement std as a fraction of image side
    double rotation_range = 15.0;  // max |angle| in degrees, used by callers that add rotation
};

namespace detail {

inline void validate_xdog(const XdogParams& p) {
    if (!(p.sigma_small > 0.0)) throw DomainError("XdogParams: sigma_small must be > 0");
    if (!(p.k > 1.0)) throw DomainError("XdogParams: k must be > 1");
    if (!(p.phi_sharpness > 0.0)) throw DomainError("XdogParams: phi_sharpness must be > 0");
}

inline void validate_tps(const TpsWarpParams& p) {
    if (p.grid < 2) throw DomainError("TpsWarpParams: grid must be >= 2");
    if (!(p.jitter_std >= 0.0)) throw DomainError("TpsWarpParams: jitter_std must be >= 0");
    if (!(p.rotation_range >= 0.0 && p.rotation_range <= 45.0))
        throw DomainError("TpsWarpParams: rotation_range must be in [0, 45]");
}

// Dense partial-pivot LU solve of A * X = B in place; B holds m right-hand
// sides column-interleaved (row-major n x m).
inline void solve_linear(std::vector<double> a, int n, std::vector<double>& b, int m) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::fabs(a[static_cast<std::size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double v = std::fabs(a[static_cast<std::size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (!(best > 1e-12)) throw SingularSystemError("solve_linear: singular system");
        if (pivot != col) {
            for (int c = 0; c < n; ++c)
                std::swap(a[static_cast<std::size_t>(pivot) * n + c],
                          a[static_cast<std::size_t>(col) * n + c]);
            for (int c = 0; c < m; ++c)
                std::swap(b[static_cast<std::size_t>(pivot) * m + c],
                          b[static_cast<std::size_t>(col) * m + c]);
        }
        double inv = 1.0 / a[static_cast<std::size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            double f = a[static_cast<std::size_t>(r) * n + col] * inv;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                a[static_cast<std::size_t>(r) * n + c] -= f * a[static_cast<std::size_t>(col) * n + c];
            for (int c = 0; c < m; ++c)
                b[static_cast<std::size_t>(r) * m + c] -= f * b[static_cast<std::size_t>(col) * m + c];
        }
    }
    for (int col = n - 1; col >= 0; --col) {
        double inv = 1.0 / a[static_cast<std::size_t>(col) * n + col];
        for (int c = 0; c < m; ++c) {
            double acc = b[static_cast<std::size_t>(col) * m + c];
            for (int k = col + 1; k < n; ++k)
                acc -= a[static_cast<std::size_t>(col) * n + k] * b[static_cast<std::size_t>(k) * m + c];
            b[static_cast<std::size_t>(col) * m + c] = acc * inv;
        }
    }
}

inline double tps_kernel(double d2) { return d2 > 0.0 ? d2 * std::log(d2) : 0.0; }

inline double sample_bilinear(const ImageBuffer& img, double x, double y, int c) {
    x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
    int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    int x1 = std::min(x0 + 1, img.width - 1), y1 = std::min(y0 + 1, img.height - 1);
    double fx = x - x0, fy = y - y0;
    double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
    double bot = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
    return (1.0 - fy) * top + fy * bot;
}

}  // namespace detail

// Difference-of-gaussians edge sketch: D = G_sigma - tau*G_{k*sigma}, then
// 1 where D >= epsilon and 1 + tanh(phi*(D - epsilon)) below it. White in
// flat regions, dark where the response dips along edges.
inline ImageBuffer xdog_sketch(const ImageBuffer& image, const XdogParams& params = {}) {
    detail::validate_xdog(params);
    if (image.width < 3 || image.height < 3)
        throw DimensionError("xdog_sketch: image too small");

    ImageBuffer gray = to_grayscale(image);
    std::vector<double> g1 = gray.data;
    std::vector<double> g2 = gray.data;
    detail::blur_replicate(g1, gray.width, gray.height, params.sigma_small);
    detail::blur_replicate(g2, gray.width, gray.height, params.sigma_small * params.k);

    ImageBuffer out(gray.width, gray.height, 1);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double d = g1[i] - params.tau * g2[i];
        double v = d >= params.epsilon
                       ? 1.0
                       : 1.0 + std::tanh(params.phi_sharpness * (d - params.epsilon));
        out.data[i] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

// Thin-plate-spline warp: a grid of control points is jittered, the spline
// fitted on the (jittered -> original) pairs so each output pixel maps back
// into the source, then bilinear resampling. Zero jitter is the identity.
inline ImageBuffer tps_warp(const ImageBuffer& image, const TpsWarpParams& params, GaussianRng& rng) {
    detail::validate_tps(params);
    if (params.jitter_std == 0.0) return image;

    const int g = params.grid;
    const int n = g * g;
    const double side = static_cast<double>(std::max(image.width, image.height));
    const double jitter = params.jitter_std * side;

    std::vector<double> sx(n), sy(n);
    for (int j = 0; j < g; ++j)
        for (int i = 0; i < g; ++i) {
            sx[static_cast<std::size_t>(j) * g + i] = static_cast<double>(i) * (image.width - 1) / (g - 1);
            sy[static_cast<std::size_t>(j) * g + i] = static_cast<double>(j) * (image.height - 1) / (g - 1);
        }

    for (int attempt = 0;; ++attempt) {
        std::vector<double> tx(n), ty(n);
        for (int i = 0; i < n; ++i) {
            tx[i] = sx[i] + jitter * rng.normal();
            ty[i] = sy[i] + jitter * rng.normal();
        }

        // (K P; P^T 0) system on the jittered points, values = source coords
        const int dim = n + 3;
        std::vector<double> a(static_cast<std::size_t>(dim) * dim, 0.0);
        std::vector<double> b(static_cast<std::size_t>(dim) * 2, 0.0);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                double dx = tx[r] - tx[c], dy = ty[r] - ty[c];
                a[static_cast<std::size_t>(r) * dim + c] = detail::tps_kernel(dx * dx + dy * dy);
            }
            a[static_cast<std::size_t>(r) * dim + n] = 1.0;
            a[static_cast<std::size_t>(r) * dim + n + 1] = tx[r];
            a[static_cast<std::size_t>(r) * dim + n + 2] = ty[r];
            a[static_cast<std::size_t>(n) * dim + r] = 1.0;
            a[static_cast<std::size_t>(n + 1) * dim + r] = tx[r];
            a[static_cast<std::size_t>(n + 2) * dim + r] = ty[r];
            b[static_cast<std::size_t>(r) * 2] = sx[r];
            b[static_cast<std::size_t>(r) * 2 + 1] = sy[r];
        }

        try {
            detail::solve_linear(std::move(a), dim, b, 2);
        } catch (const SingularSystemError&) {
            if (attempt == 0) continue;  // one retry with fresh jitter
            throw;
        }

        ImageBuffer out(image.width, image.height, image.channels);
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x) {
                double mx = b[static_cast<std::size_t>(n) * 2] +
                            b[static_cast<std::size_t>(n + 1) * 2] * x +
                            b[static_cast<std::size_t>(n + 2) * 2] * y;
                double my = b[static_cast<std::size_t>(n) * 2 + 1] +
                            b[static_cast<std::size_t>(n + 1) * 2 + 1] * x +
                            b[static_cast<std::size_t>(n + 2) * 2 + 1] * y;
                for (int r = 0; r < n; ++r) {
                    double dx = x - tx[r], dy = y - ty[r];
                    double u = detail::tps_kernel(dx * dx + dy * dy);
                    mx += b[static_cast<std::size_t>(r) * 2] * u;
                    my += b[static_cast<std::size_t>(r) * 2 + 1] * u;
                }
                for (int c = 0; c < image.channels; ++c)
                    out.at(x, y, c) = detail::sample_bilinear(image, mx, my, c);
            }
        out.clamp01();
        return out;
    }
}

// Rotation about the image center, bilinear sampling, border-replicate fill.
inline ImageBuffer rotate(const ImageBuffer& image, double angle_degrees) {
    if (angle_degrees == 0.0) return image;
    double theta = angle_degrees * std::numbers::pi / 180.0;
    double ct = std::cos(theta), st = std::sin(theta);
    double cx = (image.width - 1) * 0.5, cy = (image.height - 1) * 0.5;

    ImageBuffer out(image.width, image.height, image.channels);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            double dx = x - cx, dy = y - cy;
            double sx = cx + ct * dx + st * dy;
            double sy = cy - st * dx + ct * dy;
            for (int c = 0; c < image.channels; ++c)
                out.at(x, y, c) = detail::sample_bilinear(image, sx, sy, c);
        }
    return out;
}

// Channel-wise concatenation [R, G, B, sketch].
inline ImageBuffer build_cond(const ImageBuffer& reference, const ImageBuffer& sketch) {
    if (reference.channels != 3) throw DimensionError("build_cond: reference must have 3 channels");
    if (sketch.channels != 1) throw DimensionError("build_cond: sketch must have 1 channel");
    if (reference.width != sketch.width || reference.height != sketch.height)
        throw DimensionError("build_cond: dimensions differ");

    ImageBuffer out(reference.width, reference.height, 4);
    std::size_t npx = static_cast<std::size_t>(reference.width) * reference.height;
    for (std::size_t i = 0; i < npx; ++i) {
        out.data[4 * i] = reference.data[3 * i];
        out.data[4 * i + 1] = reference.data[3 * i + 1];
        out.data[4 * i + 2] = reference.data[3 * i + 2];
        out.data[4 * i + 3] = sketch.data[i];
    }
    return out;
}

}  // namespace ssimsched
