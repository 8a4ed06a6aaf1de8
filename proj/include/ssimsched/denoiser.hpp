#pragma once

#include "image.hpp"

namespace ssimsched {

// A denoiser maps a noisy tensor at level sigma to an estimate of the clean
// tensor. Implementations must be safe for concurrent evaluate() calls.
struct DenoiserInterface {
    virtual ~DenoiserInterface() = default;
    virtual DiffusionTensor evaluate(const DiffusionTensor& x, const DiffusionTensor* cond,
                                     double sigma) const = 0;
};

// The inner network an EDM-style composition wraps: takes the pre-scaled
// input plus the scalar noise embedding and returns a residual of the same
// shape.
struct RawNetworkInterface {
    virtual ~RawNetworkInterface() = default;
    virtual DiffusionTensor evaluate(const DiffusionTensor& scaled_x, const DiffusionTensor* cond,
                                     double c_noise) const = 0;
};

}  // namespace ssimsched
