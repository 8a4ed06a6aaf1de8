#pragma once

#include <cmath>
#include <memory>
#include <utility>

#include "denoiser.hpp"
#include "errors.hpp"
#include "transforms.hpp"

namespace ssimsched {

struct PreconditionCoeffs {
    double c_skip;
    double c_out;
    double c_in;
    double c_noise;
};

// How the scalar noise level is embedded for the network: the EDM quarter-log
// or the value of a monotone sigma transform.
struct NoiseEmbedPolicy {
    enum class Mode { QuarterLog, PhiStar };
    Mode mode = Mode::QuarterLog;
    TransformSpec phi;

    static NoiseEmbedPolicy quarter_log() { return {}; }
    static NoiseEmbedPolicy phi_star(const TransformSpec& spec) {
        if (!spec.increasing())
            throw DomainError("NoiseEmbedPolicy: phi embedding must be strictly increasing");
        return {Mode::PhiStar, spec};
    }
};

// c_skip = sd^2/(s^2+sd^2), c_in = 1/sqrt(s^2+sd^2), c_out = s*c_in.
// edm_compat_out restores the extra sigma_data factor in c_out used by the
// original EDM parameterization.
inline PreconditionCoeffs coeffs(double sigma, double sigma_data, const NoiseEmbedPolicy& policy,
                                 bool edm_compat_out = false) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw DomainError("coeffs: sigma must be a finite positive value");
    if (!(sigma_data > 0.0)) throw DomainError("coeffs: sigma_data must be > 0");

    PreconditionCoeffs k;
    k.c_in = 1.0 / std::sqrt(sigma * sigma + sigma_data * sigma_data);
    k.c_skip = sigma_data * sigma_data * k.c_in * k.c_in;
    k.c_out = sigma * k.c_in;
    if (edm_compat_out) k.c_out *= sigma_data;
    k.c_noise = policy.mode == NoiseEmbedPolicy::Mode::QuarterLog ? 0.25 * std::log(sigma)
                                                                  : apply(policy.phi, sigma);
    return k;
}

// D(x; sigma) = c_skip*x + c_out*F(c_in*x, cond; c_noise)
class PreconditionedDenoiser final : public DenoiserInterface {
  public:
    PreconditionedDenoiser(std::shared_ptr<const RawNetworkInterface> raw, double sigma_data,
                           NoiseEmbedPolicy policy, bool edm_compat_out = false)
        : raw_(std::move(raw)),
          sigma_data_(sigma_data),
          policy_(std::move(policy)),
          edm_compat_out_(edm_compat_out) {
        if (!raw_) throw DomainError("PreconditionedDenoiser: null network");
        if (!(sigma_data_ > 0.0)) throw DomainError("PreconditionedDenoiser: sigma_data must be > 0");
    }

    DiffusionTensor evaluate(const DiffusionTensor& x, const DiffusionTensor* cond,
                             double sigma) const override {
        PreconditionCoeffs k = coeffs(sigma, sigma_data_, policy_, edm_compat_out_);
        DiffusionTensor scaled = x;
        for (double& v : scaled.data) v *= k.c_in;
        DiffusionTensor res = raw_->evaluate(scaled, cond, k.c_noise);
        if (!res.same_shape(x))
            throw ShapeError("PreconditionedDenoiser: network output shape mismatch");
        for (std::size_t i = 0; i < res.data.size(); ++i)
            res.data[i] = k.c_skip * x.data[i] + k.c_out * res.data[i];
        return res;
    }

  private:
    std::shared_ptr<const RawNetworkInterface> raw_;
    double sigma_data_;
    NoiseEmbedPolicy policy_;
    bool edm_compat_out_;
};

inline PreconditionedDenoiser compose_denoiser(std::shared_ptr<const RawNetworkInterface> raw,
                                               const NoiseEmbedPolicy& policy,
                                               double sigma_data = 0.5,
                                               bool edm_compat_out = false) {
    return PreconditionedDenoiser(std::move(raw), sigma_data, policy, edm_compat_out);
}

}  // namespace ssimsched
