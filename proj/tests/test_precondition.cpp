#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include <ssimsched/precondition.hpp>

using namespace ssimsched;

namespace {

struct ZeroNet : RawNetworkInterface {
    DiffusionTensor evaluate(const DiffusionTensor& x, const DiffusionTensor*, double) const override {
        DiffusionTensor out = x;
        for (double& v : out.data) v = 0.0;
        return out;
    }
};

struct IdentityNet : RawNetworkInterface {
    DiffusionTensor evaluate(const DiffusionTensor& x, const DiffusionTensor*, double) const override {
        return x;
    }
};

struct BadShapeNet : RawNetworkInterface {
    DiffusionTensor evaluate(const DiffusionTensor&, const DiffusionTensor*, double) const override {
        return DiffusionTensor(2, 2, 1);
    }
};

}  // namespace

TEST_CASE("coefficients at sigma = sigma_data = 0.5") {
    PreconditionCoeffs k = coeffs(0.5, 0.5, NoiseEmbedPolicy::quarter_log());
    REQUIRE(k.c_skip == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(k.c_out == Catch::Approx(0.5 / std::sqrt(0.5)).margin(1e-15));
    REQUIRE(k.c_in == Catch::Approx(1.0 / std::sqrt(0.5)).margin(1e-15));
    REQUIRE(k.c_noise == Catch::Approx(0.25 * std::log(0.5)).margin(1e-15));
}

TEST_CASE("low-sigma limits") {
    PreconditionCoeffs k = coeffs(1e-8, 0.5, NoiseEmbedPolicy::quarter_log());
    REQUIRE(k.c_skip == Catch::Approx(1.0).margin(1e-6));
    REQUIRE(k.c_out == Catch::Approx(0.0).margin(1e-6));
    REQUIRE(k.c_in == Catch::Approx(2.0).margin(1e-6));
}

TEST_CASE("phi-based noise embedding") {
    NoiseEmbedPolicy policy = NoiseEmbedPolicy::phi_star(TransformSpec::squash(0.3));
    REQUIRE(coeffs(0.3, 0.5, policy).c_noise == 0.5);
    // strictly increasing and inside (0,1)
    double prev = 0.0;
    for (double sigma : {0.01, 0.1, 1.0, 10.0, 80.0}) {
        double cn = coeffs(sigma, 0.5, policy).c_noise;
        REQUIRE(cn > prev);
        REQUIRE(cn < 1.0);
        prev = cn;
    }
    REQUIRE_THROWS_AS(NoiseEmbedPolicy::phi_star(TransformSpec::of(TransformKind::Recip)),
                      DomainError);
}

TEST_CASE("scaling identities hold over a wide log range") {
    NoiseEmbedPolicy ql = NoiseEmbedPolicy::quarter_log();
    for (int i = 0; i < 1000; ++i) {
        double sigma = 1e-4 * std::pow(1e8, i / 999.0);
        PreconditionCoeffs k = coeffs(sigma, 0.5, ql);
        REQUIRE(std::fabs(k.c_in * k.c_in * (sigma * sigma + 0.25) - 1.0) <= 1e-12);
        REQUIRE(std::fabs(k.c_skip - 0.25 * k.c_in * k.c_in) <= 1e-12);
        REQUIRE(std::fabs(k.c_out - sigma * k.c_in) <= 1e-12);
        REQUIRE(k.c_skip > 0.0);
        REQUIRE(k.c_skip <= 1.0);
    }
    // edm-compat variant restores the sigma_data factor
    PreconditionCoeffs k = coeffs(2.0, 0.5, ql, true);
    REQUIRE(k.c_out == Catch::Approx(2.0 * 0.5 / std::sqrt(4.25)).margin(1e-15));
    REQUIRE_THROWS_AS(coeffs(0.0, 0.5, ql), DomainError);
    REQUIRE_THROWS_AS(coeffs(1.0, 0.0, ql), DomainError);
}

TEST_CASE("composed denoiser evaluates the skip/residual form") {
    NoiseEmbedPolicy ql = NoiseEmbedPolicy::quarter_log();
    DiffusionTensor x(3, 2, 1);
    for (std::size_t i = 0; i < x.size(); ++i) x.data[i] = 0.1 * (i + 1);

    PreconditionedDenoiser zero = compose_denoiser(std::make_shared<ZeroNet>(), ql, 0.5);
    DiffusionTensor dz = zero.evaluate(x, nullptr, 0.7);
    double c_skip = coeffs(0.7, 0.5, ql).c_skip;
    for (std::size_t i = 0; i < x.size(); ++i)
        REQUIRE(dz.data[i] == Catch::Approx(c_skip * x.data[i]).margin(1e-15));

    // F passing its input through at sigma = sigma_data: D = 0.5 x + x = 1.5 x
    PreconditionedDenoiser ident = compose_denoiser(std::make_shared<IdentityNet>(), ql, 0.5);
    DiffusionTensor di = ident.evaluate(x, nullptr, 0.5);
    for (std::size_t i = 0; i < x.size(); ++i)
        REQUIRE(di.data[i] == Catch::Approx(1.5 * x.data[i]).margin(1e-12));

    PreconditionedDenoiser bad = compose_denoiser(std::make_shared<BadShapeNet>(), ql, 0.5);
    REQUIRE_THROWS_AS(bad.evaluate(x, nullptr, 0.5), ShapeError);
}
