#include <catch2/catch_amalgamated.hpp>

#include <ssimsched/metrics.hpp>
#include <ssimsched/schedule.hpp>

#include "reference_metrics.hpp"

using namespace ssimsched;

namespace {

ImageBuffer noisy_copy(const ImageBuffer& img, double sigma, std::uint64_t seed) {
    GaussianRng rng = StreamKey::root(seed).gaussian();
    return from_diffusion(corrupt(to_diffusion(img), sigma, rng));
}

ImageBuffer checkerboard(int side, int cell) {
    ImageBuffer img(side, side, 1);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
            img.at(x, y, 0) = ((x / cell + y / cell) % 2 == 0) ? 1.0 : 0.0;
    return img;
}

}  // namespace

TEST_CASE("ssim identity and symmetry") {
    auto corpus = synth_corpus(3, 2, 32);
    REQUIRE(ssim(corpus[0], corpus[0]) == 1.0);
    ImageBuffer n = noisy_copy(corpus[0], 0.3, 5);
    REQUIRE(ssim(corpus[0], n) == ssim(n, corpus[0]));
}

TEST_CASE("ssim shape and window errors") {
    ImageBuffer a(16, 16, 3, 0.5), b(16, 15, 3, 0.5), c(16, 16, 1, 0.5);
    REQUIRE_THROWS_AS(ssim(a, b), DimensionError);
    REQUIRE_THROWS_AS(ssim(a, c), DimensionError);
    ImageBuffer small(8, 8, 1, 0.5);
    REQUIRE_THROWS_AS(ssim(small, small), WindowError);  // default window 11
    SsimParams p;
    p.window_size = 4;
    REQUIRE_THROWS_AS(ssim(a, a, p), DomainError);
}

TEST_CASE("ssim of inverted checkerboard is negative and matches the oracle") {
    ImageBuffer x = checkerboard(8, 2);
    ImageBuffer inv = x;
    for (double& v : inv.data) v = 1.0 - v;
    SsimParams p;
    p.window_size = 5;
    double lib = ssim(x, inv, p);
    double ref = refm::ssim(x, inv, p);
    REQUIRE(lib == Catch::Approx(ref).margin(1e-9));
    REQUIRE(lib < 0.0);
}

TEST_CASE("ssim decreases monotonically with noise level") {
    auto corpus = synth_corpus(11, 8, 32);
    SsimParams p;
    double prev = 2.0;
    for (double sigma : {0.05, 0.1, 0.2, 0.4}) {
        double acc = 0;
        int k = 0;
        for (const auto& img : corpus)
            for (int d = 0; d < 4; ++d) acc += ssim(img, noisy_copy(img, sigma, 100 + 17 * ++k), p);
        acc /= corpus.size() * 4;
        REQUIRE(acc < prev);
        prev = acc;
    }
}

TEST_CASE("ssim affine rescale invariance") {
    auto corpus = synth_corpus(13, 1, 32);
    ImageBuffer a = corpus[0];
    ImageBuffer b = noisy_copy(a, 0.2, 3);
    SsimParams p;
    double base = ssim(a, b, p);
    double alpha = 0.37;
    ImageBuffer as = a, bs = b;
    for (double& v : as.data) v *= alpha;
    for (double& v : bs.data) v *= alpha;
    SsimParams ps = p;
    ps.dynamic_range = alpha;
    REQUIRE(ssim(as, bs, ps) == Catch::Approx(base).margin(1e-9));
}

TEST_CASE("channel policies agree on replicated-channel images") {
    auto corpus = synth_corpus(17, 1, 32);
    ImageBuffer g = to_grayscale(corpus[0]);
    ImageBuffer rep(g.width, g.height, 3);
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x)
            for (int c = 0; c < 3; ++c) rep.at(x, y, c) = g.at(x, y, 0);
    ImageBuffer noisy = noisy_copy(rep, 0.25, 8);
    // force identical channels on the noisy side too
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x)
            for (int c = 1; c < 3; ++c) noisy.at(x, y, c) = noisy.at(x, y, 0);
    SsimParams mean, luma;
    mean.channel_policy = ChannelPolicy::PerChannelMean;
    luma.channel_policy = ChannelPolicy::Luma;
    REQUIRE(ssim(rep, noisy, mean) == Catch::Approx(ssim(rep, noisy, luma)).margin(1e-9));
}

TEST_CASE("ssim matches the direct-convolution oracle on random pairs") {
    auto corpus = synth_corpus(23, 4, 48);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        ImageBuffer n = noisy_copy(corpus[i], 0.15 + 0.1 * i, 40 + i);
        REQUIRE(ssim(corpus[i], n) == Catch::Approx(refm::ssim(corpus[i], n)).margin(1e-9));
    }
}

TEST_CASE("ms_ssim identity, degenerate scale, and oracle match") {
    auto corpus = synth_corpus(29, 1, 256);
    const ImageBuffer& img = corpus[0];
    REQUIRE(ms_ssim(img, img) == 1.0);

    ImageBuffer noisy = noisy_copy(img, 0.3, 77);
    double w1[] = {1.0};
    REQUIRE(ms_ssim(img, noisy, {}, w1) == Catch::Approx(ssim(img, noisy)).margin(1e-12));

    std::vector<double> w5(std::begin(kMsSsimWeights5), std::end(kMsSsimWeights5));
    double lib = ms_ssim(img, noisy);
    double ref = refm::ms_ssim(img, noisy, {}, w5);
    REQUIRE(lib == Catch::Approx(ref).margin(1e-6));

    ImageBuffer small(32, 32, 1, 0.5);
    REQUIRE_THROWS_AS(ms_ssim(small, small), ScaleError);
}

TEST_CASE("psnr basics") {
    ImageBuffer x(4, 4, 1, 0.3);
    REQUIRE(std::isinf(psnr(x, x)));

    ImageBuffer zero(4, 4, 1, 0.0), one(4, 4, 1, 1.0);
    REQUIRE(psnr(zero, one) == Catch::Approx(0.0).margin(1e-12));

    ImageBuffer shifted(4, 4, 1, 0.4);
    REQUIRE(psnr(x, shifted) == Catch::Approx(20.0).margin(1e-9));

    ImageBuffer other(4, 5, 1, 0.0);
    REQUIRE_THROWS_AS(psnr(x, other), DimensionError);
}
