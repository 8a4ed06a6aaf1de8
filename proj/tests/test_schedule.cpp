#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include <ssimsched/schedule.hpp>

using namespace ssimsched;

TEST_CASE("phi schedule endpoints and the two-level case") {
    for (const TransformSpec& spec : candidate_set()) {
        SigmaSchedule s = phi_schedule(spec, 0.002, 80.0, 2);
        REQUIRE(s.sigmas == std::vector<double>{0.002, 80.0});
    }
    REQUIRE_THROWS_AS(phi_schedule(TransformSpec::squash(0.3), 0.0, 80.0, 5), DomainError);
    REQUIRE_THROWS_AS(phi_schedule(TransformSpec::squash(0.3), 1.0, 0.5, 5), DomainError);
    REQUIRE_THROWS_AS(phi_schedule(TransformSpec::squash(0.3), 0.002, 80.0, 1), DomainError);
}

TEST_CASE("identity phi schedule is an arithmetic progression") {
    SigmaSchedule s = phi_schedule(TransformSpec::of(TransformKind::Identity), 1.0, 3.0, 3);
    REQUIRE(s.sigmas[0] == 1.0);
    REQUIRE(s.sigmas[1] == Catch::Approx(2.0).margin(1e-12));
    REQUIRE(s.sigmas[2] == 3.0);

    SigmaSchedule t = phi_schedule(TransformSpec::of(TransformKind::Identity), 0.002, 80.0, 50);
    for (int i = 0; i < 50; ++i) {
        double lin = 0.002 + (80.0 - 0.002) * i / 49.0;
        REQUIRE(t.sigmas[i] == Catch::Approx(lin).margin(1e-12));
    }
}

TEST_CASE("squash schedule: phi values equidistant, closed-form recovery") {
    TransformSpec spec = TransformSpec::squash(0.3);
    SigmaSchedule s = phi_schedule(spec, 0.002, 80.0, 5);
    double a = 0.002 / 0.302, b = 80.0 / 80.3;
    double step = (b - a) / 4.0;
    for (int i = 0; i < 5; ++i) {
        double phi = apply(spec, s.sigmas[i]);
        REQUIRE(phi == Catch::Approx(a + i * step).margin(1e-12));
        REQUIRE(s.sigmas[i] == Catch::Approx(0.3 * (a + i * step) / (1.0 - (a + i * step))).epsilon(1e-12));
    }
}

TEST_CASE("phi equidistance holds for every candidate") {
    for (const TransformSpec& spec : candidate_set()) {
        SigmaSchedule s = phi_schedule(spec, 0.002, 80.0, 17);
        double a = apply(spec, 0.002), b = apply(spec, 80.0);
        double step = (b - a) / 16.0;
        for (int i = 1; i < 17; ++i) {
            double diff = apply(spec, s.sigmas[i]) - apply(spec, s.sigmas[i - 1]);
            REQUIRE(diff == Catch::Approx(step).epsilon(1e-9));
        }
        REQUIRE(std::is_sorted(s.sigmas.begin(), s.sigmas.end()));
    }
}

TEST_CASE("edm rho schedule endpoints, rho=1 linearity, rho=7 values") {
    SigmaSchedule two = edm_rho_schedule(7.0, 0.002, 80.0, 2);
    REQUIRE(two.sigmas == std::vector<double>{80.0, 0.002});

    SigmaSchedule lin = edm_rho_schedule(1.0, 0.002, 80.0, 9);
    SigmaSchedule idp = phi_schedule(TransformSpec::of(TransformKind::Identity), 0.002, 80.0, 9,
                                     ScheduleOrder::Descending);
    for (int i = 0; i < 9; ++i) REQUIRE(lin.sigmas[i] == Catch::Approx(idp.sigmas[i]).margin(1e-12));

    SigmaSchedule s = edm_rho_schedule(7.0, 0.002, 80.0, 5);
    for (int i = 0; i < 5; ++i) {
        double mr = std::pow(80.0, 1.0 / 7.0), nr = std::pow(0.002, 1.0 / 7.0);
        double want = std::pow(mr + (i / 4.0) * (nr - mr), 7.0);
        REQUIRE(s.sigmas[i] == Catch::Approx(want).epsilon(1e-12));
        if (i > 0) REQUIRE(s.sigmas[i] < s.sigmas[i - 1]);
    }
    REQUIRE_THROWS_AS(edm_rho_schedule(0.5, 0.002, 80.0, 5), DomainError);
}

TEST_CASE("ddpm cosine equivalent sigmas") {
    SigmaSchedule s = ddpm_cosine_equivalent_sigmas(25);
    REQUIRE(s.size() == 25);
    REQUIRE(s.sigmas[0] == 0.0);
    for (int t = 1; t < 25; ++t) REQUIRE(s.sigmas[t] > s.sigmas[t - 1]);
    // alpha_bar recovered from sigma matches the defining cosine ratio
    const double sbar = 0.008;
    auto f = [&](double t) {
        double c = std::cos(((t / 25.0 + sbar) / (1.0 + sbar)) * std::numbers::pi / 2.0);
        return c * c;
    };
    for (int t = 1; t < 25; ++t) {
        double ab = alpha_bar_from_sigma(s.sigmas[t]);
        REQUIRE(ab == Catch::Approx(f(t) / f(0)).epsilon(1e-9));
    }
    REQUIRE_THROWS_AS(ddpm_cosine_equivalent_sigmas(1), DomainError);
}

TEST_CASE("corrupt: zero level, moment check, determinism") {
    DiffusionTensor x(64, 64, 3, 0.25);
    GaussianRng rng = StreamKey::root(5).gaussian();
    DiffusionTensor same = corrupt(x, 0.0, rng);
    REQUIRE(same.data == x.data);

    GaussianRng r1 = StreamKey::root(6).gaussian();
    DiffusionTensor noisy = corrupt(x, 0.5, r1);
    double m = 0, m2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = noisy.data[i] - x.data[i];
        m += d;
        m2 += d * d;
    }
    m /= x.size();
    double sd = std::sqrt(m2 / x.size() - m * m);
    REQUIRE(sd == Catch::Approx(0.5).margin(0.01));

    GaussianRng r2 = StreamKey::root(6).gaussian();
    DiffusionTensor again = corrupt(x, 0.5, r2);
    REQUIRE(again.data == noisy.data);

    REQUIRE_THROWS_AS(corrupt(x, -0.1, rng), DomainError);
}

TEST_CASE("ddpm-scaled corruption shrinks the signal") {
    DiffusionTensor x(32, 32, 1, 1.0);
    GaussianRng rng = StreamKey::root(8).gaussian();
    double sigma = 2.0;
    DiffusionTensor y = corrupt_ddpm(x, sigma, rng);
    double ab = alpha_bar_from_sigma(sigma);
    double m = 0;
    for (double v : y.data) m += v;
    m /= y.size();
    REQUIRE(m == Catch::Approx(std::sqrt(ab)).margin(0.05));
}

TEST_CASE("sigma draws are uniform in phi space") {
    TransformSpec spec = TransformSpec::squash(0.3);
    const int n = 10000;
    GaussianRng rng = StreamKey::root(12).child("ks").gaussian();
    double a = apply(spec, 0.002), b = apply(spec, 80.0);
    std::vector<double> u;
    u.reserve(n);
    for (int i = 0; i < n; ++i) {
        double sigma = sample_sigma_uniform_phi(spec, 0.002, 80.0, rng);
        REQUIRE(sigma >= 0.002);
        REQUIRE(sigma <= 80.0);
        u.push_back((apply(spec, sigma) - a) / (b - a));
    }
    std::sort(u.begin(), u.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        ks = std::max(ks, std::fabs((i + 1.0) / n - u[i]));
        ks = std::max(ks, std::fabs(u[i] - static_cast<double>(i) / n));
    }
    REQUIRE(ks < 0.05);

    // identity transform: sigma itself is uniform
    GaussianRng rng2 = StreamKey::root(13).gaussian();
    double lo = 1e9, hi = -1e9, mean = 0;
    for (int i = 0; i < 4000; ++i) {
        double s = sample_sigma_uniform_phi(TransformSpec::of(TransformKind::Identity), 1.0, 3.0, rng2);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
        mean += s;
    }
    mean /= 4000;
    REQUIRE(lo >= 1.0);
    REQUIRE(hi <= 3.0);
    REQUIRE(mean == Catch::Approx(2.0).margin(0.05));
}
