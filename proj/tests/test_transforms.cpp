#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <ssimsched/transforms.hpp>

using namespace ssimsched;

TEST_CASE("pointwise transform values") {
    REQUIRE(apply(TransformSpec::squash(0.3), 0.3) == 0.5);
    REQUIRE(apply(TransformSpec::of(TransformKind::Log), 1.0) == 0.0);
    REQUIRE(apply(TransformSpec::power_squash(2.0), 1.0) == 0.5);
    REQUIRE(apply(TransformSpec::of(TransformKind::Identity), 2.5) == 2.5);
    REQUIRE_THROWS_AS(apply(TransformSpec::of(TransformKind::Log), 0.0), DomainError);
    REQUIRE_THROWS_AS(apply(TransformSpec::of(TransformKind::Log), -1.0), DomainError);
}

TEST_CASE("closed-form inverse values and range errors") {
    REQUIRE(invert(TransformSpec::squash(0.3), 0.5) == Catch::Approx(0.3).margin(1e-15));
    REQUIRE_THROWS_AS(invert(TransformSpec::squash(0.3), 1.0), RangeError);
    REQUIRE_THROWS_AS(invert(TransformSpec::squash(0.3), 0.0), RangeError);
    REQUIRE_THROWS_AS(invert(TransformSpec::of(TransformKind::Tanh), 1.5), RangeError);
    REQUIRE_THROWS_AS(invert(TransformSpec::of(TransformKind::Sigmoid), 0.4), RangeError);
    REQUIRE_THROWS_AS(invert(TransformSpec::of(TransformKind::Arctan), 2.0), RangeError);
    REQUIRE_THROWS_AS(invert(TransformSpec::of(TransformKind::Square), -4.0), RangeError);
}

// Round-trip precision over the working sigma range. Tanh and sigmoid reach
// the resolution limit of double once they saturate (tanh(20) == 1.0 exactly
// in binary64), so their ranges stop where the inverse is still conditioned.
TEST_CASE("invert(apply) round-trips across the candidate family") {
    for (const TransformSpec& spec : candidate_set()) {
        double hi = 100.0;
        if (spec.kind == TransformKind::Tanh) hi = 8.0;
        if (spec.kind == TransformKind::Sigmoid) hi = 16.0;
        double lo = 1e-3;
        for (int i = 0; i < 100; ++i) {
            double t = static_cast<double>(i) / 99.0;
            double sigma = lo * std::pow(hi / lo, t);
            double back = invert(spec, apply(spec, sigma));
            REQUIRE(std::fabs(back - sigma) / sigma < 1e-9);
        }
    }
}

TEST_CASE("bisection fallback agrees with closed forms") {
    for (const TransformSpec& spec : candidate_set()) {
        for (double sigma : {0.01, 0.3, 2.0, 50.0}) {
            double s = sigma;
            if (spec.kind == TransformKind::Tanh && s > 5.0) s = 5.0;
            if (spec.kind == TransformKind::Sigmoid && s > 12.0) s = 12.0;
            double v = apply(spec, s);
            REQUIRE(invert_bisect(spec, v) == Catch::Approx(invert(spec, v)).epsilon(1e-9));
        }
    }
    REQUIRE_THROWS_AS(invert_bisect(TransformSpec::squash(0.3), 1.5), RangeError);
}

TEST_CASE("strict monotonicity over the working range") {
    for (const TransformSpec& spec : candidate_set()) {
        double hi = 100.0;
        if (spec.kind == TransformKind::Tanh) hi = 15.0;
        if (spec.kind == TransformKind::Sigmoid) hi = 30.0;
        double sign = spec.increasing() ? 1.0 : -1.0;
        double prev = apply(spec, 1e-3);
        for (int i = 1; i <= 200; ++i) {
            double sigma = 1e-3 * std::pow(hi / 1e-3, i / 200.0);
            double v = apply(spec, sigma);
            REQUIRE(sign * (v - prev) > 0.0);
            prev = v;
        }
    }
}

TEST_CASE("candidate set is the fixed 16-member family in comparison order") {
    auto cands = candidate_set();
    REQUIRE(cands.size() == 16);
    std::vector<std::string> names;
    for (const auto& c : cands) names.push_back(format_spec(c));
    std::vector<std::string> expected = {
        "square", "recipsq", "sigma",  "recip",      "logsq1p",    "log1p",
        "arcsinh", "powsquash:2", "sigmoid", "squash:0.9", "tanh", "squash:0.7",
        "log",     "squash:0.1",  "squash:0.5", "squash:0.3"};
    REQUIRE(names == expected);
}

TEST_CASE("spec text encoding round-trips exactly") {
    for (const TransformSpec& spec : candidate_set())
        REQUIRE(parse_spec(format_spec(spec)) == spec);
    TransformSpec odd = TransformSpec::squash(0.1234567890123456);
    REQUIRE(parse_spec(format_spec(odd)) == odd);
    REQUIRE_THROWS_AS(parse_spec("nope"), FormatError);
    REQUIRE_THROWS_AS(parse_spec("squash:"), FormatError);
    REQUIRE_THROWS_AS(parse_spec("squash:-1"), DomainError);
    REQUIRE_THROWS_AS(parse_spec("log:3"), FormatError);
}
