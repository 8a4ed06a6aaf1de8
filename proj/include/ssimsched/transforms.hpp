#pragma once

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"

namespace ssimsched {

// The candidate family of strictly monotone sigma-space maps. All kinds are
// increasing on (0, inf) except Recip and RecipSq, which are decreasing.
enum class TransformKind {
    Identity,     // sigma
    Log,          // log(sigma)
    Log1p,        // log(1 + sigma)
    Square,       // sigma^2
    Recip,        // 1 / sigma
    RecipSq,      // 1 / sigma^2
    Arcsinh,      // arcsinh(sigma)
    Tanh,         // tanh(sigma)
    Sigmoid,      // 1 / (1 + exp(-sigma))
    SquashC,      // sigma / (sigma + c)
    PowerSquash,  // sigma^p / (sigma^p + 1)
    LogSqPlus1,   // log(sigma^2 + 1)
    Arctan,       // arctan(sigma)
};

struct TransformSpec {
    TransformKind kind = TransformKind::Identity;
    double c = 0.3;  // SquashC only
    double p = 2.0;  // PowerSquash only

    static TransformSpec of(TransformKind k) { return TransformSpec{k, 0.3, 2.0}; }
    static TransformSpec squash(double c) {
        if (!(c > 0.0)) throw DomainError("TransformSpec: squash offset c must be > 0");
        return TransformSpec{TransformKind::SquashC, c, 2.0};
    }
    static TransformSpec power_squash(double p) {
        if (!(p > 0.0)) throw DomainError("TransformSpec: power p must be > 0");
        return TransformSpec{TransformKind::PowerSquash, 0.3, p};
    }

    bool increasing() const {
        return kind != TransformKind::Recip && kind != TransformKind::RecipSq;
    }

    bool operator==(const TransformSpec& o) const {
        if (kind != o.kind) return false;
        if (kind == TransformKind::SquashC) return c == o.c;
        if (kind == TransformKind::PowerSquash) return p == o.p;
        return true;
    }
};

inline double apply(const TransformSpec& s, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw DomainError("transform apply: sigma must be a finite positive value");
    switch (s.kind) {
        case TransformKind::Identity: return sigma;
        case TransformKind::Log: return std::log(sigma);
        case TransformKind::Log1p: return std::log1p(sigma);
        case TransformKind::Square: return sigma * sigma;
        case TransformKind::Recip: return 1.0 / sigma;
        case TransformKind::RecipSq: return 1.0 / (sigma * sigma);
        case TransformKind::Arcsinh: return std::asinh(sigma);
        case TransformKind::Tanh: return std::tanh(sigma);
        case TransformKind::Sigmoid: return 1.0 / (1.0 + std::exp(-sigma));
        case TransformKind::SquashC: return sigma / (sigma + s.c);
        case TransformKind::PowerSquash: return 1.0 / (1.0 + std::pow(sigma, -s.p));
        case TransformKind::LogSqPlus1: return std::log1p(sigma * sigma);
        case TransformKind::Arctan: return std::atan(sigma);
    }
    throw DomainError("transform apply: unknown kind");
}

// Closed-form inverse. Values outside the image of apply over (0, inf)
// raise RangeError (e.g. SquashC needs 0 < v < 1, Sigmoid 0.5 < v < 1).
inline double invert(const TransformSpec& s, double value) {
    if (!std::isfinite(value)) throw RangeError("transform invert: value must be finite");
    double sigma;
    switch (s.kind) {
        case TransformKind::Identity:
            sigma = value;
            break;
        case TransformKind::Log:
            sigma = std::exp(value);
            break;
        case TransformKind::Log1p:
            if (!(value > 0.0)) throw RangeError("invert log1p: value must be > 0");
            sigma = std::expm1(value);
            break;
        case TransformKind::Square:
            if (!(value > 0.0)) throw RangeError("invert square: value must be > 0");
            sigma = std::sqrt(value);
            break;
        case TransformKind::Recip:
            if (!(value > 0.0)) throw RangeError("invert recip: value must be > 0");
            sigma = 1.0 / value;
            break;
        case TransformKind::RecipSq:
            if (!(value > 0.0)) throw RangeError("invert recipsq: value must be > 0");
            sigma = 1.0 / std::sqrt(value);
            break;
        case TransformKind::Arcsinh:
            if (!(value > 0.0)) throw RangeError("invert arcsinh: value must be > 0");
            sigma = std::sinh(value);
            break;
        case TransformKind::Tanh:
            if (!(value > 0.0 && value < 1.0)) throw RangeError("invert tanh: value must be in (0,1)");
            sigma = std::atanh(value);
            break;
        case TransformKind::Sigmoid:
            if (!(value > 0.5 && value < 1.0))
                throw RangeError("invert sigmoid: value must be in (0.5,1)");
            sigma = std::log(value) - std::log1p(-value);
            break;
        case TransformKind::SquashC:
            if (!(value > 0.0 && value < 1.0))
                throw RangeError("invert squash: value must be in (0,1)");
            sigma = s.c * value / (1.0 - value);
            break;
        case TransformKind::PowerSquash:
            if (!(value > 0.0 && value < 1.0))
                throw RangeError("invert powsquash: value must be in (0,1)");
            sigma = std::pow(value / (1.0 - value), 1.0 / s.p);
            break;
        case TransformKind::LogSqPlus1:
            if (!(value > 0.0)) throw RangeError("invert logsq1p: value must be > 0");
            sigma = std::sqrt(std::expm1(value));
            break;
        case TransformKind::Arctan:
            if (!(value > 0.0 && value < std::numbers::pi / 2.0))
                throw RangeError("invert arctan: value must be in (0, pi/2)");
            sigma = std::tan(value);
            break;
        default:
            throw RangeError("transform invert: unknown kind");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw RangeError("transform invert: value outside transform image");
    return sigma;
}

// Bracketed bisection on [1e-12, 1e6]; kept as an independent cross-check of
// the closed forms.
inline double invert_bisect(const TransformSpec& s, double value) {
    double lo = 1e-12, hi = 1e6;
    double flo = apply(s, lo), fhi = apply(s, hi);
    bool inc = flo < fhi;
    double fmin = inc ? flo : fhi, fmax = inc ? fhi : flo;
    if (!(value >= fmin && value <= fmax))
        throw RangeError("invert_bisect: value outside bracket image");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo <= 1e-12 * mid) return mid;
        double fm = apply(s, mid);
        if ((fm < value) == inc)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// The fixed 16-member search family, in the published comparison order
// (weakest to strongest linearizer).
inline std::vector<TransformSpec> candidate_set() {
    return {
        TransformSpec::of(TransformKind::Square),
        TransformSpec::of(TransformKind::RecipSq),
        TransformSpec::of(TransformKind::Identity),
        TransformSpec::of(TransformKind::Recip),
        TransformSpec::of(TransformKind::LogSqPlus1),
        TransformSpec::of(TransformKind::Log1p),
        TransformSpec::of(TransformKind::Arcsinh),
        TransformSpec::power_squash(2.0),
        TransformSpec::of(TransformKind::Sigmoid),
        TransformSpec::squash(0.9),
        TransformSpec::of(TransformKind::Tanh),
        TransformSpec::squash(0.7),
        TransformSpec::of(TransformKind::Log),
        TransformSpec::squash(0.1),
        TransformSpec::squash(0.5),
        TransformSpec::squash(0.3),
    };
}

namespace detail {

inline std::string double_to_string(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double string_to_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw FormatError("bad numeric transform parameter: " + std::string(s));
    return v;
}

}  // namespace detail

inline std::string format_spec(const TransformSpec& s) {
    switch (s.kind) {
        case TransformKind::Identity: return "sigma";
        case TransformKind::Log: return "log";
        case TransformKind::Log1p: return "log1p";
        case TransformKind::Square: return "square";
        case TransformKind::Recip: return "recip";
        case TransformKind::RecipSq: return "recipsq";
        case TransformKind::Arcsinh: return "arcsinh";
        case TransformKind::Tanh: return "tanh";
        case TransformKind::Sigmoid: return "sigmoid";
        case TransformKind::SquashC: return "squash:" + detail::double_to_string(s.c);
        case TransformKind::PowerSquash: return "powsquash:" + detail::double_to_string(s.p);
        case TransformKind::LogSqPlus1: return "logsq1p";
        case TransformKind::Arctan: return "arctan";
    }
    throw FormatError("format_spec: unknown kind");
}

inline TransformSpec parse_spec(std::string_view text) {
    std::string_view head = text, arg;
    if (auto pos = text.find(':'); pos != std::string_view::npos) {
        head = text.substr(0, pos);
        arg = text.substr(pos + 1);
    }
    if (head == "squash") return TransformSpec::squash(detail::string_to_double(arg));
    if (head == "powsquash") return TransformSpec::power_squash(detail::string_to_double(arg));
    if (!arg.empty()) throw FormatError("transform takes no parameter: " + std::string(text));
    if (head == "sigma") return TransformSpec::of(TransformKind::Identity);
    if (head == "log") return TransformSpec::of(TransformKind::Log);
    if (head == "log1p") return TransformSpec::of(TransformKind::Log1p);
    if (head == "square") return TransformSpec::of(TransformKind::Square);
    if (head == "recip") return TransformSpec::of(TransformKind::Recip);
    if (head == "recipsq") return TransformSpec::of(TransformKind::RecipSq);
    if (head == "arcsinh") return TransformSpec::of(TransformKind::Arcsinh);
    if (head == "tanh") return TransformSpec::of(TransformKind::Tanh);
    if (head == "sigmoid") return TransformSpec::of(TransformKind::Sigmoid);
    if (head == "logsq1p") return TransformSpec::of(TransformKind::LogSqPlus1);
    if (head == "arctan") return TransformSpec::of(TransformKind::Arctan);
    throw FormatError("unknown transform: " + std::string(text));
}

}  // namespace ssimsched
