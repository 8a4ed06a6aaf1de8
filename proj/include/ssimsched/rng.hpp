#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace ssimsched {

namespace detail {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a over bytes
inline std::uint64_t hash_bytes(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

// Gaussian generator with a pinned algorithm (Box-Muller over mt19937_64) so
// a given stream state always yields the same draws, independent of the
// standard library's normal_distribution implementation.
class GaussianRng {
  public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

    // [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Counter-style substream derivation: every stream is named by a chain of
// child() calls from a root seed, so the order in which work items run can
// never change which noise a given item sees.
struct StreamKey {
    std::uint64_t state = 0;

    static StreamKey root(std::uint64_t seed) { return StreamKey{detail::mix64(seed)}; }

    StreamKey child(std::uint64_t v) const {
        return StreamKey{detail::mix64(state ^ detail::mix64(v))};
    }
    StreamKey child(std::string_view label) const { return child(detail::hash_bytes(label)); }

    GaussianRng gaussian() const { return GaussianRng(state); }
};

}  // namespace ssimsched
