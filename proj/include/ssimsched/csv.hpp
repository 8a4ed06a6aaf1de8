#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "errors.hpp"
#include "fit.hpp"
#include "schedule.hpp"
#include "transforms.hpp"

namespace ssimsched {

namespace detail {

// full round-trip precision, '.' decimal separator
inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// columns: i, sigma, phi_sigma. Levels outside the transform domain (the
// sigma = 0 endpoint of a discrete comparator) get "nan" in the phi column.
inline std::string schedule_to_csv(const SigmaSchedule& sched, const TransformSpec& phi) {
    std::string out = "i,sigma,phi_sigma\n";
    for (std::size_t i = 0; i < sched.size(); ++i) {
        double s = sched.sigmas[i];
        out += std::to_string(i);
        out += ',';
        out += detail::g17(s);
        out += ',';
        if (s > 0.0)
            out += detail::g17(apply(phi, s));
        else
            out += "nan";
        out += '\n';
    }
    return out;
}

// columns: sigma, phi, mean_ssim
inline std::string profile_to_csv(const DegradationProfile& prof) {
    std::string out = "sigma,phi,mean_ssim\n";
    for (const ProfilePoint& pt : prof.points) {
        out += detail::g17(pt.sigma);
        out += ',';
        out += detail::g17(pt.phi);
        out += ',';
        out += detail::g17(pt.mean_ssim);
        out += '\n';
    }
    return out;
}

// columns: rank, spec, r2 (profiles already ranked)
inline std::string ranking_to_csv(const std::vector<DegradationProfile>& ranked) {
    std::string out = "rank,spec,r2\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += format_spec(ranked[i].spec);
        out += ',';
        out += detail::g17(ranked[i].r_squared);
        out += '\n';
    }
    return out;
}

// temp file + rename so readers never observe a partial file
inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open for writing: " + tmp.string());
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw IoError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace ssimsched
