// Command-line front end: degradation profiling and transform ranking,
// schedule export, corruption grids, oracle-verified sampling, sketch/warp
// conditioning, and forward/reverse SSIM curves.
#include <array>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <ssimsched/ssimsched.hpp>

namespace fs = std::filesystem;
using namespace ssimsched;

namespace {

struct RunConfig {
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    int n_levels = 50;
    double rho = 7.0;
    double sigma_data = 0.5;
    std::string transform = "squash:0.3";
    std::string corpus = "synth:1:16:64";
    std::uint64_t seed = 1;
    int draws = 2;
    std::string channel_policy = "mean";
    std::string out_dir = ".";

    SsimParams ssim_params() const {
        SsimParams p;
        if (channel_policy == "luma")
            p.channel_policy = ChannelPolicy::Luma;
        else if (channel_policy == "mean")
            p.channel_policy = ChannelPolicy::PerChannelMean;
        else
            throw DomainError("channel-policy must be 'mean' or 'luma'");
        return p;
    }
    TransformSpec spec() const { return parse_spec(transform); }
    fs::path out(const std::string& name) const { return fs::path(out_dir) / name; }
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return parts;
}

// "synth:seed:count:size" or a directory of PNGs (sorted by filename)
std::vector<ImageBuffer> load_corpus(const std::string& source) {
    if (source.rfind("synth:", 0) == 0) {
        auto parts = split(source, ':');
        if (parts.size() != 4) throw FormatError("corpus: expected synth:seed:count:size");
        return synth_corpus(std::stoull(parts[1]), std::stoi(parts[2]), std::stoi(parts[3]));
    }
    if (!fs::is_directory(source)) throw IoError("corpus: not a directory: " + source);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(source))
        if (entry.path().extension() == ".png") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw EmptyCorpusError("corpus: no .png files in " + source);
    std::vector<ImageBuffer> corpus;
    for (const auto& f : files) corpus.push_back(load_png(f));
    return corpus;
}

// input image: a PNG path or "synth:seed:index:size"
ImageBuffer load_input(const std::string& source) {
    if (source.rfind("synth:", 0) == 0) {
        auto parts = split(source, ':');
        if (parts.size() != 4) throw FormatError("input: expected synth:seed:index:size");
        int index = std::stoi(parts[2]);
        auto corpus = synth_corpus(std::stoull(parts[1]), index + 1, std::stoi(parts[3]));
        return corpus.at(static_cast<std::size_t>(index));
    }
    return load_png(source);
}

void save_png_atomic(const ImageBuffer& img, const fs::path& path) {
    fs::path tmp = path;
    tmp += ".tmp";
    save_png(img, tmp);
    fs::rename(tmp, path);
}

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (c == ':' || c == '/') c = '_';
    return out;
}

std::string curve_csv(const std::vector<std::array<double, 4>>& rows) {
    std::string out = "i,sigma,phi,ssim\n";
    for (const auto& r : rows) {
        out += detail::g17(r[0]);
        out += ',';
        out += detail::g17(r[1]);
        out += ',';
        out += detail::g17(r[2]);
        out += ',';
        out += detail::g17(r[3]);
        out += '\n';
    }
    return out;
}

double phi_or_nan(const TransformSpec& spec, double sigma) {
    if (sigma <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return apply(spec, sigma);
}

int cmd_select_phi(const RunConfig& cfg) {
    auto corpus = load_corpus(cfg.corpus);
    auto ranked = select_phi(corpus, candidate_set(), cfg.n_levels, cfg.sigma_min, cfg.sigma_max,
                             cfg.draws, StreamKey::root(cfg.seed).child("select-phi"),
                             cfg.ssim_params());
    fs::create_directories(cfg.out_dir);
    write_text_atomic(cfg.out("ranking.csv"), ranking_to_csv(ranked));
    for (const auto& prof : ranked)
        write_text_atomic(cfg.out("profile_" + sanitize(format_spec(prof.spec)) + ".csv"),
                          profile_to_csv(prof));
    std::printf("%-4s %-14s %s\n", "rank", "spec", "r2");
    for (std::size_t i = 0; i < ranked.size(); ++i)
        std::printf("%-4zu %-14s %.6f\n", i + 1, format_spec(ranked[i].spec).c_str(),
                    ranked[i].r_squared);
    return 0;
}

int cmd_schedule(const RunConfig& cfg, const std::string& kind) {
    SigmaSchedule sched;
    if (kind == "phi")
        sched = phi_schedule(cfg.spec(), cfg.sigma_min, cfg.sigma_max, cfg.n_levels);
    else if (kind == "edm")
        sched = edm_rho_schedule(cfg.rho, cfg.sigma_min, cfg.sigma_max, cfg.n_levels);
    else if (kind == "ddpm")
        sched = ddpm_cosine_equivalent_sigmas(cfg.n_levels);
    else
        throw DomainError("schedule kind must be phi, edm or ddpm");
    fs::create_directories(cfg.out_dir);
    write_text_atomic(cfg.out("schedule.csv"), schedule_to_csv(sched, cfg.spec()));
    std::printf("wrote %s (%zu levels)\n", cfg.out("schedule.csv").string().c_str(), sched.size());
    return 0;
}

int cmd_corrupt_grid(const RunConfig& cfg, const std::string& kind, const std::string& input) {
    ImageBuffer img = load_input(input);
    DiffusionTensor clean = to_diffusion(img);
    SigmaSchedule sched;
    if (kind == "phi")
        sched = phi_schedule(cfg.spec(), cfg.sigma_min, cfg.sigma_max, cfg.n_levels);
    else if (kind == "edm")
        sched = edm_rho_schedule(cfg.rho, cfg.sigma_min, cfg.sigma_max, cfg.n_levels).reversed();
    else if (kind == "ddpm")
        sched = ddpm_cosine_equivalent_sigmas(cfg.n_levels);
    else
        throw DomainError("corrupt-grid kind must be phi, edm or ddpm");

    StreamKey key = StreamKey::root(cfg.seed).child("corrupt-grid").child(kind);
    SsimParams params = cfg.ssim_params();
    std::vector<ImageBuffer> tiles;
    std::vector<std::array<double, 4>> rows;
    for (std::size_t i = 0; i < sched.size(); ++i) {
        double sigma = sched.sigmas[i];
        double acc = 0.0;
        for (int d = 0; d < cfg.draws; ++d) {
            GaussianRng rng = key.child(i).child(static_cast<std::uint64_t>(d)).gaussian();
            DiffusionTensor noisy = kind == "ddpm" ? corrupt_ddpm(clean, sigma, rng)
                                                   : corrupt(clean, sigma, rng);
            ImageBuffer view = from_diffusion(noisy);
            if (d == 0) tiles.push_back(view);
            acc += ssim(img, view, params);
        }
        rows.push_back({static_cast<double>(i), sigma, phi_or_nan(cfg.spec(), sigma),
                        acc / cfg.draws});
    }
    int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(sched.size()))));
    fs::create_directories(cfg.out_dir);
    save_png_atomic(make_grid(tiles, side, side), cfg.out("grid_" + kind + ".png"));
    write_text_atomic(cfg.out("curve_" + kind + ".csv"), curve_csv(rows));
    std::printf("wrote grid_%s.png and curve_%s.csv (%zu levels)\n", kind.c_str(), kind.c_str(),
                sched.size());
    return 0;
}

int cmd_sample_oracle(const RunConfig& cfg, const std::string& mean_str,
                      const std::string& var_str, int rollouts, const std::string& integrator) {
    std::vector<double> mean, var;
    for (const auto& t : split(mean_str, ',')) mean.push_back(std::stod(t));
    for (const auto& t : split(var_str, ',')) var.push_back(std::stod(t));
    auto oracle = GaussianOracleDenoiser::from_vectors(mean, var);
    SigmaSchedule sched = phi_schedule(cfg.spec(), cfg.sigma_min, cfg.sigma_max, cfg.n_levels,
                                       ScheduleOrder::Descending);
    bool heun = integrator == "heun";
    if (!heun && integrator != "euler")
        throw DomainError("integrator must be euler or heun");

    StreamKey key = StreamKey::root(cfg.seed).child("sample-oracle");
    std::string samples = "rollout";
    for (std::size_t e = 0; e < mean.size(); ++e) samples += ",x" + std::to_string(e);
    samples += '\n';

    std::vector<std::array<double, 4>> trace_rows;
    for (int r = 0; r < rollouts; ++r) {
        GaussianRng rng = key.child(static_cast<std::uint64_t>(r)).gaussian();
        DiffusionTensor init(static_cast<int>(mean.size()), 1, 1);
        for (double& v : init.data) v = cfg.sigma_max * rng.normal();
        auto [x, trace] = heun ? heun_rollout(oracle, nullptr, sched, std::move(init))
                               : euler_rollout(oracle, nullptr, sched, std::move(init));
        samples += std::to_string(r);
        for (double v : x.data) {
            samples += ',';
            samples += detail::g17(v);
        }
        samples += '\n';
        if (r == 0)
            for (const auto& step : trace.steps)
                trace_rows.push_back({static_cast<double>(step.index), step.sigma,
                                      phi_or_nan(cfg.spec(), step.sigma),
                                      std::numeric_limits<double>::quiet_NaN()});
    }
    fs::create_directories(cfg.out_dir);
    write_text_atomic(cfg.out("samples.csv"), samples);
    write_text_atomic(cfg.out("trace.csv"), curve_csv(trace_rows));
    std::printf("wrote samples.csv (%d rollouts, %s) and trace.csv\n", rollouts,
                integrator.c_str());
    return 0;
}

int cmd_sketch(const RunConfig& cfg, const std::string& input, const XdogParams& params) {
    ImageBuffer img = load_input(input);
    fs::create_directories(cfg.out_dir);
    save_png_atomic(xdog_sketch(img, params), cfg.out("sketch.png"));
    std::printf("wrote sketch.png\n");
    return 0;
}

int cmd_warp(const RunConfig& cfg, const std::string& input, const TpsWarpParams& params) {
    ImageBuffer img = load_input(input);
    GaussianRng rng = StreamKey::root(cfg.seed).child("warp").gaussian();
    ImageBuffer warped = tps_warp(img, params, rng);
    double angle = (2.0 * rng.uniform() - 1.0) * params.rotation_range;
    warped = rotate(warped, angle);
    fs::create_directories(cfg.out_dir);
    save_png_atomic(warped, cfg.out("warp.png"));
    std::printf("wrote warp.png (rotation %.2f deg)\n", angle);
    return 0;
}

// Forward corruption curve and reverse-rollout curve against the same image;
// the reverse side uses the closed-form oracle centered on the image itself
// (documented: oracle-based, no learned network involved).
int cmd_curves(const RunConfig& cfg, const std::string& input, double oracle_var) {
    if (!(oracle_var > 0.0)) throw DomainError("oracle-var must be > 0");
    ImageBuffer img = load_input(input);
    DiffusionTensor clean = to_diffusion(img);
    TransformSpec spec = cfg.spec();
    SsimParams params = cfg.ssim_params();
    StreamKey key = StreamKey::root(cfg.seed).child("curves");

    SigmaSchedule fwd = phi_schedule(spec, cfg.sigma_min, cfg.sigma_max, cfg.n_levels);
    std::string csv = "curve,i,sigma,phi,ssim\n";
    for (std::size_t i = 0; i < fwd.size(); ++i) {
        double acc = 0.0;
        for (int d = 0; d < cfg.draws; ++d) {
            GaussianRng rng = key.child("fwd").child(i).child(static_cast<std::uint64_t>(d)).gaussian();
            acc += ssim(img, from_diffusion(corrupt(clean, fwd.sigmas[i], rng)), params);
        }
        csv += "forward," + std::to_string(i) + ',' + detail::g17(fwd.sigmas[i]) + ',' +
               detail::g17(apply(spec, fwd.sigmas[i])) + ',' + detail::g17(acc / cfg.draws) + '\n';
    }

    DiffusionTensor var(clean.width, clean.height, clean.channels, oracle_var);
    GaussianOracleDenoiser oracle(clean, var);
    GaussianRng rng = key.child("rev").gaussian();
    DiffusionTensor init(clean.width, clean.height, clean.channels);
    for (double& v : init.data) v = cfg.sigma_max * rng.normal();
    SigmaSchedule rev = fwd.descending();
    auto curve = trajectory_ssim_curve(oracle, nullptr, rev, spec, std::move(init), img, params);
    for (std::size_t j = 0; j < curve.size(); ++j) {
        std::size_t i = curve.size() - 1 - j;  // step index N-1..0
        csv += "reverse," + std::to_string(i) + ',' + detail::g17(rev.sigmas[j]) + ',' +
               detail::g17(curve[j].first) + ',' + detail::g17(curve[j].second) + '\n';
    }
    fs::create_directories(cfg.out_dir);
    write_text_atomic(cfg.out("curves.csv"), csv);
    std::printf("wrote curves.csv (%d forward + %zu reverse points)\n", cfg.n_levels, curve.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SSIM-aligned sigma-space schedules for diffusion"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file");

    RunConfig cfg;
    app.add_option("--sigma-min", cfg.sigma_min, "lowest noise level");
    app.add_option("--sigma-max", cfg.sigma_max, "highest noise level");
    app.add_option("--levels,-n", cfg.n_levels, "number of schedule levels");
    app.add_option("--rho", cfg.rho, "rho of the power schedule");
    app.add_option("--sigma-data", cfg.sigma_data, "data std for preconditioning");
    app.add_option("--transform", cfg.transform, "sigma transform, e.g. squash:0.3");
    app.add_option("--corpus", cfg.corpus, "PNG directory or synth:seed:count:size");
    app.add_option("--seed", cfg.seed, "master seed");
    app.add_option("--draws", cfg.draws, "noise draws per level");
    app.add_option("--channel-policy", cfg.channel_policy, "mean or luma");
    app.add_option("--out", cfg.out_dir, "output directory");

    auto* sc_select = app.add_subcommand("select-phi", "rank candidate transforms by linearity");

    std::string sched_kind = "phi";
    auto* sc_sched = app.add_subcommand("schedule", "export a sigma schedule as CSV");
    sc_sched->add_option("--kind", sched_kind, "phi, edm or ddpm");

    std::string grid_kind = "phi", grid_input = "synth:1:0:64";
    auto* sc_grid = app.add_subcommand("corrupt-grid", "tile corrupted versions of one image");
    sc_grid->add_option("--kind", grid_kind, "phi, edm or ddpm");
    sc_grid->add_option("--input", grid_input, "PNG path or synth:seed:index:size");

    std::string mean_str = "0.2,-0.1", var_str = "0.04,0.09", integrator = "heun";
    int rollouts = 1000;
    auto* sc_oracle = app.add_subcommand("sample-oracle", "rollouts against the Gaussian oracle");
    sc_oracle->add_option("--mean", mean_str, "oracle mean, comma separated");
    sc_oracle->add_option("--var", var_str, "oracle variances, comma separated");
    sc_oracle->add_option("--rollouts", rollouts, "number of rollouts");
    sc_oracle->add_option("--integrator", integrator, "euler or heun");

    std::string sketch_input = "synth:1:0:64";
    XdogParams xdog;
    auto* sc_sketch = app.add_subcommand("sketch", "extract an edge sketch");
    sc_sketch->add_option("--input", sketch_input, "PNG path or synth:seed:index:size");
    sc_sketch->add_option("--xdog-sigma", xdog.sigma_small, "narrow blur std");
    sc_sketch->add_option("--xdog-k", xdog.k, "blur std ratio");
    sc_sketch->add_option("--xdog-tau", xdog.tau, "wide blur weight");
    sc_sketch->add_option("--xdog-eps", xdog.epsilon, "threshold level");
    sc_sketch->add_option("--xdog-phi", xdog.phi_sharpness, "soft threshold steepness");

    std::string warp_input = "synth:1:0:64";
    TpsWarpParams tps;
    auto* sc_warp = app.add_subcommand("warp", "thin-plate-spline warp plus rotation");
    sc_warp->add_option("--input", warp_input, "PNG path or synth:seed:index:size");
    sc_warp->add_option("--grid", tps.grid, "control points per side");
    sc_warp->add_option("--jitter", tps.jitter_std, "control point jitter, fraction of side");
    sc_warp->add_option("--rotation", tps.rotation_range, "max |angle| in degrees");

    std::string curves_input = "synth:1:0:64";
    double oracle_var = 0.01;
    auto* sc_curves = app.add_subcommand("curves", "forward/reverse SSIM-vs-phi curves");
    sc_curves->add_option("--input", curves_input, "PNG path or synth:seed:index:size");
    sc_curves->add_option("--oracle-var", oracle_var, "per-pixel oracle variance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sc_select->parsed()) return cmd_select_phi(cfg);
        if (sc_sched->parsed()) return cmd_schedule(cfg, sched_kind);
        if (sc_grid->parsed()) return cmd_corrupt_grid(cfg, grid_kind, grid_input);
        if (sc_oracle->parsed()) return cmd_sample_oracle(cfg, mean_str, var_str, rollouts, integrator);
        if (sc_sketch->parsed()) return cmd_sketch(cfg, sketch_input, xdog);
        if (sc_warp->parsed()) return cmd_warp(cfg, warp_input, tps);
        if (sc_curves->parsed()) return cmd_curves(cfg, curves_input, oracle_var);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
