#include "c2fmc/app.hpp"

#include "c2fmc/cfl.hpp"
#include "c2fmc/phantom.hpp"
#include "c2fmc/render.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace c2f::app {

namespace {

std::string motion_name(MotionKind k) {
    switch (k) {
    case MotionKind::none: return "none";
    case MotionKind::smooth: return "smooth";
    case MotionKind::rigid: return "rigid";
    }
    return "none";
}

MotionKind motion_from(const std::string &s) {
    if (s == "none") return MotionKind::none;
    if (s == "smooth") return MotionKind::smooth;
    if (s == "rigid") return MotionKind::rigid;
    throw std::runtime_error("motion must be none, smooth or rigid, got '" + s + "'");
}

fs::path stem(const fs::path &dir, const std::string &name, std::size_t k) {
    return dir / (name + "_" + std::to_string(k));
}

SamplingMask mask_from_cfl(const CflArray &a) {
    const RealGrid g = real_from_cfl(a);
    std::vector<std::uint8_t> keep(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] != 0.0 && g[i] != 1.0) throw std::runtime_error("mask values must be 0 or 1");
        keep[i] = g[i] == 1.0;
    }
    return SamplingMask(g.shape(), std::move(keep));
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

void SimulationConfig::validate() const {
    if (n_states < 1) throw std::invalid_argument("n_states must be at least 1");
    if (!(acceleration >= 1.0)) throw std::invalid_argument("acceleration must be at least 1");
    if (!(density_decay >= 0.0)) throw std::invalid_argument("density_decay must be non-negative");
    if (acs_width < 0) throw std::invalid_argument("acs_width must be non-negative");
    if (n_coils < 1) throw std::invalid_argument("n_coils must be at least 1");
    if (!(max_disp >= 0.0) || !(damping > 0.0)) throw std::invalid_argument("max_disp >= 0 and damping > 0 required");
    if (!(rigid_deg >= 0.0) || !(rigid_px >= 0.0)) throw std::invalid_argument("rigid ranges must be non-negative");
    if (!(sigma_meas >= 0.0)) throw std::invalid_argument("sigma_meas must be non-negative");
}

SimulationConfig simulation_config_from(const KeyValues &kv) {
    SimulationConfig c;
    c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long>(c.seed)));
    c.n_states = static_cast<int>(kv.get_int("n_states", c.n_states));
    c.acceleration = kv.get_double("acceleration", c.acceleration);
    c.density_decay = kv.get_double("density_decay", c.density_decay);
    const std::string acs = kv.get_string("acs_mode", "disjoint");
    if (acs == "disjoint") {
        c.acs_mode = AcsMode::disjoint;
    } else if (acs == "shared") {
        c.acs_mode = AcsMode::shared;
    } else {
        throw std::runtime_error("acs_mode must be 'disjoint' or 'shared'");
    }
    c.acs_width = static_cast<int>(kv.get_int("acs_width", c.acs_width));
    c.n_coils = static_cast<int>(kv.get_int("n_coils", c.n_coils));
    c.motion = motion_from(kv.get_string("motion", motion_name(c.motion)));
    c.max_disp = kv.get_double("max_disp", c.max_disp);
    c.damping = kv.get_double("damping", c.damping);
    c.rigid_deg = kv.get_double("rigid_deg", c.rigid_deg);
    c.rigid_px = kv.get_double("rigid_px", c.rigid_px);
    c.sigma_meas = kv.get_double("sigma_meas", c.sigma_meas);
    c.validate();
    return c;
}

void write_simulation_config(const SimulationConfig &c, KeyValues &kv) {
    kv.set("seed", std::to_string(c.seed));
    kv.set("n_states", std::to_string(c.n_states));
    kv.set("acceleration", format_double(c.acceleration));
    kv.set("density_decay", format_double(c.density_decay));
    kv.set("acs_mode", c.acs_mode == AcsMode::disjoint ? "disjoint" : "shared");
    kv.set("acs_width", std::to_string(c.acs_width));
    kv.set("n_coils", std::to_string(c.n_coils));
    kv.set("motion", motion_name(c.motion));
    kv.set("max_disp", format_double(c.max_disp));
    kv.set("damping", format_double(c.damping));
    kv.set("rigid_deg", format_double(c.rigid_deg));
    kv.set("rigid_px", format_double(c.rigid_px));
    kv.set("sigma_meas", format_double(c.sigma_meas));
}

Simulation simulate(const ComplexImage &truth, const SimulationConfig &cfg) {
    cfg.validate();
    const Shape s = truth.shape();
    Rng rng(cfg.seed);
    const auto base = variable_density_mask(s, cfg.acceleration, cfg.density_decay, rng);
    const auto masks = partition_mask(base, static_cast<std::size_t>(cfg.n_states), cfg.acs_mode, cfg.acs_width, rng);
    std::vector<DisplacementField> fields{DisplacementField(s)};
    for (int k = 1; k < cfg.n_states; ++k) {
        switch (cfg.motion) {
        case MotionKind::none: fields.emplace_back(s); break;
        case MotionKind::smooth: fields.push_back(random_smooth_field(s, cfg.max_disp, cfg.damping, rng)); break;
        case MotionKind::rigid:
            fields.push_back(rigid_to_field(random_rigid(cfg.rigid_deg, cfg.rigid_px, rng), s));
            break;
        }
    }
    auto prob = simulate_measurements(truth, fields, masks, make_coil_profiles(s, static_cast<std::size_t>(cfg.n_coils)),
                                      cfg.sigma_meas, rng);
    return {std::move(prob), std::move(fields)};
}

void write_problem(const fs::path &dir, const Simulation &sim, const ComplexImage *truth, const KeyValues &manifest) {
    write_directory(dir, [&](const fs::path &tmp) {
        const auto &p = sim.problem;
        cfl_write(tmp / "maps", to_cfl(p.maps()));
        for (std::size_t k = 0; k < p.n_states(); ++k) {
            cfl_write(stem(tmp, "mask", k), to_cfl(p.mask(k).as_real()));
            cfl_write(stem(tmp, "data", k), to_cfl(p.measurements(k)));
            if (k < sim.fields.size()) cfl_write(stem(tmp, "field", k), to_cfl(sim.fields[k]));
        }
        if (truth != nullptr) cfl_write(tmp / "truth", to_cfl(*truth));
        KeyValues m = manifest;
        m.set("n_states", std::to_string(p.n_states()));
        m.set("sigma_meas", format_double(p.sigma_meas()));
        write_text(tmp / "manifest.txt", m.serialize());
    });
}

LoadedProblem read_problem(const fs::path &dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("problem directory not found: " + dir.string());
    LoadedProblem out;
    double sigma = 0.0;
    if (fs::exists(dir / "manifest.txt")) {
        out.manifest = KeyValues::load(dir / "manifest.txt");
        sigma = out.manifest.get_double("sigma_meas", 0.0);
    }
    const auto maps = maps_from_cfl(cfl_read(dir / "maps"));
    std::vector<SamplingMask> masks;
    std::vector<MultiCoilKSpace> data;
    for (std::size_t k = 0; cfl_exists(stem(dir, "mask", k)); ++k) {
        masks.push_back(mask_from_cfl(cfl_read(stem(dir, "mask", k))));
        data.push_back(kspace_from_cfl(cfl_read(stem(dir, "data", k))));
        if (cfl_exists(stem(dir, "field", k))) out.true_fields.push_back(field_from_cfl(cfl_read(stem(dir, "field", k))));
    }
    if (masks.empty()) throw std::runtime_error("no mask_0 found in " + dir.string());
    if (out.true_fields.size() != masks.size()) out.true_fields.clear();
    out.problem = MotionProblem(std::move(masks), std::move(data), maps, sigma);
    if (cfl_exists(dir / "truth")) {
        out.truth = image_from_cfl(cfl_read(dir / "truth"));
        require_same_shape(out.truth->shape(), out.problem.shape(), "truth image");
    }
    return out;
}

std::vector<fs::path> cfl_stems(const fs::path &dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
    std::vector<fs::path> stems;
    for (const auto &e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".cfl") stems.push_back(e.path().parent_path() / e.path().stem());
    }
    std::sort(stems.begin(), stems.end());
    return stems;
}

PowerSpectrum spectrum_from_dir(const fs::path &dir) {
    std::vector<ComplexImage> corpus;
    for (const auto &s : cfl_stems(dir)) corpus.push_back(image_from_cfl(cfl_read(s)));
    if (corpus.empty()) throw std::runtime_error("no .cfl images in " + dir.string());
    return estimate_spectrum(corpus);
}

KeyValues request_manifest(const ReconRequest &req) {
    KeyValues kv;
    write_recon_config(req.config, kv);
    kv.set("problem", fs::absolute(req.problem_dir).lexically_normal().string());
    kv.set("spectrum", fs::absolute(req.spectrum).lexically_normal().string());
    return kv;
}

ReconRequest request_from_manifest(const KeyValues &kv) {
    ReconRequest req;
    req.problem_dir = kv.get_string("problem", "");
    req.spectrum = kv.get_string("spectrum", "");
    if (req.problem_dir.empty() || req.spectrum.empty()) {
        throw std::runtime_error("manifest needs both 'problem' and 'spectrum'");
    }
    req.config = recon_config_from(kv);
    kv.require_all_used();
    return req;
}

ReconOutputs reconstruct_to_dir(const ReconRequest &req, const fs::path &out_dir) {
    if (fs::exists(out_dir)) throw std::runtime_error("output directory already exists: " + out_dir.string());
    // Everything is read and validated before the first byte is written.
    req.config.validate();
    const auto loaded = read_problem(req.problem_dir);
    const PowerSpectrum spectrum(real_from_cfl(cfl_read(req.spectrum)));
    require_same_shape(spectrum.shape(), loaded.problem.shape(), "spectrum");
    const auto denoiser = make_denoiser(spectrum, req.config);

    ReconOutputs out;
    out.result = reconstruct(loaded.problem, *denoiser, req.config);
    const ComplexImage zf = zero_filled(loaded.problem);
    if (loaded.truth) {
        out.nrmse = nrmse(out.result.image, *loaded.truth);
        out.zero_filled_nrmse = nrmse(zf, *loaded.truth);
    }

    std::string metrics;
    if (out.nrmse) {
        metrics += "nrmse=" + fixed6(*out.nrmse) + "\n";
        metrics += "magnitude_nrmse=" + fixed6(magnitude_nrmse(out.result.image, *loaded.truth)) + "\n";
        metrics += "zero_filled_nrmse=" + fixed6(*out.zero_filled_nrmse) + "\n";
    }
    if (!loaded.true_fields.empty()) {
        const RealGrid *where = nullptr;
        RealGrid support;
        if (loaded.truth) {
            support = support_of(*loaded.truth);
            where = &support;
        }
        double err = 0.0;
        for (std::size_t k = 0; k < loaded.true_fields.size(); ++k) {
            err += out.result.fields[k].mean_endpoint_error(loaded.true_fields[k], where);
        }
        metrics += "mean_field_error_px=" + fixed6(err / static_cast<double>(loaded.true_fields.size())) + "\n";
    }
    metrics += "final_data_loss=" + format_double(out.result.trace.back().data_loss) + "\n";

    write_directory(out_dir, [&](const fs::path &tmp) {
        cfl_write(tmp / "image", to_cfl(out.result.image));
        for (std::size_t k = 0; k < out.result.fields.size(); ++k) {
            cfl_write(stem(tmp, "field", k), to_cfl(out.result.fields[k]));
        }
        write_text(tmp / "metrics.txt", metrics);
        write_text(tmp / "manifest.txt", request_manifest(req).serialize());
        render(out.result.image, tmp / "recon.pgm", RenderMode::magnitude);
        render(zf, tmp / "zero_filled.pgm", RenderMode::magnitude);
        if (loaded.truth) {
            render(*loaded.truth, tmp / "truth.pgm", RenderMode::magnitude);
            render(out.result.image, tmp / "recon_error.pgm", RenderMode::error_x10, &*loaded.truth);
        }
    });
    return out;
}

}  // namespace c2f::app
