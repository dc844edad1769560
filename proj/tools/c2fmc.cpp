#include "c2fmc/app.hpp"
#include "c2fmc/cfl.hpp"
#include "c2fmc/phantom.hpp"
#include "c2fmc/registration.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace c2f;
namespace fs = std::filesystem;

namespace {

// Settings from an optional file, then --set overrides on top.
KeyValues gather_settings(const std::string &file, const std::vector<std::string> &overrides) {
    KeyValues kv = file.empty() ? KeyValues{} : KeyValues::load(file);
    for (const auto &o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) throw std::runtime_error("--set expects key=value, got '" + o + "'");
        kv.set(o.substr(0, eq), o.substr(eq + 1));
    }
    return kv;
}

Shape parse_size(const std::vector<int> &size) {
    if (size.size() == 1) return {size[0], size[0]};
    return {size[0], size[1]};
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App cli{"Motion-compensated MRI reconstruction with a coarse-to-fine diffusion sampler"};
    cli.require_subcommand(1);

    // phantom
    auto *phantom = cli.add_subcommand("phantom", "Write random piecewise-smooth phantoms");
    std::vector<int> ph_size{128};
    std::uint64_t ph_seed = 0;
    int ph_count = 1;
    std::string ph_out;
    phantom->add_option("--size", ph_size, "H or H W")->expected(1, 2);
    phantom->add_option("--seed", ph_seed);
    phantom->add_option("--count", ph_count, "with more than one, --out is a directory")->check(CLI::PositiveNumber);
    phantom->add_option("--out", ph_out)->required();

    // simulate
    auto *sim = cli.add_subcommand("simulate", "Simulate multi-state motion-corrupted k-space");
    std::string sim_truth, sim_config, sim_out;
    std::vector<std::string> sim_set;
    sim->add_option("--truth", sim_truth, "ground-truth image CFL stem")->required();
    sim->add_option("--config", sim_config, "key=value settings file");
    sim->add_option("--set", sim_set, "override one setting, key=value");
    sim->add_option("--out", sim_out, "problem directory to create")->required();

    // spectrum
    auto *spec = cli.add_subcommand("spectrum", "Estimate a power spectrum from a directory of images");
    std::string spec_in, spec_out;
    spec->add_option("--inputs", spec_in)->required();
    spec->add_option("--out", spec_out, "CFL stem")->required();

    // reconstruct
    auto *rec = cli.add_subcommand("reconstruct", "Reconstruct an image and motion fields");
    std::string rec_problem, rec_spectrum, rec_config, rec_manifest, rec_out;
    std::vector<std::string> rec_set;
    rec->add_option("--problem", rec_problem, "problem directory");
    rec->add_option("--spectrum", rec_spectrum, "power spectrum CFL stem");
    rec->add_option("--config", rec_config, "key=value settings file");
    rec->add_option("--set", rec_set, "override one setting, key=value");
    rec->add_option("--manifest", rec_manifest, "re-run from a previous output's manifest.txt");
    rec->add_option("--out", rec_out, "output directory to create")->required();

    // register
    auto *reg = cli.add_subcommand("register", "Estimate the displacement aligning a template to measurements");
    std::string reg_fixed, reg_moving, reg_problem, reg_config, reg_out;
    std::size_t reg_state = 1;
    std::vector<std::string> reg_set;
    reg->add_option("--fixed", reg_fixed, "template image CFL stem")->required();
    auto *moving = reg->add_option("--moving", reg_moving, "moving image CFL stem (fully sampled, one flat coil)");
    auto *problem = reg->add_option("--problem", reg_problem, "problem directory supplying the measurements");
    moving->excludes(problem);
    reg->add_option("--state", reg_state, "motion state within --problem");
    reg->add_option("--config", reg_config);
    reg->add_option("--set", reg_set);
    reg->add_option("--out", reg_out, "field CFL stem")->required();

    // metrics
    auto *met = cli.add_subcommand("metrics", "Print the NRMSE of an estimate against a reference");
    std::string met_est, met_ref;
    met->add_option("estimate", met_est)->required();
    met->add_option("reference", met_ref)->required();

    CLI11_PARSE(cli, argc, argv);

    try {
        if (*phantom) {
            const Shape s = parse_size(ph_size);
            Rng rng(ph_seed);
            if (ph_count == 1) {
                cfl_write(ph_out, to_cfl(random_phantom(s, rng)));
            } else {
                app::write_directory(ph_out, [&](const fs::path &tmp) {
                    for (int i = 0; i < ph_count; ++i) {
                        char name[32];
                        std::snprintf(name, sizeof name, "phantom_%04d", i);
                        cfl_write(tmp / name, to_cfl(random_phantom(s, rng)));
                    }
                });
            }
        } else if (*sim) {
            const KeyValues kv = gather_settings(sim_config, sim_set);
            const auto cfg = app::simulation_config_from(kv);
            kv.require_all_used();
            const auto truth = image_from_cfl(cfl_read(sim_truth));
            const auto result = app::simulate(truth, cfg);
            KeyValues manifest;
            app::write_simulation_config(cfg, manifest);
            manifest.set("truth_source", fs::absolute(sim_truth).lexically_normal().string());
            app::write_problem(sim_out, result, &truth, manifest);
        } else if (*spec) {
            const auto p = app::spectrum_from_dir(spec_in);
            cfl_write(spec_out, to_cfl(p.grid()));
        } else if (*rec) {
            app::ReconRequest req;
            if (!rec_manifest.empty()) {
                if (!rec_problem.empty() || !rec_spectrum.empty() || !rec_config.empty() || !rec_set.empty()) {
                    throw std::runtime_error("--manifest cannot be combined with other inputs");
                }
                req = app::request_from_manifest(KeyValues::load(rec_manifest));
            } else {
                if (rec_problem.empty() || rec_spectrum.empty()) {
                    throw std::runtime_error("--problem and --spectrum are required without --manifest");
                }
                const KeyValues kv = gather_settings(rec_config, rec_set);
                req.config = recon_config_from(kv);
                kv.require_all_used();
                req.problem_dir = rec_problem;
                req.spectrum = rec_spectrum;
            }
            const auto out = app::reconstruct_to_dir(req, rec_out);
            std::printf("time_s=%.2f\n", out.result.seconds);
            if (out.nrmse) std::printf("nrmse=%.6f zero_filled_nrmse=%.6f\n", *out.nrmse, *out.zero_filled_nrmse);
        } else if (*reg) {
            const KeyValues kv = gather_settings(reg_config, reg_set);
            const RegistrationConfig cfg = registration_config_from(kv);
            kv.require_all_used();
            const auto fixed = image_from_cfl(cfl_read(reg_fixed));
            MotionProblem prob;
            std::size_t state = reg_state;
            if (!reg_moving.empty()) {
                const auto mov = image_from_cfl(cfl_read(reg_moving));
                require_same_shape(fixed.shape(), mov.shape(), "register images");
                const SamplingMask full = SamplingMask::full(mov.shape());
                const SensitivityMaps flat({ComplexImage(mov.shape(), cplx{1.0, 0.0})});
                prob = MotionProblem({full}, {apply_forward(mov, full, flat)}, flat);
                state = 0;
            } else if (!reg_problem.empty()) {
                prob = app::read_problem(reg_problem).problem;
                if (state >= prob.n_states()) throw std::runtime_error("--state out of range");
            } else {
                throw std::runtime_error("register needs --moving or --problem");
            }
            const auto u = register_state(fixed, prob.measurements(state), state, prob, cfg);
            cfl_write(reg_out, to_cfl(u));
        } else if (*met) {
            const auto a = image_from_cfl(cfl_read(met_est));
            const auto b = image_from_cfl(cfl_read(met_ref));
            std::printf("%.6f\n", nrmse(a, b));
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
