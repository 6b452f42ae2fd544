#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "wavres/noise.hpp"
#include "wavres/phantom.hpp"
#include "wavres/pipeline.hpp"
#include "wavres/rng.hpp"

namespace wavres {

namespace {

const char* kUsage =
    "usage: wavres <command> [--config FILE] [--set key=value ...] [args]\n"
    "\n"
    "commands:\n"
    "  phantom OUT.wimg [--pgm OUT.pgm]    rasterize a phantom (sim.phantom, sim.size)\n"
    "  project IN.wimg OUT.sino            forward projection (sim.* geometry keys)\n"
    "  noise IN.sino OUT.sino              photon noise (sim.i0, sim.seed)\n"
    "  fbp IN.sino OUT.wimg                filtered backprojection (sim.size, sim.apodization)\n"
    "  nsct --roundtrip IN.wimg            transform roundtrip error (nsct.levels, nsct.directions)\n"
    "  nsct --forward IN.wimg OUT.wimg     coefficient stack + sidecar\n"
    "  nsct --inverse IN.wimg OUT.wimg     inverse transform of a stack\n"
    "  nsct --dump-filters DIR             write filter coefficient files\n"
    "  mbir IN.sino OUT.wimg [--log CSV]   TV-regularized reconstruction (mbir.*)\n"
    "  mbir IN.sino --grid L1,L2,... --reference REF.wimg\n"
    "  synth OUT_DIR                       synthesize a paired dataset (sim.*)\n"
    "  train MANIFEST OUT_DIR              train from a manifest (train.*, net.*, nsct.*)\n"
    "  denoise IN.wimg CKPT OUT.wimg       denoise one image (train.target_mode etc.)\n"
    "  eval TEST.wimg REF.wimg [...]       metrics for image pairs [--csv OUT]\n"
    "  compare MANIFEST RES_CKPT DIR_CKPT OUT_DIR   three-method comparison table\n";

struct CliArgs {
    std::string command;
    Config cfg;
    std::vector<std::string> positional;
    std::map<std::string, std::string> options;  // --name value
    std::vector<std::string> flags;              // bare --name
};

bool is_flag_only(const std::string& name) {
    return name == "--roundtrip" || name == "--forward" || name == "--inverse" ||
           name == "--dump-filters";
}

CliArgs parse_args(const std::vector<std::string>& args) {
    CliArgs parsed;
    parsed.command = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config") {
            if (++i >= args.size()) throw ConfigError("--config needs a file argument");
            Config file_cfg = Config::from_file(args[i]);
            for (const auto& [k, v] : file_cfg.values()) parsed.cfg.set(k, v);
        } else if (a == "--set") {
            if (++i >= args.size()) throw ConfigError("--set needs key=value");
            parsed.cfg.set_pair(args[i]);
        } else if (a.rfind("--", 0) == 0) {
            if (is_flag_only(a)) {
                parsed.flags.push_back(a);
            } else {
                if (++i >= args.size()) throw ConfigError(a + " needs a value");
                parsed.options[a] = args[i];
            }
        } else {
            parsed.positional.push_back(a);
        }
    }
    return parsed;
}

bool has_flag(const CliArgs& a, const std::string& name) {
    return std::find(a.flags.begin(), a.flags.end(), name) != a.flags.end();
}

DecompositionSpec spec_from_config(const Config& cfg) {
    DecompositionSpec spec;
    spec.levels = static_cast<int>(cfg.get_int("nsct.levels", 4));
    spec.directions_per_level = cfg.get_int_list("nsct.directions", {4, 4, 4, 2});
    spec.validate();
    return spec;
}

int cmd_phantom(const CliArgs& a) {
    if (a.positional.empty()) throw ConfigError("phantom: missing output path");
    const std::string kind = a.cfg.get_string("sim.phantom", "shepp_logan");
    const int size = static_cast<int>(a.cfg.get_int("sim.size", 128));
    Phantom p;
    if (kind == "shepp_logan") p = shepp_logan();
    else if (kind == "random")
        p = random_phantom(static_cast<std::uint64_t>(a.cfg.get_int("sim.seed", 1)));
    else throw ConfigError("sim.phantom must be shepp_logan or random");
    Image img = rasterize_phantom(p, size);
    save_image(a.positional[0], img);
    auto pgm = a.options.find("--pgm");
    if (pgm != a.options.end()) {
        const double lo = a.cfg.get_double("display.lo", 0.0);
        const double hi = a.cfg.get_double("display.hi", 2.0);
        save_pgm(pgm->second, window_hu(img, lo, hi), img.height, img.width);
    }
    return 0;
}

int cmd_project(const CliArgs& a) {
    if (a.positional.size() < 2) throw ConfigError("project: need IN.wimg OUT.sino");
    Image img = load_image(a.positional[0]);
    Sinogram sino = forward_project(img, geometry_from_config(a.cfg));
    save_sinogram(a.positional[1], sino);
    return 0;
}

int cmd_noise(const CliArgs& a) {
    if (a.positional.size() < 2) throw ConfigError("noise: need IN.sino OUT.sino");
    Sinogram sino = load_sinogram(a.positional[0]);
    const double i0 = a.cfg.get_double("sim.i0", 1e5);
    const std::uint64_t seed = static_cast<std::uint64_t>(a.cfg.get_int("sim.seed", 1));
    char i0_text[32];
    std::snprintf(i0_text, sizeof i0_text, "%.17g", i0);
    save_sinogram(a.positional[1], inject_low_dose_noise(sino, i0, seed),
                  {{"seed", std::to_string(seed)}, {"I0", i0_text}});
    return 0;
}

int cmd_fbp(const CliArgs& a) {
    if (a.positional.size() < 2) throw ConfigError("fbp: need IN.sino OUT.wimg");
    Sinogram sino = load_sinogram(a.positional[0]);
    const int size = static_cast<int>(a.cfg.get_int("sim.size", 128));
    save_image(a.positional[1], fbp_reconstruct(sino, size, fbp_from_config(a.cfg)));
    return 0;
}

int cmd_nsct(const CliArgs& a) {
    const FilterBank bank = FilterBank::make_default();
    const DecompositionSpec spec = spec_from_config(a.cfg);
    if (has_flag(a, "--dump-filters")) {
        if (a.positional.empty()) throw ConfigError("nsct --dump-filters: missing directory");
        std::filesystem::create_directories(a.positional[0]);
        bank.dump(a.positional[0]);
        return 0;
    }
    if (has_flag(a, "--roundtrip")) {
        if (a.positional.empty()) throw ConfigError("nsct --roundtrip: missing input");
        Image x = load_image(a.positional[0]);
        Image back = nsct_inverse(nsct_forward(x, spec, bank), bank);
        const double err = norm2(back - x) / norm2(x);
        std::printf("roundtrip relative error: %.3e\n", err);
        return 0;
    }
    if (has_flag(a, "--forward")) {
        if (a.positional.size() < 2) throw ConfigError("nsct --forward: need IN and OUT");
        Image x = load_image(a.positional[0]);
        CoeffStack stack = nsct_forward(x, spec, bank);
        save_stack(a.positional[1], stack.bands);
        std::ofstream sidecar(a.positional[1] + ".spec");
        sidecar << coeff_spec_sidecar(spec, bank);
        return 0;
    }
    if (has_flag(a, "--inverse")) {
        if (a.positional.size() < 2) throw ConfigError("nsct --inverse: need IN and OUT");
        CoeffStack stack;
        stack.bands = load_stack(a.positional[0]);
        std::ifstream sidecar(a.positional[0] + ".spec");
        if (sidecar) {
            std::stringstream buf;
            buf << sidecar.rdbuf();
            stack.spec = parse_coeff_spec_sidecar(buf.str(), bank);
        } else {
            stack.spec = spec;
        }
        save_image(a.positional[1], nsct_inverse(stack, bank));
        return 0;
    }
    throw ConfigError("nsct: need --roundtrip, --forward, --inverse or --dump-filters");
}

int cmd_mbir(const CliArgs& a) {
    if (a.positional.empty()) throw ConfigError("mbir: missing input sinogram");
    Sinogram sino = load_sinogram(a.positional[0]);
    TVParams params = tv_params_from_config(a.cfg);
    const int size = static_cast<int>(a.cfg.get_int("sim.size", 128));

    auto grid = a.options.find("--grid");
    if (grid != a.options.end()) {
        auto ref_opt = a.options.find("--reference");
        if (ref_opt == a.options.end())
            throw ConfigError("mbir --grid needs --reference REF.wimg");
        Image reference = load_image(ref_opt->second);
        std::vector<double> lambdas;
        std::istringstream ls(grid->second);
        std::string item;
        while (std::getline(ls, item, ',')) lambdas.push_back(std::stod(item));
        auto results = mbir_lambda_grid(sino, reference.height, reference, params, lambdas);
        std::printf("lambda,nrmse\n");
        for (const auto& [lambda, err] : results) std::printf("%.6g,%.6g\n", lambda, err);
        return 0;
    }

    if (a.positional.size() < 2) throw ConfigError("mbir: need IN.sino OUT.wimg");
    auto [rec, log] = admm_tv_reconstruct(sino, size, params);
    save_image(a.positional[1], rec);
    auto log_opt = a.options.find("--log");
    if (log_opt != a.options.end()) {
        std::ofstream csv(log_opt->second, std::ios::trunc);
        csv << objective_log_csv(log);
    }
    return 0;
}

int cmd_synth(const CliArgs& a) {
    if (a.positional.empty()) throw ConfigError("synth: missing output directory");
    SynthConfig sc;
    sc.n_phantoms = static_cast<int>(a.cfg.get_int("sim.n_phantoms", 5));
    sc.size = static_cast<int>(a.cfg.get_int("sim.size", 64));
    sc.geometry = geometry_from_config(a.cfg);
    sc.i0_routine = a.cfg.get_double("sim.i0_routine", 1e5);
    sc.seed = static_cast<std::uint64_t>(a.cfg.get_int("sim.seed", 1));
    sc.fbp = fbp_from_config(a.cfg);
    sc.slice_thickness_mm = a.cfg.get_double("sim.slice_thickness_mm", 3.0);
    DatasetManifest manifest = synth_dataset(sc, a.positional[0]);
    std::printf("wrote %zu pairs under %s\n", manifest.entries.size(),
                a.positional[0].c_str());
    return 0;
}

int cmd_train(const CliArgs& a) {
    if (a.positional.size() < 2) throw ConfigError("train: need MANIFEST OUT_DIR");
    DatasetManifest manifest = DatasetManifest::load(a.positional[0]);
    manifest.validate_files();
    TrainingConfig cfg = TrainingConfig::from_config(a.cfg);
    const FilterBank bank = FilterBank::make_default();
    TrainResult result = train(cfg, manifest, bank, a.positional[1]);
    std::printf("final checkpoint: %s\n", result.final_checkpoint.c_str());
    std::printf("best checkpoint:  %s\n", result.best_checkpoint.c_str());
    std::printf("convergence log:  %s\n", result.convergence_csv.c_str());
    std::printf("validation psnr:  %.3f dB, nrmse %.5f\n", result.final_val_psnr,
                result.final_val_nrmse);
    return 0;
}

int cmd_denoise(const CliArgs& a) {
    if (a.positional.size() < 3) throw ConfigError("denoise: need IN.wimg CKPT OUT.wimg");
    Image img = load_image(a.positional[0]);
    WavResNet net = load_checkpoint(a.positional[1]);
    const DecompositionSpec spec = spec_from_config(a.cfg);
    const std::string mode = a.cfg.get_string("train.target_mode", "residual");
    const std::string lowband = a.cfg.get_string("train.lowband_mode", "learned");
    Image out = denoise(img, net, spec, FilterBank::make_default(),
                        mode == "direct" ? TargetMode::Direct : TargetMode::Residual,
                        lowband == "bypass" ? LowbandMode::Bypass : LowbandMode::Learned);
    save_image(a.positional[2], out);
    return 0;
}

int cmd_eval(const CliArgs& a) {
    if (a.positional.size() < 2 || a.positional.size() % 2 != 0)
        throw ConfigError("eval: need TEST REF pairs");
    std::vector<Image> images;
    for (const std::string& path : a.positional) images.push_back(load_image(path));
    std::vector<std::pair<const Image*, const Image*>> pairs;
    for (std::size_t i = 0; i < images.size(); i += 2)
        pairs.emplace_back(&images[i], &images[i + 1]);
    const double peak = a.cfg.get_double("eval.peak", 0.0);
    double range = a.cfg.get_double("eval.dynamic_range", 0.0);
    if (range <= 0.0) {
        double lo = images[1].data[0], hi = images[1].data[0];
        for (std::size_t i = 1; i < images.size(); i += 2)
            for (double v : images[i].data) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        range = hi - lo;
    }
    MetricReport report =
        evaluate_dataset(pairs, peak, range, a.cfg.get_string("eval.method", "eval"));
    const std::string csv = metric_report_csv({report});
    auto csv_opt = a.options.find("--csv");
    if (csv_opt != a.options.end()) {
        std::ofstream out(csv_opt->second, std::ios::trunc);
        out << csv;
    }
    std::fputs(csv.c_str(), stdout);
    return 0;
}

int cmd_compare(const CliArgs& a) {
    if (a.positional.size() < 4)
        throw ConfigError("compare: need MANIFEST RES_CKPT DIR_CKPT OUT_DIR");
    DatasetManifest manifest = DatasetManifest::load(a.positional[0]);
    std::vector<int> validation;
    for (int idx : a.cfg.get_int_list("train.validation_slices", {}))
        validation.push_back(idx);
    CompareResult result = compare_methods(
        manifest, validation, a.positional[1], a.positional[2], tv_params_from_config(a.cfg),
        FilterBank::make_default(), spec_from_config(a.cfg), a.positional[3]);
    std::fputs(result.table.c_str(), stdout);
    std::printf("csv: %s\n", result.csv_path.c_str());
    return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args) {
    if (args.empty()) {
        std::fputs(kUsage, stderr);
        return 1;
    }
    try {
        const CliArgs parsed = parse_args(args);
        if (parsed.command == "phantom") return cmd_phantom(parsed);
        if (parsed.command == "project") return cmd_project(parsed);
        if (parsed.command == "noise") return cmd_noise(parsed);
        if (parsed.command == "fbp") return cmd_fbp(parsed);
        if (parsed.command == "nsct") return cmd_nsct(parsed);
        if (parsed.command == "mbir") return cmd_mbir(parsed);
        if (parsed.command == "synth") return cmd_synth(parsed);
        if (parsed.command == "train") return cmd_train(parsed);
        if (parsed.command == "denoise") return cmd_denoise(parsed);
        if (parsed.command == "eval") return cmd_eval(parsed);
        if (parsed.command == "compare") return cmd_compare(parsed);
        std::fprintf(stderr, "unknown command: %s\n%s", parsed.command.c_str(), kUsage);
        return 1;
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "divergence: %s\n", e.what());
        return 3;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "usage error: %s\n%s", e.what(), kUsage);
        return 1;
    } catch (const ParameterError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace wavres
