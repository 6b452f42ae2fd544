#include "wavres/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "wavres/binio.hpp"
#include "wavres/noise.hpp"
#include "wavres/phantom.hpp"
#include "wavres/rng.hpp"
#include "wavres/tensor.hpp"

namespace wavres {

namespace fs = std::filesystem;

void TrainingConfig::validate() const {
    decomposition.validate();
    topology.validate();
    if (topology.in_bands != decomposition.total_bands())
        throw ConfigError("training config: topology in_bands != decomposition band count");
    if (mini_batch < 1) throw ConfigError("training config: mini_batch must be >= 1");
    if (patch_size < 8) throw ConfigError("training config: patch_size must be >= 8");
    if (patch_stride < 1) throw ConfigError("training config: patch_stride must be >= 1");
    if (total_iterations < 1) throw ConfigError("training config: total_iterations must be >= 1");
    if (clip_threshold <= 0.0) throw ConfigError("training config: clip_threshold must be > 0");
    if (lr_start <= 0.0 || lr_end <= 0.0) throw ConfigError("training config: bad learning rates");
    if (eval_every < 1) throw ConfigError("training config: eval_every must be >= 1");
}

TrainingConfig TrainingConfig::from_config(const Config& cfg) {
    TrainingConfig tc;
    tc.decomposition.levels = static_cast<int>(cfg.get_int("nsct.levels", 4));
    tc.decomposition.directions_per_level = cfg.get_int_list("nsct.directions", {4, 4, 4, 2});
    tc.topology.in_bands = tc.decomposition.total_bands();
    tc.topology.channels = static_cast<int>(cfg.get_int("net.channels", 128));
    tc.topology.modules = static_cast<int>(cfg.get_int("net.modules", 6));
    tc.topology.convs_per_module = static_cast<int>(cfg.get_int("net.convs_per_module", 3));
    tc.topology.post_convs = static_cast<int>(cfg.get_int("net.post_convs", 4));
    tc.topology.coeff_scale = cfg.get_double("net.coeff_scale", 1.0);
    tc.total_iterations = cfg.get_int("train.total_iterations", 500);
    tc.mini_batch = static_cast<int>(cfg.get_int("train.mini_batch", 10));
    tc.patch_size = static_cast<int>(cfg.get_int("train.patch_size", 55));
    tc.patch_stride = static_cast<int>(cfg.get_int("train.patch_stride", 10));
    tc.lr_start = cfg.get_double("train.lr_start", 0.01);
    tc.lr_end = cfg.get_double("train.lr_end", 1e-5);
    tc.clip_threshold = cfg.get_double("train.clip_threshold", 1e-3);
    tc.seed = static_cast<std::uint64_t>(cfg.get_int("train.seed", 1));
    tc.eval_every = cfg.get_int("train.eval_every", 50);
    const std::string mode = cfg.get_string("train.target_mode", "residual");
    if (mode == "residual") tc.target_mode = TargetMode::Residual;
    else if (mode == "direct") tc.target_mode = TargetMode::Direct;
    else throw ConfigError("train.target_mode must be residual or direct");
    const std::string lowband = cfg.get_string("train.lowband_mode", "learned");
    if (lowband == "learned") tc.lowband_mode = LowbandMode::Learned;
    else if (lowband == "bypass") tc.lowband_mode = LowbandMode::Bypass;
    else throw ConfigError("train.lowband_mode must be learned or bypass");
    for (int idx : cfg.get_int_list("train.validation_slices", {}))
        tc.validation_slices.push_back(idx);
    const std::string risk = cfg.get_string("train.risk", "per_element");
    if (risk == "per_element") tc.risk_per_sample = false;
    else if (risk == "per_sample") tc.risk_per_sample = true;
    else throw ConfigError("train.risk must be per_element or per_sample");
    tc.validate();
    return tc;
}

GeometryConfig geometry_from_config(const Config& cfg) {
    GeometryConfig g;
    const std::string beam = cfg.get_string("sim.beam", "parallel");
    if (beam == "parallel") g.beam = BeamType::Parallel;
    else if (beam == "fan") g.beam = BeamType::Fan;
    else throw ConfigError("sim.beam must be parallel or fan");
    g.n_views = static_cast<int>(cfg.get_int("sim.n_views", 180));
    g.n_detectors = static_cast<int>(cfg.get_int("sim.n_detectors", 128));
    g.view_range = cfg.get_double("sim.view_range", 0.0);
    g.detector_spacing = cfg.get_double("sim.spacing", 0.0);
    g.source_to_isocenter = cfg.get_double("sim.source_to_isocenter", 3.0);
    g.source_to_detector = cfg.get_double("sim.source_to_detector", 6.0);
    g.validate();
    return g;
}

FbpConfig fbp_from_config(const Config& cfg) {
    FbpConfig fc;
    const std::string apod = cfg.get_string("sim.apodization", "hann");
    if (apod == "hann") fc.apodization = Apodization::Hann;
    else if (apod == "ramp") fc.apodization = Apodization::Ramp;
    else throw ConfigError("sim.apodization must be hann or ramp");
    fc.mu_water = cfg.get_double("sim.mu_water", 0.0);
    return fc;
}

TVParams tv_params_from_config(const Config& cfg) {
    TVParams tv;
    tv.lambda = cfg.get_double("mbir.lambda", tv.lambda);
    tv.rho = cfg.get_double("mbir.rho", tv.rho);
    tv.outer_iters = static_cast<int>(cfg.get_int("mbir.outer_iters", tv.outer_iters));
    tv.cg_iters = static_cast<int>(cfg.get_int("mbir.cg_iters", tv.cg_iters));
    tv.chambolle_iters =
        static_cast<int>(cfg.get_int("mbir.chambolle_iters", tv.chambolle_iters));
    tv.chambolle_step = cfg.get_double("mbir.chambolle_step", tv.chambolle_step);
    tv.tolerance = cfg.get_double("mbir.tolerance", tv.tolerance);
    tv.validate();
    return tv;
}

// --- manifest ---

void DatasetManifest::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write manifest: " + path);
    for (const ManifestEntry& e : entries) {
        out << e.routine_path << "\t" << e.quarter_path;
        for (const auto& [k, v] : e.provenance) out << "\t" << k << "=" << v;
        out << "\n";
    }
}

namespace {

// path fields are stored relative to the manifest so datasets are
// relocatable and reruns into different directories stay byte-identical
const char* const kPathKeys[] = {"clean", "sino_routine", "sino_quarter"};

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(base_dir) / path).string();
}

}  // namespace

DatasetManifest DatasetManifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read manifest: " + path);
    const std::string base_dir = fs::path(path).parent_path().string();
    DatasetManifest manifest;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        ManifestEntry e;
        int index = 0;
        while (std::getline(ls, field, '\t')) {
            if (index == 0) {
                e.routine_path = resolve_path(base_dir, field);
            } else if (index == 1) {
                e.quarter_path = resolve_path(base_dir, field);
            } else {
                const std::size_t eq = field.find('=');
                if (eq == std::string::npos)
                    throw FormatError("manifest: provenance field without '='", 0);
                e.provenance[field.substr(0, eq)] = field.substr(eq + 1);
            }
            ++index;
        }
        if (index < 2) throw FormatError("manifest: line with fewer than two paths", 0);
        for (const char* key : kPathKeys) {
            auto it = e.provenance.find(key);
            if (it != e.provenance.end()) it->second = resolve_path(base_dir, it->second);
        }
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

void DatasetManifest::validate_files() const {
    for (const ManifestEntry& e : entries) {
        Image routine = load_image(e.routine_path);
        Image quarter = load_image(e.quarter_path);
        if (!routine.same_shape(quarter))
            throw DimensionError("manifest: pair dimensions differ for " + e.routine_path);
    }
}

// --- dataset synthesis ---

DatasetManifest synth_dataset(const SynthConfig& cfg, const std::string& out_dir) {
    if (cfg.n_phantoms < 1) throw ConfigError("synth: n_phantoms must be >= 1");
    if (cfg.i0_routine <= 0.0) throw ConfigError("synth: i0_routine must be > 0");
    cfg.geometry.validate();
    fs::create_directories(out_dir);

    DatasetManifest manifest;
    char name[64];
    for (int i = 0; i < cfg.n_phantoms; ++i) {
        const std::uint64_t phantom_seed = Rng::stream(cfg.seed, 2000 + i).next_u64();
        Phantom phantom = random_phantom(phantom_seed);
        Image clean = rasterize_phantom(phantom, cfg.size);
        Sinogram sino = forward_project(clean, cfg.geometry);

        const std::uint64_t seed_routine = Rng::stream(cfg.seed, 2 * i).next_u64();
        const std::uint64_t seed_quarter = Rng::stream(cfg.seed, 2 * i + 1).next_u64();
        Sinogram sino_routine = inject_low_dose_noise(sino, cfg.i0_routine, seed_routine);
        Sinogram sino_quarter =
            inject_low_dose_noise(sino, cfg.i0_routine / 4.0, seed_quarter);

        Image routine = fbp_reconstruct(sino_routine, cfg.size, cfg.fbp);
        Image quarter = fbp_reconstruct(sino_quarter, cfg.size, cfg.fbp);

        ManifestEntry e;
        auto name_for = [&](const char* tag) {
            std::snprintf(name, sizeof name, "pair_%03d_%s.wimg", i, tag);
            return std::string(name);
        };
        auto full = [&](const std::string& n) { return (fs::path(out_dir) / n).string(); };
        e.routine_path = name_for("routine");
        e.quarter_path = name_for("quarter");
        const std::string clean_name = name_for("clean");
        const std::string sino_routine_name = name_for("sino_routine");
        const std::string sino_quarter_name = name_for("sino_quarter");
        save_image(full(clean_name), clean);
        save_image(full(e.routine_path), routine);
        save_image(full(e.quarter_path), quarter);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", cfg.i0_routine);
        save_sinogram(full(sino_routine_name), sino_routine,
                      {{"seed", std::to_string(seed_routine)}, {"I0", buf}});
        std::snprintf(buf, sizeof buf, "%.17g", cfg.i0_routine / 4.0);
        save_sinogram(full(sino_quarter_name), sino_quarter,
                      {{"seed", std::to_string(seed_quarter)}, {"I0", buf}});
        e.provenance["clean"] = clean_name;
        e.provenance["sino_routine"] = sino_routine_name;
        e.provenance["sino_quarter"] = sino_quarter_name;
        e.provenance["phantom_seed"] = std::to_string(phantom_seed);
        std::snprintf(buf, sizeof buf, "%.17g", cfg.i0_routine);
        e.provenance["i0_routine"] = buf;
        std::snprintf(buf, sizeof buf, "%.17g", cfg.i0_routine / 4.0);
        e.provenance["i0_quarter"] = buf;
        std::snprintf(buf, sizeof buf, "%.17g", cfg.slice_thickness_mm);
        e.provenance["slice_thickness_mm"] = buf;
        manifest.entries.push_back(std::move(e));
    }
    manifest.save((fs::path(out_dir) / "manifest.tsv").string());
    // hand back resolved paths; the file on disk keeps the relative names
    for (ManifestEntry& e : manifest.entries) {
        e.routine_path = resolve_path(out_dir, e.routine_path);
        e.quarter_path = resolve_path(out_dir, e.quarter_path);
        for (const char* key : kPathKeys) {
            auto it = e.provenance.find(key);
            if (it != e.provenance.end()) it->second = resolve_path(out_dir, it->second);
        }
    }
    return manifest;
}

// --- training set ---

namespace {

CoeffStack label_for(const Image& routine, const Image& quarter, const TrainingConfig& cfg,
                     const FilterBank& bank) {
    if (cfg.target_mode == TargetMode::Residual)
        return residual_label(routine, quarter, cfg.decomposition, bank);
    return nsct_forward(routine, cfg.decomposition, bank);
}

bool is_validation(const TrainingConfig& cfg, int index) {
    return std::find(cfg.validation_slices.begin(), cfg.validation_slices.end(), index) !=
           cfg.validation_slices.end();
}

}  // namespace

TrainingSet build_training_set(const DatasetManifest& manifest, const TrainingConfig& cfg,
                               const FilterBank& bank) {
    cfg.validate();
    if (manifest.entries.empty()) throw ConfigError("build_training_set: empty manifest");

    TrainingSet set;
    set.bands = cfg.decomposition.total_bands();
    for (int i = 0; i < static_cast<int>(manifest.entries.size()); ++i) {
        const ManifestEntry& e = manifest.entries[i];
        Image routine = load_image(e.routine_path);
        Image quarter = load_image(e.quarter_path);
        if (!routine.same_shape(quarter))
            throw DimensionError("build_training_set: pair dimensions differ");
        if (is_validation(cfg, i)) {
            set.val_quarter.push_back(std::move(quarter));
            set.val_routine.push_back(std::move(routine));
            continue;
        }
        CoeffStack input = nsct_forward(quarter, cfg.decomposition, bank);
        CoeffStack label = label_for(routine, quarter, cfg, bank);
        // feature normalization at the network boundary
        const double s = cfg.topology.coeff_scale;
        if (s != 1.0) {
            for (Image& band : input.bands) band = s * band;
            for (Image& band : label.bands) band = s * band;
        }
        set.inputs.push_back(std::move(input));
        set.labels.push_back(std::move(label));
    }
    if (set.inputs.empty()) throw ConfigError("build_training_set: no training pairs");

    for (int pair = 0; pair < static_cast<int>(set.inputs.size()); ++pair) {
        const Image& base = set.inputs[pair].bands[0];
        if (base.height < cfg.patch_size || base.width < cfg.patch_size)
            throw DimensionError("build_training_set: image smaller than patch size");
        for (int r = 0; r + cfg.patch_size <= base.height; r += cfg.patch_stride)
            for (int c = 0; c + cfg.patch_size <= base.width; c += cfg.patch_stride)
                set.grid.push_back({pair, r, c});
    }
    return set;
}

// --- training loop ---

namespace {

void fill_patch(Tensor4& dst, int batch_index, const CoeffStack& stack, int row, int col,
                int patch) {
    for (std::size_t band = 0; band < stack.bands.size(); ++band) {
        const Image& src = stack.bands[band];
        double* out = dst.plane_ptr(batch_index, static_cast<int>(band));
        for (int r = 0; r < patch; ++r)
            for (int c = 0; c < patch; ++c)
                out[r * patch + c] = src.at(row + r, col + c);
    }
}

struct ValScore {
    double psnr_db;
    double nrmse;
};

ValScore evaluate_validation(WavResNet& net, const TrainingSet& set,
                             const TrainingConfig& cfg, const FilterBank& bank) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const Image& ref : set.val_routine)
        for (double v : ref.data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const double peak = hi - lo;
    double sum_psnr = 0.0, sum_nrmse = 0.0;
    for (std::size_t i = 0; i < set.val_quarter.size(); ++i) {
        Image out = denoise(set.val_quarter[i], net, cfg.decomposition, bank,
                            cfg.target_mode, cfg.lowband_mode);
        sum_psnr += psnr(out, set.val_routine[i], peak);
        sum_nrmse += nrmse(out, set.val_routine[i]);
    }
    const double n = static_cast<double>(set.val_quarter.size());
    return {sum_psnr / n, sum_nrmse / n};
}

}  // namespace

TrainResult train(const TrainingConfig& cfg, const DatasetManifest& manifest,
                  const FilterBank& bank, const std::string& out_dir) {
    cfg.validate();
    TrainingSet set = build_training_set(manifest, cfg, bank);
    if (set.val_quarter.empty())
        throw ConfigError("train: no validation slices configured");
    fs::create_directories(out_dir);

    WavResNet net = WavResNet::initialize(cfg.topology, cfg.seed);
    // residual-friendly start: zero the output projection so training
    // begins at the identity map instead of unlearning He-initialized
    // output noise (the decayed-LR budget cannot remove it otherwise)
    std::fill(net.conv_out.kernels.begin(), net.conv_out.kernels.end(), 0.0);
    std::fill(net.conv_out.bias.begin(), net.conv_out.bias.end(), 0.0);
    WavResNet grads = WavResNet::zeros(cfg.topology);

    TrainState state;
    state.total_iterations = cfg.total_iterations;
    state.clip_threshold = cfg.clip_threshold;
    state.rng_seed = cfg.seed;

    std::vector<bool> channel_active(static_cast<std::size_t>(set.bands), true);
    if (cfg.lowband_mode == LowbandMode::Bypass) channel_active[0] = false;

    std::vector<std::size_t> order(set.grid.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::size_t cursor = order.size();  // trigger a shuffle on first use
    long epoch = 0;

    std::ostringstream csv;
    csv << "iteration,lr,train_loss,val_psnr_db,val_nrmse\n";
    char buf[160];

    const std::string final_path = (fs::path(out_dir) / "final.wrn").string();
    const std::string best_path = (fs::path(out_dir) / "best.wrn").string();
    double best_psnr = -std::numeric_limits<double>::infinity();
    ValScore last_score{0.0, 0.0};

    Tensor4 batch_x(cfg.mini_batch, set.bands, cfg.patch_size, cfg.patch_size);
    Tensor4 batch_y(cfg.mini_batch, set.bands, cfg.patch_size, cfg.patch_size);

    for (long iter = 0; iter < cfg.total_iterations; ++iter) {
        for (int b = 0; b < cfg.mini_batch; ++b) {
            if (cursor >= order.size()) {
                Rng shuffle_rng = Rng::stream(cfg.seed, 0x5AFEu + static_cast<std::uint64_t>(epoch));
                for (std::size_t i = order.size(); i > 1; --i)
                    std::swap(order[i - 1], order[shuffle_rng.below(i)]);
                cursor = 0;
                ++epoch;
            }
            const TrainingSet::GridPos& pos = set.grid[order[cursor++]];
            fill_patch(batch_x, b, set.inputs[pos.pair], pos.row, pos.col, cfg.patch_size);
            fill_patch(batch_y, b, set.labels[pos.pair], pos.row, pos.col, cfg.patch_size);
        }

        NetWorkspace ws;
        Tensor4 pred = net.forward(batch_x, NetMode::Train, &ws);
        Tensor4 loss_grad;
        double loss = cfg.lowband_mode == LowbandMode::Bypass
                          ? mse_loss_masked(pred, batch_y, channel_active, loss_grad)
                          : mse_loss(pred, batch_y, loss_grad);
        if (cfg.risk_per_sample) {
            // empirical risk as the mean over samples of ||Y - f(X)||^2
            const double per_sample =
                static_cast<double>(pred.size()) / static_cast<double>(pred.batch);
            loss *= per_sample;
            for (double& g : loss_grad.data) g *= per_sample;
        }
        if (!std::isfinite(loss))
            throw DivergenceError("train: non-finite loss", iter);

        net.backward(ws, loss_grad, grads);
        clip_gradients(grads, cfg.clip_threshold);
        const double lr = lr_schedule(iter, cfg.total_iterations, cfg.lr_start, cfg.lr_end);
        sgd_step(net, grads, lr);
        state.iteration = iter + 1;
        state.lr = lr;

        const long done = iter + 1;
        if (done % cfg.eval_every == 0 || done == cfg.total_iterations) {
            last_score = evaluate_validation(net, set, cfg, bank);
            state.convergence_log.push_back(
                {done, lr, loss, last_score.psnr_db, last_score.nrmse});
            std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g\n", done, lr, loss,
                          last_score.psnr_db, last_score.nrmse);
            csv << buf;
            if (last_score.psnr_db > best_psnr) {
                best_psnr = last_score.psnr_db;
                save_checkpoint(best_path, net);
            }
        }
    }

    save_checkpoint(final_path, net);
    const std::string csv_path = (fs::path(out_dir) / "convergence.csv").string();
    std::ofstream csv_file(csv_path, std::ios::trunc);
    if (!csv_file) throw IoError("cannot write convergence log: " + csv_path);
    csv_file << csv.str();

    TrainResult result;
    result.final_checkpoint = final_path;
    result.best_checkpoint = best_path;
    result.convergence_csv = csv_path;
    result.final_val_psnr = last_score.psnr_db;
    result.final_val_nrmse = last_score.nrmse;
    result.state = std::move(state);
    return result;
}

// --- inference ---

Image denoise(const Image& image, WavResNet& net, const DecompositionSpec& spec,
              const FilterBank& bank, TargetMode target_mode, LowbandMode lowband_mode) {
    if (net.topology.in_bands != spec.total_bands())
        throw StateError("denoise: checkpoint topology does not match the decomposition");
    CoeffStack input = nsct_forward(image, spec, bank);
    const double s = net.topology.coeff_scale;
    Tensor4 x = stack_to_tensor(input.bands);
    if (s != 1.0)
        for (double& v : x.data) v *= s;
    Tensor4 pred = net.forward(x, NetMode::Infer);
    if (s != 1.0)
        for (double& v : pred.data) v /= s;
    ImageStack predicted = tensor_to_stack(pred);

    CoeffStack out;
    out.spec = spec;
    out.bands.reserve(predicted.size());
    for (std::size_t band = 0; band < predicted.size(); ++band) {
        if (target_mode == TargetMode::Residual)
            out.bands.push_back(input.bands[band] + predicted[band]);
        else
            out.bands.push_back(std::move(predicted[band]));
    }
    if (lowband_mode == LowbandMode::Bypass) out.bands[0] = input.bands[0];
    return nsct_inverse(out, bank);
}

// --- comparison harness ---

CompareResult compare_methods(const DatasetManifest& manifest,
                              const std::vector<int>& validation_slices,
                              const std::string& residual_checkpoint,
                              const std::string& direct_checkpoint,
                              const TVParams& mbir_params, const FilterBank& bank,
                              const DecompositionSpec& spec, const std::string& out_dir) {
    if (validation_slices.empty())
        throw ConfigError("compare_methods: no validation slices");
    fs::create_directories(out_dir);

    WavResNet residual_net = load_checkpoint(residual_checkpoint);
    WavResNet direct_net = load_checkpoint(direct_checkpoint);

    std::vector<Image> routine, quarter, mbir_out, direct_out, residual_out;
    for (int idx : validation_slices) {
        if (idx < 0 || idx >= static_cast<int>(manifest.entries.size()))
            throw ConfigError("compare_methods: validation index out of range");
        const ManifestEntry& e = manifest.entries[idx];
        routine.push_back(load_image(e.routine_path));
        quarter.push_back(load_image(e.quarter_path));

        auto sino_it = e.provenance.find("sino_quarter");
        if (sino_it == e.provenance.end())
            throw ConfigError("compare_methods: manifest entry lacks sino_quarter");
        Sinogram sino = load_sinogram(sino_it->second);
        auto [mbir_img, log] =
            admm_tv_reconstruct(sino, routine.back().height, mbir_params);
        mbir_out.push_back(std::move(mbir_img));

        direct_out.push_back(denoise(quarter.back(), direct_net, spec, bank,
                                     TargetMode::Direct, LowbandMode::Bypass));
        residual_out.push_back(denoise(quarter.back(), residual_net, spec, bank,
                                       TargetMode::Residual, LowbandMode::Learned));
    }

    auto make_pairs = [&](const std::vector<Image>& method) {
        std::vector<std::pair<const Image*, const Image*>> pairs;
        for (std::size_t i = 0; i < method.size(); ++i)
            pairs.emplace_back(&method[i], &routine[i]);
        return pairs;
    };

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const Image& ref : routine)
        for (double v : ref.data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const double peak = hi - lo;

    CompareResult result;
    result.reports.push_back(evaluate_dataset(make_pairs(quarter), peak, peak, "noisy_input"));
    result.reports.push_back(evaluate_dataset(make_pairs(mbir_out), peak, peak, "mbir_tv"));
    result.reports.push_back(evaluate_dataset(make_pairs(direct_out), peak, peak, "direct_net"));
    result.reports.push_back(
        evaluate_dataset(make_pairs(residual_out), peak, peak, "residual_net"));

    // difference images, method minus routine, fixed display window
    const double window = 70.0;
    auto dump_diffs = [&](const std::vector<Image>& method, const char* tag) {
        for (std::size_t i = 0; i < method.size(); ++i) {
            Image diff = method[i] - routine[i];
            char name[96];
            std::snprintf(name, sizeof name, "diff_%s_%02zu.pgm", tag, i);
            save_pgm((fs::path(out_dir) / name).string(),
                     window_hu(diff, -window, window), diff.height, diff.width);
        }
    };
    dump_diffs(quarter, "noisy_input");
    dump_diffs(mbir_out, "mbir_tv");
    dump_diffs(direct_out, "direct_net");
    dump_diffs(residual_out, "residual_net");

    result.csv_path = (fs::path(out_dir) / "compare.csv").string();
    std::ofstream csv(result.csv_path, std::ios::trunc);
    if (!csv) throw IoError("cannot write comparison CSV: " + result.csv_path);
    csv << metric_report_csv(result.reports);
    result.table = metric_report_table(result.reports);
    return result;
}

}  // namespace wavres
