// Acceptance suite: runs every release criterion end to end and prints
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
//
// usage: acceptance [CONFIG_DIR] [WORK_DIR]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "wavres/binio.hpp"
#include "wavres/mbir.hpp"
#include "wavres/noise.hpp"
#include "wavres/phantom.hpp"
#include "wavres/pipeline.hpp"
#include "wavres/rng.hpp"
#include "wavres/tensor.hpp"

using namespace wavres;
namespace fs = std::filesystem;

namespace {

std::string g_config_dir = "configs";
std::string g_work_dir = "/tmp/wavres_acceptance";

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", id, name,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run_criterion(int id, const char* name, const std::function<std::string()>& body) {
    try {
        const std::string detail = body();
        report(id, name, true, detail);
    } catch (const std::exception& e) {
        report(id, name, false, e.what());
    }
}

struct CheckFailure : std::runtime_error {
    explicit CheckFailure(const std::string& msg) : std::runtime_error(msg) {}
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw CheckFailure(msg);
}

Image random_image(int h, int w, Rng& rng, double scale = 1.0) {
    Image img(h, w);
    for (double& v : img.data) v = scale * (rng.uniform() * 2.0 - 1.0);
    return img;
}

double rel_l2(const Image& a, const Image& b) { return norm2(a - b) / norm2(b); }

double max_abs(const Image& a) {
    double m = 0.0;
    for (double v : a.data) m = std::max(m, std::abs(v));
    return m;
}

Image circular_shift(const Image& x, int sr, int sc) {
    Image out(x.height, x.width);
    for (int r = 0; r < x.height; ++r)
        for (int c = 0; c < x.width; ++c) {
            const int rr = ((r + sr) % x.height + x.height) % x.height;
            const int cc = ((c + sc) % x.width + x.width) % x.width;
            out.at(rr, cc) = x.at(r, c);
        }
    return out;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- criterion 1: transform correctness ----

std::string criterion_transform() {
    const auto t0 = std::chrono::steady_clock::now();
    const FilterBank bank = FilterBank::make_default();
    const DecompositionSpec spec;
    Rng rng(20240801);

    double worst_pr = 0.0;
    for (int i = 0; i < 100; ++i) {
        Image x = random_image(64, 64, rng);
        worst_pr = std::max(worst_pr, rel_l2(nsct_inverse(nsct_forward(x, spec, bank), bank), x));
    }
    Image sl = rasterize_phantom(shepp_logan(), 128);
    worst_pr = std::max(worst_pr, rel_l2(nsct_inverse(nsct_forward(sl, spec, bank), bank), sl));
    require(worst_pr < 1e-8, "perfect reconstruction error " + std::to_string(worst_pr));

    Image base = random_image(64, 64, rng);
    CoeffStack t_base = nsct_forward(base, spec, bank);
    double worst_shift = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int sr = static_cast<int>(rng.below(64));
        const int sc = static_cast<int>(rng.below(64));
        CoeffStack t_shifted = nsct_forward(circular_shift(base, sr, sc), spec, bank);
        for (std::size_t b = 0; b < t_base.bands.size(); ++b)
            worst_shift = std::max(
                worst_shift, max_abs(t_shifted.bands[b] - circular_shift(t_base.bands[b], sr, sc)));
    }
    require(worst_shift < 1e-10, "shift invariance error " + std::to_string(worst_shift));

    const double elapsed = seconds_since(t0);
    require(elapsed < 60.0, "runtime " + std::to_string(elapsed) + " s");
    char buf[160];
    std::snprintf(buf, sizeof buf, "PR err %.2e, shift err %.2e, %.1f s", worst_pr,
                  worst_shift, elapsed);
    return buf;
}

// ---- criterion 2: vanishing moments ----

std::string criterion_vanishing_moments() {
    const FilterBank bank = FilterBank::make_default();
    CoeffStack stack = nsct_forward(Image(64, 64, 1.0), DecompositionSpec{}, bank);
    require(stack.bands.size() == 15, "expected 15 bands");
    double worst = 0.0;
    for (std::size_t b = 1; b < stack.bands.size(); ++b)
        worst = std::max(worst, max_abs(stack.bands[b]));
    require(worst < 1e-10, "non-lowpass response " + std::to_string(worst));
    char buf[96];
    std::snprintf(buf, sizeof buf, "14 bands silent, max abs %.2e", worst);
    return buf;
}

// ---- criterion 3: gradient fidelity ----

double weighted_sum(const Tensor4& t, const Tensor4& w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) acc += t.data[i] * w.data[i];
    return acc;
}

template <typename Fn>
double central_diff(double& slot, Fn&& eval) {
    const double step = 1e-6;
    const double saved = slot;
    slot = saved + step;
    const double hi = eval();
    slot = saved - step;
    const double lo = eval();
    slot = saved;
    return (hi - lo) / (2.0 * step);
}

void require_close(double fd, double an, double tol, const char* where) {
    const double scale = std::max({std::abs(fd), std::abs(an), 1e-3});
    if (std::abs(fd - an) > tol * scale)
        throw CheckFailure(std::string(where) + ": fd " + std::to_string(fd) + " vs " +
                           std::to_string(an));
}

Tensor4 random_tensor(int b, int c, int h, int w, Rng& rng, double scale = 1.0) {
    Tensor4 t(b, c, h, w);
    for (double& v : t.data) v = scale * (rng.uniform() * 2.0 - 1.0);
    return t;
}

std::string criterion_gradients() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(77001);

    // conv layer, 3 instances
    for (int inst = 0; inst < 3; ++inst) {
        const int ic = 2 + inst, oc = 2 + (inst + 1) % 3;
        Tensor4 x = random_tensor(1 + inst % 2, ic, 6, 6, rng);
        ConvLayer layer(ic, oc);
        for (double& w : layer.kernels) w = 0.5 * (rng.uniform() * 2.0 - 1.0);
        for (double& b : layer.bias) b = 0.2 * rng.uniform();
        Tensor4 weights = random_tensor(x.batch, oc, 6, 6, rng);
        auto eval = [&] { return weighted_sum(conv2d_forward(x, layer), weights); };
        Tensor4 gx;
        ConvLayer gl;
        conv2d_backward(x, layer, weights, gx, gl);
        for (int probe = 0; probe < 10; ++probe) {
            std::size_t i = rng.below(x.size());
            require_close(central_diff(x.data[i], eval), gx.data[i], 1e-5, "conv input");
            i = rng.below(layer.kernels.size());
            require_close(central_diff(layer.kernels[i], eval), gl.kernels[i], 1e-5,
                          "conv kernel");
        }
        require_close(central_diff(layer.bias[0], eval), gl.bias[0], 1e-5, "conv bias");
    }

    // batchnorm, 3 instances (train mode, statistics dependence included)
    for (int inst = 0; inst < 3; ++inst) {
        Tensor4 x = random_tensor(2, 2 + inst, 3, 3, rng, 2.0);
        BatchNormLayer layer(2 + inst);
        for (double& v : layer.scale) v = 0.5 + rng.uniform();
        for (double& v : layer.shift) v = rng.uniform() - 0.5;
        Tensor4 weights = random_tensor(2, 2 + inst, 3, 3, rng);
        auto eval = [&] {
            BatchNormLayer probe_layer = layer;
            return weighted_sum(batchnorm_forward(x, probe_layer, NetMode::Train), weights);
        };
        BatchNormCache cache;
        BatchNormLayer fwd = layer;
        batchnorm_forward(x, fwd, NetMode::Train, &cache);
        Tensor4 gx;
        std::vector<double> gs, gb;
        batchnorm_backward(cache, layer, weights, gx, gs, gb);
        for (int probe = 0; probe < 10; ++probe) {
            const std::size_t i = rng.below(x.size());
            require_close(central_diff(x.data[i], eval), gx.data[i], 1e-4, "bn input");
        }
        require_close(central_diff(layer.scale[0], eval), gs[0], 1e-4, "bn scale");
        require_close(central_diff(layer.shift[0], eval), gb[0], 1e-4, "bn shift");
    }

    // relu, 3 instances (probes away from the kink)
    for (int inst = 0; inst < 3; ++inst) {
        Tensor4 x = random_tensor(1, 3, 5, 5, rng);
        for (double& v : x.data)
            if (std::abs(v) < 1e-2) v = 0.3;
        Tensor4 weights = random_tensor(1, 3, 5, 5, rng);
        auto eval = [&] { return weighted_sum(relu_forward(x), weights); };
        Tensor4 gx = relu_backward(x, weights);
        for (int probe = 0; probe < 10; ++probe) {
            const std::size_t i = rng.below(x.size());
            require_close(central_diff(x.data[i], eval), gx.data[i], 1e-5, "relu");
        }
    }

    // concat, 3 instances: backward splits exactly
    for (int inst = 0; inst < 3; ++inst) {
        Tensor4 a = random_tensor(1, 2 + inst, 4, 4, rng);
        Tensor4 b = random_tensor(1, 3, 4, 4, rng);
        Tensor4 cat = concat_forward({&a, &b});
        Tensor4 gout = random_tensor(1, cat.channels, 4, 4, rng);
        auto parts = concat_backward(gout, {a.channels, b.channels});
        for (int probe = 0; probe < 10; ++probe) {
            const std::size_t i = rng.below(a.size());
            auto eval = [&] { return weighted_sum(concat_forward({&a, &b}), gout); };
            require_close(central_diff(a.data[i], eval), parts[0].data[i], 1e-6, "concat");
        }
    }

    // the full 24-conv network at the paper-scale default topology
    TopologyConfig topo;  // 15 bands, 128 channels, 24 convs
    require(topo.conv_count() == 24, "default topology must have 24 convs");
    for (int inst = 0; inst < 3; ++inst) {
        WavResNet net = WavResNet::initialize(topo, 555 + inst);
        net.visit_learnable([](std::vector<double>& arr) {
            for (double& v : arr) v *= 0.3;
        });
        for (double& v : net.bn_in.scale) v = 1.0;
        Tensor4 x = random_tensor(1, 15, 8, 8, rng);
        Tensor4 weights = random_tensor(1, 15, 8, 8, rng);
        NetWorkspace ws;
        net.forward(x, NetMode::Train, &ws);
        WavResNet grads = WavResNet::zeros(topo);
        Tensor4 gx = net.backward(ws, weights, grads);
        auto eval = [&] {
            NetWorkspace tmp;
            return weighted_sum(net.forward(x, NetMode::Train, &tmp), weights);
        };
        for (int probe = 0; probe < 4; ++probe) {
            const std::size_t i = rng.below(x.size());
            require_close(central_diff(x.data[i], eval), gx.data[i], 1e-4, "net input");
        }
        std::vector<std::vector<double>*> pa, ga;
        net.visit_learnable([&](std::vector<double>& arr) { pa.push_back(&arr); });
        grads.visit_learnable([&](std::vector<double>& arr) { ga.push_back(&arr); });
        for (int probe = 0; probe < 20; ++probe) {
            const std::size_t a = rng.below(pa.size());
            const std::size_t i = rng.below(pa[a]->size());
            require_close(central_diff((*pa[a])[i], eval), (*ga[a])[i], 1e-4, "net param");
        }
    }

    const double elapsed = seconds_since(t0);
    require(elapsed < 300.0, "runtime " + std::to_string(elapsed) + " s");
    char buf[96];
    std::snprintf(buf, sizeof buf, "all layer types + full net, %.1f s", elapsed);
    return buf;
}

// ---- criterion 4: projector adjointness ----

std::string criterion_adjoint() {
    Rng rng(88002);
    GeometryConfig g;
    g.n_views = 90;
    g.n_detectors = 96;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Image x = random_image(64, 64, rng);
        Sinogram y(g);
        for (double& v : y.data) v = rng.uniform() * 2.0 - 1.0;
        Sinogram ax = forward_project(x, g);
        Image aty = backproject(y, 64);
        double lhs = 0.0;
        for (std::size_t i = 0; i < ax.data.size(); ++i) lhs += ax.data[i] * y.data[i];
        const double rhs = dot(x, aty);
        worst = std::max(worst,
                         std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
    }
    require(worst < 1e-10, "adjoint mismatch " + std::to_string(worst));
    char buf[96];
    std::snprintf(buf, sizeof buf, "20 pairs, worst relative mismatch %.2e", worst);
    return buf;
}

// ---- criterion 5: FBP sanity, frozen reference ----

std::string criterion_fbp() {
    Image ref = rasterize_phantom(shepp_logan(), 128);
    GeometryConfig g;
    g.n_views = 360;
    g.n_detectors = 511;
    g.detector_spacing = 2.0 * std::sqrt(2.0) / 511;
    Sinogram sino = forward_project(ref, g);
    FbpConfig cfg;
    cfg.apodization = Apodization::Ramp;
    Image rec = fbp_reconstruct(sino, 128, cfg);
    const double err = nrmse(rec, ref);
    require(err < 0.05, "NRMSE " + std::to_string(err));
    std::uint64_t bits;
    std::memcpy(&bits, &err, 8);
    require(bits == 0x3FA73973FC5B62A5ull, "NRMSE bits drifted from the frozen run");
    char buf[96];
    std::snprintf(buf, sizeof buf, "NRMSE %.6f, bit-exact vs frozen reference", err);
    return buf;
}

// ---- criterion 6: MBIR descent ----

std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc -= a[ri][c] * x[c];
        x[ri] = acc / a[ri][ri];
    }
    return x;
}

std::string criterion_mbir() {
    // tiny instance vs dense normal equations
    Phantom p;
    p.ellipses.push_back({0.0, 0.1, 0.6, 0.5, 0.3, 1.0});
    p.ellipses.push_back({-0.2, -0.2, 0.25, 0.2, 0.0, 0.5});
    Image truth = rasterize_phantom(p, 16);
    GeometryConfig g;
    g.n_views = 24;
    g.n_detectors = 31;
    g.detector_spacing = 2.0 * std::sqrt(2.0) / 31;
    Sinogram sino = forward_project(truth, g);

    const int n = 256;
    std::vector<std::vector<double>> columns;
    for (int i = 0; i < n; ++i) {
        Image unit(16, 16, 0.0);
        unit.data[i] = 1.0;
        columns.push_back(forward_project(unit, g).data);
    }
    std::vector<std::vector<double>> ata(n, std::vector<double>(n, 0.0));
    std::vector<double> atb(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < sino.data.size(); ++k)
                acc += columns[i][k] * columns[j][k];
            ata[i][j] = ata[j][i] = acc;
        }
        for (std::size_t k = 0; k < sino.data.size(); ++k)
            atb[i] += columns[i][k] * sino.data[k];
    }
    Image dense(16, 16);
    dense.data = dense_solve(ata, atb);

    TVParams tiny;
    tiny.lambda = 0.0;
    tiny.rho = 0.01;
    tiny.outer_iters = 60;
    tiny.cg_iters = 40;
    auto [rec, tiny_log] = admm_tv_reconstruct(sino, 16, tiny);
    const double err = rel_l2(rec, dense);
    require(err < 1e-4, "dense-solution mismatch " + std::to_string(err));

    // 128x128 noisy instance: logged objective non-increasing after iter 3
    Image sl = rasterize_phantom(shepp_logan(), 128);
    GeometryConfig g128;
    g128.n_views = 120;
    g128.n_detectors = 135;
    g128.detector_spacing = 2.0 * std::sqrt(2.0) / 135;
    Sinogram noisy = inject_low_dose_noise(forward_project(sl, g128), 1e5, 2024);
    TVParams params;
    params.lambda = 0.05;
    params.rho = 1.0;
    params.outer_iters = 15;
    params.cg_iters = 6;
    auto [rec128, log] = admm_tv_reconstruct(noisy, 128, params);
    require(log.size() >= 10, "objective log too short");
    for (std::size_t i = 4; i < log.size(); ++i)
        require(log[i].total <= log[i - 1].total * (1.0 + 1e-6),
                "objective increased at iteration " + std::to_string(i));
    char buf[128];
    std::snprintf(buf, sizeof buf, "dense match %.2e, 128x128 objective monotone", err);
    return buf;
}

// ---- criteria 7-9 share the desk-scale artifacts ----

struct DeskArtifacts {
    bool ready = false;
    std::string failure;
    DatasetManifest manifest;
    double baseline_psnr = 0.0;
    double baseline_nrmse = 0.0;
    TrainResult residual;
    TrainResult direct;
    double residual_runtime = 0.0;
};

DeskArtifacts g_desk;

void build_desk_artifacts() {
    Config synth_cfg = Config::from_file(g_config_dir + "/desk64_synth.cfg");
    SynthConfig sc;
    sc.n_phantoms = static_cast<int>(synth_cfg.get_int("sim.n_phantoms"));
    sc.size = static_cast<int>(synth_cfg.get_int("sim.size"));
    sc.geometry = geometry_from_config(synth_cfg);
    sc.i0_routine = synth_cfg.get_double("sim.i0_routine");
    sc.seed = static_cast<std::uint64_t>(synth_cfg.get_int("sim.seed"));
    sc.fbp = fbp_from_config(synth_cfg);
    const std::string data_dir = g_work_dir + "/desk_data";
    g_desk.manifest = synth_dataset(sc, data_dir);

    Image routine = load_image(g_desk.manifest.entries[4].routine_path);
    Image quarter = load_image(g_desk.manifest.entries[4].quarter_path);
    double lo = routine.data[0], hi = routine.data[0];
    for (double v : routine.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    g_desk.baseline_psnr = psnr(quarter, routine, hi - lo);
    g_desk.baseline_nrmse = nrmse(quarter, routine);

    const FilterBank bank = FilterBank::make_default();
    TrainingConfig res_cfg =
        TrainingConfig::from_config(Config::from_file(g_config_dir + "/desk64_train_residual.cfg"));
    const auto t0 = std::chrono::steady_clock::now();
    g_desk.residual = train(res_cfg, g_desk.manifest, bank, g_work_dir + "/run_residual");
    g_desk.residual_runtime = seconds_since(t0);

    TrainingConfig dir_cfg =
        TrainingConfig::from_config(Config::from_file(g_config_dir + "/desk64_train_direct.cfg"));
    g_desk.direct = train(dir_cfg, g_desk.manifest, bank, g_work_dir + "/run_direct");
    g_desk.ready = true;
}

std::string criterion_desk_training() {
    if (!g_desk.ready) throw CheckFailure("desk artifacts unavailable: " + g_desk.failure);
    const double gain = g_desk.residual.final_val_psnr - g_desk.baseline_psnr;
    require(gain >= 1.0, "PSNR gain " + std::to_string(gain) + " dB < 1 dB");
    require(g_desk.residual.final_val_nrmse < g_desk.baseline_nrmse,
            "NRMSE did not decrease");
    require(g_desk.residual_runtime < 900.0,
            "runtime " + std::to_string(g_desk.residual_runtime) + " s");
    char buf[160];
    std::snprintf(buf, sizeof buf, "+%.2f dB (%.2f -> %.2f), NRMSE %.4f -> %.4f, %.0f s", gain,
                  g_desk.baseline_psnr, g_desk.residual.final_val_psnr, g_desk.baseline_nrmse,
                  g_desk.residual.final_val_nrmse, g_desk.residual_runtime);
    return buf;
}

std::string criterion_residual_vs_direct() {
    if (!g_desk.ready) throw CheckFailure("desk artifacts unavailable: " + g_desk.failure);
    require(g_desk.residual.final_val_nrmse <= g_desk.direct.final_val_nrmse,
            "residual NRMSE " + std::to_string(g_desk.residual.final_val_nrmse) +
                " > direct " + std::to_string(g_desk.direct.final_val_nrmse));
    char buf[128];
    std::snprintf(buf, sizeof buf, "val NRMSE at 500: residual %.4f <= direct %.4f",
                  g_desk.residual.final_val_nrmse, g_desk.direct.final_val_nrmse);
    return buf;
}

std::string criterion_method_table() {
    if (!g_desk.ready) throw CheckFailure("desk artifacts unavailable: " + g_desk.failure);
    TVParams tv = tv_params_from_config(Config::from_file(g_config_dir + "/desk64_mbir.cfg"));
    CompareResult cmp = compare_methods(
        g_desk.manifest, {4}, g_desk.residual.final_checkpoint, g_desk.direct.final_checkpoint,
        tv, FilterBank::make_default(), DecompositionSpec{}, g_work_dir + "/compare");
    require(cmp.reports.size() == 4, "expected 4 method reports");
    const MetricReport& noisy = cmp.reports[0];
    const MetricReport& mbir = cmp.reports[1];
    const MetricReport& direct = cmp.reports[2];
    const MetricReport& residual = cmp.reports[3];
    require(residual.avg_psnr_db >= noisy.avg_psnr_db, "residual did not beat noisy input");
    require(residual.avg_psnr_db >= direct.avg_psnr_db, "residual did not beat direct mode");
    require(mbir.avg_psnr_db > noisy.avg_psnr_db, "MBIR-TV did not beat noisy input");
    require(fs::exists(cmp.csv_path), "comparison CSV missing");
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "avg PSNR: noisy %.2f, mbir %.2f, direct %.2f, residual %.2f", noisy.avg_psnr_db,
                  mbir.avg_psnr_db, direct.avg_psnr_db, residual.avg_psnr_db);
    return buf;
}

// ---- criterion 10: determinism and formats ----

void run_small_pipeline(const std::string& dir) {
    SynthConfig sc;
    sc.n_phantoms = 2;
    sc.size = 64;
    sc.geometry.n_views = 45;
    sc.geometry.n_detectors = 63;
    sc.geometry.detector_spacing = 2.0 * std::sqrt(2.0) / 63;
    sc.i0_routine = 2e4;
    sc.seed = 777;
    DatasetManifest manifest = synth_dataset(sc, dir + "/data");

    TrainingConfig tc;
    tc.topology.channels = 4;
    tc.topology.coeff_scale = 120;
    tc.total_iterations = 20;
    tc.mini_batch = 4;
    tc.patch_size = 16;
    tc.patch_stride = 8;
    tc.clip_threshold = 1.0;
    tc.risk_per_sample = true;
    tc.seed = 31;
    tc.eval_every = 10;
    tc.validation_slices = {1};
    const FilterBank bank = FilterBank::make_default();
    TrainResult result = train(tc, manifest, bank, dir + "/run");

    WavResNet net = load_checkpoint(result.final_checkpoint);
    Image quarter = load_image(manifest.entries[1].quarter_path);
    Image out =
        denoise(quarter, net, tc.decomposition, bank, tc.target_mode, tc.lowband_mode);
    save_image(dir + "/denoised.wimg", out);
}

std::string criterion_determinism() {
    const std::string dir_a = g_work_dir + "/det_a";
    const std::string dir_b = g_work_dir + "/det_b";
    run_small_pipeline(dir_a);
    run_small_pipeline(dir_b);

    std::size_t compared = 0;
    for (auto& entry : fs::recursive_directory_iterator(dir_a)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), dir_a).string();
        const auto bytes_a = read_file_bytes(entry.path().string());
        const auto bytes_b = read_file_bytes((fs::path(dir_b) / rel).string());
        require(bytes_a == bytes_b, "artifact differs between reruns: " + rel);
        ++compared;
    }
    require(compared >= 12, "too few artifacts compared");

    // bit-exact roundtrips
    Rng rng(99004);
    Image img = random_image(32, 32, rng, 1e6);
    img.data[0] = -0.0;
    save_image(g_work_dir + "/rt.wimg", img);
    Image back = load_image(g_work_dir + "/rt.wimg");
    require(std::memcmp(img.data.data(), back.data.data(), img.size() * 8) == 0,
            "WIMG roundtrip not bit-exact");

    // CRC catches a single flipped byte
    const std::string ckpt = g_work_dir + "/det_a/run/final.wrn";
    auto bytes = read_file_bytes(ckpt);
    bytes[bytes.size() / 3] ^= 0x10;
    write_file_bytes(g_work_dir + "/flipped.wrn", bytes);
    bool caught = false;
    try {
        load_checkpoint(g_work_dir + "/flipped.wrn");
    } catch (const FormatError&) {
        caught = true;
    }
    require(caught, "flipped byte not caught by CRC");

    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu artifacts bit-identical, CRC flip caught", compared);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_config_dir = argv[1];
    if (argc > 2) g_work_dir = argv[2];
    fs::remove_all(g_work_dir);
    fs::create_directories(g_work_dir);

    std::printf("acceptance suite (configs: %s, work dir: %s)\n", g_config_dir.c_str(),
                g_work_dir.c_str());

    run_criterion(1, "transform correctness", criterion_transform);
    run_criterion(2, "vanishing-moment annihilation", criterion_vanishing_moments);
    run_criterion(3, "gradient fidelity", criterion_gradients);
    run_criterion(4, "projector adjointness", criterion_adjoint);
    run_criterion(5, "FBP sanity (frozen reference)", criterion_fbp);
    run_criterion(6, "MBIR descent", criterion_mbir);

    try {
        build_desk_artifacts();
    } catch (const std::exception& e) {
        g_desk.failure = e.what();
    }
    run_criterion(7, "desk-scale denoising efficacy", criterion_desk_training);
    run_criterion(8, "residual vs direct convergence", criterion_residual_vs_direct);
    run_criterion(9, "three-method comparison table", criterion_method_table);
    run_criterion(10, "determinism and formats", criterion_determinism);

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
