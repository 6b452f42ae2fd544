#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavres/config.hpp"
#include "wavres/fbp.hpp"
#include "wavres/mbir.hpp"
#include "wavres/metrics.hpp"
#include "wavres/nsct.hpp"
#include "wavres/optim.hpp"
#include "wavres/projector.hpp"
#include "wavres/wavresnet.hpp"

namespace wavres {

enum class TargetMode { Residual, Direct };
enum class LowbandMode { Learned, Bypass };

struct TrainingConfig {
    DecompositionSpec decomposition;
    TopologyConfig topology;
    long total_iterations = 500;
    int mini_batch = 10;
    int patch_size = 55;
    int patch_stride = 10;
    double lr_start = 0.01;
    double lr_end = 1e-5;
    double clip_threshold = 1e-3;
    std::uint64_t seed = 1;
    TargetMode target_mode = TargetMode::Residual;
    LowbandMode lowband_mode = LowbandMode::Learned;
    long eval_every = 50;
    std::vector<int> validation_slices;  // manifest indices held out
    // Empirical-risk normalization: false averages the squared error over
    // every element (the plain mse_loss op), true averages summed squared
    // norms over the mini-batch only.
    bool risk_per_sample = false;

    void validate() const;
    static TrainingConfig from_config(const Config& cfg);
};

GeometryConfig geometry_from_config(const Config& cfg);
FbpConfig fbp_from_config(const Config& cfg);
TVParams tv_params_from_config(const Config& cfg);

struct ManifestEntry {
    std::string routine_path;
    std::string quarter_path;
    std::map<std::string, std::string> provenance;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    void save(const std::string& path) const;
    static DatasetManifest load(const std::string& path);
    // every referenced file exists and parses; pair dimensions match
    void validate_files() const;
};

struct SynthConfig {
    int n_phantoms = 5;
    int size = 64;
    GeometryConfig geometry;
    double i0_routine = 1e5;
    std::uint64_t seed = 1;
    FbpConfig fbp;
    // pure metadata in a 2D pipeline; recorded in the manifest provenance
    double slice_thickness_mm = 3.0;
};

// Randomized phantoms -> forward projection -> photon noise at the
// routine dose and at a quarter of it -> FBP pairs, written as WIMG files
// with sinograms and a manifest.
DatasetManifest synth_dataset(const SynthConfig& cfg, const std::string& out_dir);

// Full-image coefficient transforms plus the aligned patch grid. Patches
// are cut from the transforms of whole images, never transforms of
// patches.
struct TrainingSet {
    std::vector<CoeffStack> inputs;   // X' = T(quarter) per training pair
    std::vector<CoeffStack> labels;   // Y' per pair (mode-dependent)
    std::vector<Image> val_quarter;   // held-out slices
    std::vector<Image> val_routine;
    struct GridPos {
        int pair;
        int row;
        int col;
    };
    std::vector<GridPos> grid;
    int bands = 0;
};

TrainingSet build_training_set(const DatasetManifest& manifest, const TrainingConfig& cfg,
                               const FilterBank& bank);

struct TrainResult {
    std::string final_checkpoint;
    std::string best_checkpoint;
    std::string convergence_csv;
    double final_val_psnr = 0.0;
    double final_val_nrmse = 0.0;
    TrainState state;  // iteration counter, last lr, convergence log
};

TrainResult train(const TrainingConfig& cfg, const DatasetManifest& manifest,
                  const FilterBank& bank, const std::string& out_dir);

// Whole-image inference: residual mode adds the predicted coefficient
// residual before inverting; direct mode takes the prediction as the
// denoised coefficients. Bypass keeps the input lowpass band.
Image denoise(const Image& image, WavResNet& net, const DecompositionSpec& spec,
              const FilterBank& bank, TargetMode target_mode, LowbandMode lowband_mode);

struct CompareResult {
    std::vector<MetricReport> reports;  // noisy, mbir_tv, direct, residual
    std::string csv_path;
    std::string table;
};

// Table-1-style comparison on the held-out slices: noisy input baseline,
// MBIR-TV from the stored quarter-dose sinograms, and both network modes.
// Difference images (method - routine) are exported windowed to
// (-70, 70) HU.
CompareResult compare_methods(const DatasetManifest& manifest,
                              const std::vector<int>& validation_slices,
                              const std::string& residual_checkpoint,
                              const std::string& direct_checkpoint, const TVParams& mbir_params,
                              const FilterBank& bank, const DecompositionSpec& spec,
                              const std::string& out_dir);

int cli_dispatch(const std::vector<std::string>& args);

}  // namespace wavres
