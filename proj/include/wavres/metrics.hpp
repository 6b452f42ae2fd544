#pragma once

#include <string>
#include <vector>

#include "wavres/image.hpp"

namespace wavres {

// 10*log10(peak^2 / MSE); +infinity for identical images.
double psnr(const Image& test, const Image& reference, double peak);

// ||test - reference||_2 / ||reference||_2.
double nrmse(const Image& test, const Image& reference);

// Mean local SSIM over an 11x11 Gaussian window (sigma 1.5), stabilizers
// C1=(0.01*range)^2, C2=(0.03*range)^2, windows fully inside the image.
double ssim(const Image& test, const Image& reference, double dynamic_range);

struct SliceMetrics {
    std::string label;
    double psnr_db;
    double nrmse;
    double ssim;
};

struct MetricReport {
    std::string method;
    std::vector<SliceMetrics> slices;
    double avg_psnr_db = 0.0;
    double avg_nrmse = 0.0;
    double avg_ssim = 0.0;
};

// Per-slice metrics plus arithmetic means. peak <= 0 selects the default:
// max(reference) - min(reference) over the evaluation set.
MetricReport evaluate_dataset(const std::vector<std::pair<const Image*, const Image*>>& pairs,
                              double peak, double dynamic_range,
                              const std::string& method = "");

// CSV rows "slice,method,psnr_db,nrmse,ssim" with a trailing average row.
std::string metric_report_csv(const std::vector<MetricReport>& reports);
std::string metric_report_table(const std::vector<MetricReport>& reports);

}  // namespace wavres
