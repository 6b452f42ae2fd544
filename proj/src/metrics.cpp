#include "wavres/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace wavres {

double psnr(const Image& test, const Image& reference, double peak) {
    if (!test.same_shape(reference)) throw DimensionError("psnr: shape mismatch");
    if (peak <= 0.0) throw ParameterError("psnr: peak must be > 0");
    double mse = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const double d = test.data[i] - reference.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(test.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double nrmse(const Image& test, const Image& reference) {
    if (!test.same_shape(reference)) throw DimensionError("nrmse: shape mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const double d = test.data[i] - reference.data[i];
        num += d * d;
        den += reference.data[i] * reference.data[i];
    }
    if (den == 0.0) throw DomainError("nrmse: reference has zero norm");
    return std::sqrt(num / den);
}

namespace {

// 11x11 Gaussian, sigma 1.5, normalized to unit sum
const std::vector<double>& ssim_window() {
    static const std::vector<double> w = [] {
        std::vector<double> win(121);
        double sum = 0.0;
        for (int r = 0; r < 11; ++r)
            for (int c = 0; c < 11; ++c) {
                const double dr = r - 5.0, dc = c - 5.0;
                win[r * 11 + c] = std::exp(-(dr * dr + dc * dc) / (2.0 * 1.5 * 1.5));
                sum += win[r * 11 + c];
            }
        for (double& v : win) v /= sum;
        return win;
    }();
    return w;
}

}  // namespace

double ssim(const Image& test, const Image& reference, double dynamic_range) {
    if (!test.same_shape(reference)) throw DimensionError("ssim: shape mismatch");
    if (dynamic_range <= 0.0) throw ParameterError("ssim: dynamic_range must be > 0");
    if (test.height < 11 || test.width < 11)
        throw DimensionError("ssim: image smaller than the 11x11 window");

    const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
    const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
    const std::vector<double>& win = ssim_window();

    double acc = 0.0;
    std::size_t count = 0;
    for (int r0 = 0; r0 + 11 <= test.height; ++r0) {
        for (int c0 = 0; c0 + 11 <= test.width; ++c0) {
            double mx = 0.0, my = 0.0;
            for (int r = 0; r < 11; ++r)
                for (int c = 0; c < 11; ++c) {
                    const double w = win[r * 11 + c];
                    mx += w * test.at(r0 + r, c0 + c);
                    my += w * reference.at(r0 + r, c0 + c);
                }
            double vx = 0.0, vy = 0.0, cov = 0.0;
            for (int r = 0; r < 11; ++r)
                for (int c = 0; c < 11; ++c) {
                    const double w = win[r * 11 + c];
                    const double dx = test.at(r0 + r, c0 + c) - mx;
                    const double dy = reference.at(r0 + r, c0 + c) - my;
                    vx += w * dx * dx;
                    vy += w * dy * dy;
                    cov += w * dx * dy;
                }
            const double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
            const double den = (mx * mx + my * my + c1) * (vx + vy + c2);
            acc += num / den;
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

MetricReport evaluate_dataset(
    const std::vector<std::pair<const Image*, const Image*>>& pairs, double peak,
    double dynamic_range, const std::string& method) {
    if (pairs.empty()) throw ParameterError("evaluate_dataset: no pairs");

    double peak_value = peak;
    if (peak_value <= 0.0) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& [test, reference] : pairs)
            for (double v : reference->data) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        peak_value = hi - lo;
        if (peak_value <= 0.0) throw DomainError("evaluate_dataset: flat reference set");
    }

    MetricReport report;
    report.method = method;
    int index = 0;
    for (const auto& [test, reference] : pairs) {
        SliceMetrics m;
        m.label = std::to_string(index++);
        m.psnr_db = psnr(*test, *reference, peak_value);
        m.nrmse = nrmse(*test, *reference);
        m.ssim = ssim(*test, *reference, dynamic_range);
        report.slices.push_back(m);
        report.avg_psnr_db += m.psnr_db;
        report.avg_nrmse += m.nrmse;
        report.avg_ssim += m.ssim;
    }
    const double n = static_cast<double>(report.slices.size());
    report.avg_psnr_db /= n;
    report.avg_nrmse /= n;
    report.avg_ssim /= n;
    return report;
}

std::string metric_report_csv(const std::vector<MetricReport>& reports) {
    std::ostringstream out;
    out << "slice,method,psnr_db,nrmse,ssim\n";
    char buf[160];
    for (const MetricReport& rep : reports) {
        for (const SliceMetrics& m : rep.slices) {
            std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g\n", m.label.c_str(),
                          rep.method.c_str(), m.psnr_db, m.nrmse, m.ssim);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "average,%s,%.17g,%.17g,%.17g\n", rep.method.c_str(),
                      rep.avg_psnr_db, rep.avg_nrmse, rep.avg_ssim);
        out << buf;
    }
    return out.str();
}

std::string metric_report_table(const std::vector<MetricReport>& reports) {
    std::ostringstream out;
    char buf[160];
    out << "method            slices  psnr[dB]   nrmse      ssim\n";
    for (const MetricReport& rep : reports) {
        std::snprintf(buf, sizeof buf, "%-17s %6zu  %8.3f  %8.5f  %7.4f\n",
                      rep.method.c_str(), rep.slices.size(), rep.avg_psnr_db, rep.avg_nrmse,
                      rep.avg_ssim);
        out << buf;
    }
    return out.str();
}

}  // namespace wavres
