#include "wavres/fbp.hpp"

#include <cmath>

namespace wavres {

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw ParameterError("fft_radix2: length must be a power of two");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

namespace {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Frequency response of the band-limited ramp: FFT of the discrete kernel
// h[0] = 1/(4 d^2), h[odd n] = -1/(pi n d)^2, h[even n] = 0.
std::vector<double> ramp_response(std::size_t padded, double spacing) {
    std::vector<std::complex<double>> h(padded, 0.0);
    h[0] = 1.0 / (4.0 * spacing * spacing);
    for (std::size_t n = 1; n <= padded / 2; n += 2) {
        const double v = -1.0 / ((M_PI * n * spacing) * (M_PI * n * spacing));
        h[n] = v;
        h[padded - n] = v;
    }
    fft_radix2(h, false);
    std::vector<double> response(padded);
    for (std::size_t k = 0; k < padded; ++k) response[k] = h[k].real();
    return response;
}

double apodization_weight(std::size_t k, std::size_t padded, Apodization apod) {
    if (apod == Apodization::Ramp) return 1.0;
    // Hann window rolling off to zero at the Nyquist bin
    const std::size_t folded = k <= padded / 2 ? k : padded - k;
    const double x = static_cast<double>(folded) / static_cast<double>(padded / 2);
    return 0.5 * (1.0 + std::cos(M_PI * x));
}

std::vector<double> filter_row(const std::vector<double>& row, double spacing,
                               Apodization apod, const std::vector<double>& response) {
    const std::size_t padded = response.size();
    std::vector<std::complex<double>> buf(padded, 0.0);
    for (std::size_t i = 0; i < row.size(); ++i) buf[i] = row[i];
    fft_radix2(buf, false);
    for (std::size_t k = 0; k < padded; ++k)
        buf[k] *= response[k] * apodization_weight(k, padded, apod);
    fft_radix2(buf, true);
    std::vector<double> out(row.size());
    // the discrete convolution approximates the continuous filter times
    // the detector pitch
    for (std::size_t i = 0; i < row.size(); ++i) out[i] = buf[i].real() * spacing;
    return out;
}

}  // namespace

std::vector<double> ramp_filter_row(const std::vector<double>& row, double spacing,
                                    Apodization apodization) {
    const std::size_t padded = next_pow2(2 * row.size());
    return filter_row(row, spacing, apodization, ramp_response(padded, spacing));
}

Image fbp_reconstruct(const Sinogram& sino, int image_size, const FbpConfig& config) {
    const GeometryConfig& g = sino.geometry;
    g.validate();
    if (g.n_views < 2) throw ParameterError("fbp_reconstruct: need at least 2 views");
    if (image_size < 2) throw DimensionError("fbp_reconstruct: bad image size");

    const int n_det = g.n_detectors;
    const int n_views = g.n_views;
    const bool fan = g.beam == BeamType::Fan;

    // fan rows are rescaled to the detector line through the isocenter
    const double spacing =
        fan ? g.spacing() * g.source_to_isocenter / g.source_to_detector : g.spacing();
    const std::size_t padded = next_pow2(2 * static_cast<std::size_t>(n_det));
    const std::vector<double> response = ramp_response(padded, spacing);

    std::vector<std::vector<double>> filtered(n_views);
#pragma omp parallel for schedule(static)
    for (int view = 0; view < n_views; ++view) {
        std::vector<double> row(n_det);
        for (int d = 0; d < n_det; ++d) row[d] = sino.at(view, d);
        if (fan) {
            const double dsi = g.source_to_isocenter;
            for (int d = 0; d < n_det; ++d) {
                const double s = (d - (n_det - 1) / 2.0) * spacing;
                row[d] *= dsi / std::sqrt(dsi * dsi + s * s);
            }
        }
        std::vector<double> q = filter_row(row, spacing, config.apodization, response);
        if (fan)
            for (double& v : q) v *= 0.5;
        filtered[view] = std::move(q);
    }

    Image out(image_size, image_size, 0.0);
    const double pixel_step = 2.0 / image_size;
    const double d_angle = g.range() / n_views;
    // full-coverage normalization: with range pi or 2*pi this reduces to
    // pi/n_views for the parallel case
    const double scale = fan ? d_angle : M_PI / n_views;

#pragma omp parallel for schedule(static)
    for (int r = 0; r < image_size; ++r) {
        const double y = 1.0 - (r + 0.5) * pixel_step;
        for (int c = 0; c < image_size; ++c) {
            const double x = -1.0 + (c + 0.5) * pixel_step;
            double acc = 0.0;
            for (int view = 0; view < n_views; ++view) {
                const double angle = g.range() * view / n_views;
                const double ct = std::cos(angle);
                const double st = std::sin(angle);
                double u_det;       // detector-array coordinate
                double weight = 1.0;
                if (!fan) {
                    const double s = x * ct + y * st;
                    u_det = s / spacing + (n_det - 1) / 2.0;
                } else {
                    const double dsi = g.source_to_isocenter;
                    const double proj_e = x * ct + y * st;  // along the source axis
                    const double proj_w = -x * st + y * ct;
                    const double u_ratio = (dsi - proj_e) / dsi;
                    if (u_ratio <= 1e-9) continue;
                    const double s = proj_w / u_ratio;  // isocenter-line coordinate
                    u_det = s / spacing + (n_det - 1) / 2.0;
                    weight = 1.0 / (u_ratio * u_ratio);
                }
                const int d0 = static_cast<int>(std::floor(u_det));
                const double f = u_det - d0;
                double q = 0.0;
                if (d0 >= 0 && d0 < n_det) q += (1.0 - f) * filtered[view][d0];
                if (d0 + 1 >= 0 && d0 + 1 < n_det) q += f * filtered[view][d0 + 1];
                acc += weight * q;
            }
            out.at(r, c) = acc * scale;
        }
    }
    return mu_to_hu(out, config.mu_water);
}

Image mu_to_hu(const Image& mu, double mu_water) {
    if (mu_water <= 0.0) return mu;
    Image out(mu.height, mu.width);
    for (std::size_t i = 0; i < mu.size(); ++i)
        out.data[i] = 1000.0 * (mu.data[i] - mu_water) / mu_water;
    return out;
}

}  // namespace wavres
