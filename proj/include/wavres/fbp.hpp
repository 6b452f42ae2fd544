#pragma once

#include <complex>
#include <vector>

#include "wavres/projector.hpp"

namespace wavres {

enum class Apodization { Hann, Ramp };

struct FbpConfig {
    Apodization apodization = Apodization::Hann;
    double mu_water = 0.0;  // <= 0 keeps attenuation units (identity HU map)
};

// In-place radix-2 complex FFT; length must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse);

// Ramp-filters one projection row (frequency domain, band-limited ramp
// kernel, optional Hann apodization at Nyquist). Exposed for tests.
std::vector<double> ramp_filter_row(const std::vector<double>& row, double spacing,
                                    Apodization apodization);

// Filtered backprojection onto a size x size grid. Parallel beam directly;
// fan beam via cosine detector weighting over the full rotation.
Image fbp_reconstruct(const Sinogram& sino, int image_size,
                      const FbpConfig& config = FbpConfig{});

// Attenuation to Hounsfield units; mu_water <= 0 returns the input as-is.
Image mu_to_hu(const Image& mu, double mu_water);

}  // namespace wavres
