#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wavres/image.hpp"

namespace wavres {

// Zero-phase 2D FIR kernel stored as a dense centered square array.
// Coefficients of the default bank are dyadic rationals, so they are
// exactly representable and the filter identities hold at machine
// precision.
struct Kernel2D {
    int half = 0;               // support is (2*half+1)^2, centered
    std::vector<double> w;      // row-major, size (2*half+1)^2

    double& at(int dr, int dc) {
        return w[static_cast<std::size_t>(dr + half) * (2 * half + 1) + (dc + half)];
    }
    double at(int dr, int dc) const {
        return w[static_cast<std::size_t>(dr + half) * (2 * half + 1) + (dc + half)];
    }

    static Kernel2D delta();
};

Kernel2D convolve(const Kernel2D& a, const Kernel2D& b);
Kernel2D add_scaled(const Kernel2D& a, double sa, const Kernel2D& b, double sb);
// Multiply tap (m,n) by (-1)^m: shifts the passband by pi along the row
// frequency axis (diamond -> fan).
Kernel2D modulate_rows(const Kernel2D& k);

// Integer resampling matrix applied to tap positions; this is how the
// a-trous dilation and the directional tree's quincunx upsampling are
// expressed.
struct UpsampleMatrix {
    int a = 1, b = 0, c = 0, d = 1;  // tap (m,n) -> (a*m + b*n, c*m + d*n)
    static UpsampleMatrix identity() { return {1, 0, 0, 1}; }
    static UpsampleMatrix dyadic(int factor) { return {factor, 0, 0, factor}; }
    static UpsampleMatrix quincunx() { return {1, -1, 1, 1}; }
    UpsampleMatrix times(const UpsampleMatrix& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

// Circular (periodic-boundary) convolution of image with the kernel whose
// taps are repositioned by M. Periodic boundaries make the transform
// exactly shift-equivariant.
Image circular_convolve(const Image& x, const Kernel2D& k,
                        const UpsampleMatrix& M = UpsampleMatrix::identity());

// Two-channel pyramid pair plus the fan pair for directional splits.
// The default bank is built from maximally flat half-band prototypes
// mapped to 2D; synthesis is the structural complement of analysis, so
// perfect reconstruction does not rest on coefficient rounding.
struct FilterBank {
    Kernel2D pyramid_lowpass_analysis;
    Kernel2D pyramid_highpass_analysis;
    Kernel2D pyramid_lowpass_synthesis;
    Kernel2D pyramid_highpass_synthesis;
    std::array<Kernel2D, 2> fan_analysis_pair;
    std::array<Kernel2D, 2> fan_synthesis_pair;

    static FilterBank make_default();
    std::uint32_t checksum() const;
    // Writes the coefficient arrays as plain-text data files.
    void dump(const std::string& directory) const;
};

struct DecompositionSpec {
    int levels = 4;
    // Direction count per pyramid level, finest scale first. 0 or 1 keeps
    // the band unsplit; otherwise must be 2, 4 or 8.
    std::vector<int> directions_per_level = {4, 4, 4, 2};

    int total_bands() const;
    void validate() const;
};

// Undecimated coefficient stack: every band has the source image size.
// Band order: [lowpass, level1 dir0..dirK-1, level2 ..., levelL ...].
struct CoeffStack {
    ImageStack bands;
    DecompositionSpec spec;
};

// Nonsubsampled pyramid, a-trous scheme: level j uses kernels with
// 2^(j-1)-1 zeros inserted between taps. Returns `levels` bandpass
// images (finest first) and the final lowpass, all full size.
void nsp_analyze(const Image& image, int levels, const FilterBank& bank, Image& lowpass,
                 ImageStack& bandpass);
Image nsp_synthesize(const Image& lowpass, const ImageStack& bandpass,
                     const FilterBank& bank);

// Nonsubsampled directional filter bank: binary tree of fan splits,
// deeper levels with quincunx-upsampled kernels. n_directions in {2,4,8}.
ImageStack nsdfb_analyze(const Image& band, int n_directions, const FilterBank& bank);
Image nsdfb_synthesize(const ImageStack& channels, const FilterBank& bank);

// The embedding T and its left inverse T-dagger.
CoeffStack nsct_forward(const Image& image, const DecompositionSpec& spec,
                        const FilterBank& bank);
Image nsct_inverse(const CoeffStack& stack, const FilterBank& bank);

// Residual label transform S: band-wise T(routine) - T(quarter).
CoeffStack residual_label(const Image& routine, const Image& quarter,
                          const DecompositionSpec& spec, const FilterBank& bank);

// Sidecar description for serialized stacks (levels, directions, filter
// checksum), and its parser.
std::string coeff_spec_sidecar(const DecompositionSpec& spec, const FilterBank& bank);
DecompositionSpec parse_coeff_spec_sidecar(const std::string& text,
                                           const FilterBank& bank);

}  // namespace wavres
