#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wavres/errors.hpp"

namespace wavres {

// 2D scalar field, row-major, 64-bit. Values are HU for CT images and
// dimensionless for transform coefficients.
struct Image {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Image() = default;
    Image(int h, int w, double fill = 0.0);

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Image& other) const {
        return height == other.height && width == other.width;
    }

    bool all_finite() const;
    void require_finite(const char* where) const;
};

// Ordered set of same-sized bands (a multi-channel image). Used for
// coefficient stacks and anywhere channels travel together.
using ImageStack = std::vector<Image>;

Image operator+(const Image& a, const Image& b);
Image operator-(const Image& a, const Image& b);
Image operator*(double s, const Image& a);

double dot(const Image& a, const Image& b);
double norm2(const Image& a);

// Patches cut on a regular grid from a multi-channel source.
struct PatchRef {
    int source_id = 0;
    int row = 0;
    int col = 0;
};

struct PatchSet {
    int patch_size = 0;
    int stride = 0;
    int channels = 0;
    std::vector<PatchRef> refs;
    // One materialized array per patch: channels * patch_size * patch_size,
    // channel-major.
    std::vector<std::vector<double>> patches;

    std::size_t count() const { return refs.size(); }
};

// All full patches on the regular grid with the given stride; partial
// border patches are dropped. Grid positions are enumerated row-major.
PatchSet extract_patches(const ImageStack& stack, int patch_size, int stride,
                         int source_id = 0);

// Affine display windowing [lo,hi] -> [0,255] with clamping. Rounding is
// half-away-from-zero so output is deterministic across platforms.
std::vector<std::uint8_t> window_hu(const Image& image, double lo, double hi);

// WIMG container: magic "WIMG", version u16 LE, height/width/channels
// u32 LE, then binary64 LE samples, row-major, channel-major outermost.
void save_image(const std::string& path, const Image& image);
void save_stack(const std::string& path, const ImageStack& stack);
Image load_image(const std::string& path);
ImageStack load_stack(const std::string& path);

std::vector<std::uint8_t> encode_wimg(const ImageStack& stack);
ImageStack decode_wimg(const std::vector<std::uint8_t>& bytes);

// Binary PGM (P5) export of an 8-bit display image.
void save_pgm(const std::string& path, const std::vector<std::uint8_t>& pixels,
              int height, int width);

}  // namespace wavres
