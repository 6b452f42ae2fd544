#include "wavres/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "wavres/binio.hpp"

namespace wavres {

Image::Image(int h, int w, double fill) : height(h), width(w) {
    if (h < 0 || w < 0) throw DimensionError("Image: negative dimensions");
    data.assign(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill);
}

bool Image::all_finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

void Image::require_finite(const char* where) const {
    if (!all_finite()) throw DomainError(std::string(where) + ": non-finite pixel value");
}

static void require_same_shape(const Image& a, const Image& b, const char* where) {
    if (!a.same_shape(b)) throw DimensionError(std::string(where) + ": shape mismatch");
}

Image operator+(const Image& a, const Image& b) {
    require_same_shape(a, b, "operator+");
    Image out(a.height, a.width);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] + b.data[i];
    return out;
}

Image operator-(const Image& a, const Image& b) {
    require_same_shape(a, b, "operator-");
    Image out(a.height, a.width);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] - b.data[i];
    return out;
}

Image operator*(double s, const Image& a) {
    Image out(a.height, a.width);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = s * a.data[i];
    return out;
}

double dot(const Image& a, const Image& b) {
    require_same_shape(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
    return acc;
}

double norm2(const Image& a) { return std::sqrt(dot(a, a)); }

PatchSet extract_patches(const ImageStack& stack, int patch_size, int stride,
                         int source_id) {
    if (stack.empty()) throw DimensionError("extract_patches: empty stack");
    const int h = stack[0].height;
    const int w = stack[0].width;
    for (const Image& band : stack)
        if (band.height != h || band.width != w)
            throw DimensionError("extract_patches: band shapes differ");
    if (patch_size < 1 || patch_size > h || patch_size > w)
        throw DimensionError("extract_patches: patch_size exceeds image dimension");
    if (stride < 1) throw ParameterError("extract_patches: stride must be >= 1");

    PatchSet set;
    set.patch_size = patch_size;
    set.stride = stride;
    set.channels = static_cast<int>(stack.size());

    const int rows = (h - patch_size) / stride + 1;
    const int cols = (w - patch_size) / stride + 1;
    set.refs.reserve(static_cast<std::size_t>(rows) * cols);
    set.patches.reserve(static_cast<std::size_t>(rows) * cols);

    for (int gr = 0; gr < rows; ++gr) {
        for (int gc = 0; gc < cols; ++gc) {
            const int r0 = gr * stride;
            const int c0 = gc * stride;
            set.refs.push_back({source_id, r0, c0});
            std::vector<double> patch(static_cast<std::size_t>(set.channels) * patch_size *
                                      patch_size);
            std::size_t k = 0;
            for (const Image& band : stack)
                for (int r = 0; r < patch_size; ++r)
                    for (int c = 0; c < patch_size; ++c) patch[k++] = band.at(r0 + r, c0 + c);
            set.patches.push_back(std::move(patch));
        }
    }
    return set;
}

std::vector<std::uint8_t> window_hu(const Image& image, double lo, double hi) {
    if (!(lo < hi)) throw ParameterError("window_hu: lo must be < hi");
    std::vector<std::uint8_t> out(image.data.size());
    const double range = hi - lo;
    for (std::size_t i = 0; i < image.data.size(); ++i) {
        double v = (image.data[i] - lo) * 255.0 / range;
        if (v <= 0.0) {
            out[i] = 0;
        } else if (v >= 255.0) {
            out[i] = 255;
        } else {
            out[i] = static_cast<std::uint8_t>(std::floor(v + 0.5));
        }
    }
    return out;
}

// --- WIMG ---

static const char kMagic[4] = {'W', 'I', 'M', 'G'};
static const std::uint16_t kVersion = 1;

std::vector<std::uint8_t> encode_wimg(const ImageStack& stack) {
    if (stack.empty()) throw DimensionError("encode_wimg: empty stack");
    const int h = stack[0].height;
    const int w = stack[0].width;
    for (const Image& band : stack) {
        if (band.height != h || band.width != w)
            throw DimensionError("encode_wimg: band shapes differ");
        band.require_finite("encode_wimg");
    }
    std::vector<std::uint8_t> out;
    out.reserve(18 + stack.size() * stack[0].data.size() * 8);
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u16(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(h));
    put_u32(out, static_cast<std::uint32_t>(w));
    put_u32(out, static_cast<std::uint32_t>(stack.size()));
    for (const Image& band : stack)
        for (double v : band.data) put_f64(out, v);
    return out;
}

ImageStack decode_wimg(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4) throw FormatError("WIMG: file too short for magic", bytes.size());
    for (int i = 0; i < 4; ++i)
        if (bytes[i] != static_cast<std::uint8_t>(kMagic[i]))
            throw FormatError("WIMG: bad magic", static_cast<std::uint64_t>(i));
    if (bytes.size() < 18) throw FormatError("WIMG: truncated header", bytes.size());
    const std::uint16_t version = get_u16(bytes.data() + 4);
    if (version != kVersion) throw FormatError("WIMG: unsupported version", 4);
    const std::uint64_t h = get_u32(bytes.data() + 6);
    const std::uint64_t w = get_u32(bytes.data() + 10);
    const std::uint64_t channels = get_u32(bytes.data() + 14);
    if (h == 0 || w == 0 || channels == 0) throw FormatError("WIMG: zero dimension", 6);
    if (h > (1u << 20) || w > (1u << 20) || channels > (1u << 16))
        throw FormatError("WIMG: implausible dimension", 6);
    const std::uint64_t expected = 18 + h * w * channels * 8;
    if (bytes.size() < expected)
        throw FormatError("WIMG: payload truncated, expected " + std::to_string(expected) +
                              " bytes",
                          bytes.size());
    ImageStack stack;
    stack.reserve(channels);
    const std::uint8_t* p = bytes.data() + 18;
    for (std::uint64_t ch = 0; ch < channels; ++ch) {
        Image band(static_cast<int>(h), static_cast<int>(w));
        for (std::size_t i = 0; i < band.data.size(); ++i, p += 8) band.data[i] = get_f64(p);
        stack.push_back(std::move(band));
    }
    return stack;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    in.seekg(0, std::ios::end);
    std::streamoff n = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(n));
    if (n > 0) in.read(reinterpret_cast<char*>(bytes.data()), n);
    if (!in) throw IoError("read failed: " + path);
    return bytes;
}

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

void save_image(const std::string& path, const Image& image) {
    save_stack(path, ImageStack{image});
}

void save_stack(const std::string& path, const ImageStack& stack) {
    write_file_bytes(path, encode_wimg(stack));
}

Image load_image(const std::string& path) {
    ImageStack stack = decode_wimg(read_file_bytes(path));
    if (stack.size() != 1)
        throw FormatError("expected single-channel WIMG in " + path + ", got " +
                              std::to_string(stack.size()) + " channels",
                          14);
    return std::move(stack[0]);
}

ImageStack load_stack(const std::string& path) { return decode_wimg(read_file_bytes(path)); }

void save_pgm(const std::string& path, const std::vector<std::uint8_t>& pixels, int height,
              int width) {
    if (pixels.size() != static_cast<std::size_t>(height) * width)
        throw DimensionError("save_pgm: pixel count does not match dimensions");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace wavres
