#include "wavres/nsct.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wavres/binio.hpp"

namespace wavres {

Kernel2D Kernel2D::delta() {
    Kernel2D k;
    k.half = 0;
    k.w = {1.0};
    return k;
}

Kernel2D convolve(const Kernel2D& a, const Kernel2D& b) {
    Kernel2D out;
    out.half = a.half + b.half;
    const int n = 2 * out.half + 1;
    out.w.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int ar = -a.half; ar <= a.half; ++ar)
        for (int ac = -a.half; ac <= a.half; ++ac) {
            const double av = a.at(ar, ac);
            if (av == 0.0) continue;
            for (int br = -b.half; br <= b.half; ++br)
                for (int bc = -b.half; bc <= b.half; ++bc)
                    out.at(ar + br, ac + bc) += av * b.at(br, bc);
        }
    return out;
}

Kernel2D add_scaled(const Kernel2D& a, double sa, const Kernel2D& b, double sb) {
    Kernel2D out;
    out.half = std::max(a.half, b.half);
    const int n = 2 * out.half + 1;
    out.w.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int r = -a.half; r <= a.half; ++r)
        for (int c = -a.half; c <= a.half; ++c) out.at(r, c) += sa * a.at(r, c);
    for (int r = -b.half; r <= b.half; ++r)
        for (int c = -b.half; c <= b.half; ++c) out.at(r, c) += sb * b.at(r, c);
    return out;
}

Kernel2D modulate_rows(const Kernel2D& k) {
    Kernel2D out = k;
    for (int r = -k.half; r <= k.half; ++r)
        for (int c = -k.half; c <= k.half; ++c)
            out.at(r, c) = ((r & 1) ? -1.0 : 1.0) * k.at(r, c);
    return out;
}

namespace {

struct Tap {
    int dr;
    int dc;
    double w;
};

std::vector<Tap> transformed_taps(const Kernel2D& k, const UpsampleMatrix& M) {
    std::vector<Tap> taps;
    taps.reserve(k.w.size());
    for (int r = -k.half; r <= k.half; ++r)
        for (int c = -k.half; c <= k.half; ++c) {
            const double v = k.at(r, c);
            if (v == 0.0) continue;
            taps.push_back({M.a * r + M.b * c, M.c * r + M.d * c, v});
        }
    return taps;
}

}  // namespace

Image circular_convolve(const Image& x, const Kernel2D& k, const UpsampleMatrix& M) {
    const int H = x.height;
    const int W = x.width;
    if (H < 1 || W < 1) throw DimensionError("circular_convolve: empty image");
    const std::vector<Tap> taps = transformed_taps(k, M);
    Image out(H, W, 0.0);
    for (int r = 0; r < H; ++r) {
        double* orow = &out.data[static_cast<std::size_t>(r) * W];
        for (const Tap& t : taps) {
            int rr = (r - t.dr) % H;
            if (rr < 0) rr += H;
            const double* xrow = &x.data[static_cast<std::size_t>(rr) * W];
            int s = t.dc % W;
            if (s < 0) s += W;
            // split the column loop at the wrap point to avoid per-pixel mod
            const double w = t.w;
            for (int c = 0; c < s; ++c) orow[c] += w * xrow[c + W - s];
            for (int c = s; c < W; ++c) orow[c] += w * xrow[c - s];
        }
    }
    return out;
}

namespace {

// Kernel for x = (cos w_r + cos w_c)/2, the 2D frequency map used to lift
// 1D half-band prototypes to diamond-shaped 2D filters.
Kernel2D frequency_map_kernel() {
    Kernel2D f;
    f.half = 1;
    f.w.assign(9, 0.0);
    f.at(-1, 0) = 0.25;
    f.at(1, 0) = 0.25;
    f.at(0, -1) = 0.25;
    f.at(0, 1) = 0.25;
    return f;
}

// Evaluates a polynomial in the frequency map: sum coeff[k] * F^k.
Kernel2D polynomial_in_map(const std::vector<double>& coeff) {
    Kernel2D acc = Kernel2D::delta();
    acc.w[0] = coeff[0];
    Kernel2D fpow = Kernel2D::delta();
    const Kernel2D f = frequency_map_kernel();
    for (std::size_t k = 1; k < coeff.size(); ++k) {
        fpow = convolve(fpow, f);
        if (coeff[k] != 0.0) acc = add_scaled(acc, 1.0, fpow, coeff[k]);
    }
    return acc;
}

}  // namespace

FilterBank FilterBank::make_default() {
    FilterBank bank;

    // Pyramid lowpass: 7-tap maximally flat half-band prototype
    // [-1 0 9 16 9 0 -1]/32, as a polynomial in x = cos w:
    // (2 + 3x - x^3)/4. The complement delta - H0 vanishes to fourth
    // order at DC, so bandpass bands annihilate constants and ramps.
    bank.pyramid_lowpass_analysis = polynomial_in_map({2.0 / 4, 3.0 / 4, 0.0, -1.0 / 4});
    const Kernel2D delta = Kernel2D::delta();
    bank.pyramid_highpass_analysis =
        add_scaled(delta, 1.0, bank.pyramid_lowpass_analysis, -1.0);
    bank.pyramid_lowpass_synthesis =
        add_scaled(delta, 2.0, bank.pyramid_lowpass_analysis, -1.0);
    bank.pyramid_highpass_synthesis = bank.pyramid_highpass_analysis;

    // Fan pair: 15-tap maximally flat half-band prototype
    // (32 + 70x - 70x^3 + 42x^5 - 10x^7)/64 lifted to a diamond filter,
    // then modulated by pi along the row frequency axis. The sharper
    // prototype keeps the directional channels selective.
    const Kernel2D diamond = polynomial_in_map(
        {32.0 / 64, 70.0 / 64, 0.0, -70.0 / 64, 0.0, 42.0 / 64, 0.0, -10.0 / 64});
    const Kernel2D diamond_hi = add_scaled(delta, 1.0, diamond, -1.0);
    const Kernel2D diamond_lo_syn = add_scaled(delta, 2.0, diamond, -1.0);
    bank.fan_analysis_pair[0] = modulate_rows(diamond);
    bank.fan_analysis_pair[1] = modulate_rows(diamond_hi);
    bank.fan_synthesis_pair[0] = modulate_rows(diamond_lo_syn);
    bank.fan_synthesis_pair[1] = modulate_rows(diamond_hi);
    return bank;
}

namespace {

void append_kernel_bytes(std::vector<std::uint8_t>& out, const Kernel2D& k) {
    put_u32(out, static_cast<std::uint32_t>(k.half));
    for (double v : k.w) put_f64(out, v);
}

}  // namespace

std::uint32_t FilterBank::checksum() const {
    std::vector<std::uint8_t> bytes;
    append_kernel_bytes(bytes, pyramid_lowpass_analysis);
    append_kernel_bytes(bytes, pyramid_highpass_analysis);
    append_kernel_bytes(bytes, pyramid_lowpass_synthesis);
    append_kernel_bytes(bytes, pyramid_highpass_synthesis);
    append_kernel_bytes(bytes, fan_analysis_pair[0]);
    append_kernel_bytes(bytes, fan_analysis_pair[1]);
    append_kernel_bytes(bytes, fan_synthesis_pair[0]);
    append_kernel_bytes(bytes, fan_synthesis_pair[1]);
    return crc32_of(bytes);
}

void FilterBank::dump(const std::string& directory) const {
    const std::pair<std::string, const Kernel2D*> kernels[] = {
        {"pyramid_lowpass_analysis", &pyramid_lowpass_analysis},
        {"pyramid_highpass_analysis", &pyramid_highpass_analysis},
        {"pyramid_lowpass_synthesis", &pyramid_lowpass_synthesis},
        {"pyramid_highpass_synthesis", &pyramid_highpass_synthesis},
        {"fan_analysis_0", &fan_analysis_pair[0]},
        {"fan_analysis_1", &fan_analysis_pair[1]},
        {"fan_synthesis_0", &fan_synthesis_pair[0]},
        {"fan_synthesis_1", &fan_synthesis_pair[1]},
    };
    for (const auto& [name, k] : kernels) {
        std::ofstream out(directory + "/" + name + ".txt");
        if (!out) throw IoError("cannot write filter file in " + directory);
        const int n = 2 * k->half + 1;
        out << n << " " << n << "\n";
        char buf[32];
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", k->w[static_cast<std::size_t>(r) * n + c]);
                out << buf << (c + 1 == n ? "" : " ");
            }
            out << "\n";
        }
    }
    std::ofstream sum(directory + "/checksum.txt");
    sum << checksum() << "\n";
}

int DecompositionSpec::total_bands() const {
    int total = 1;
    for (int d : directions_per_level) total += d < 1 ? 1 : d;
    return total;
}

void DecompositionSpec::validate() const {
    if (levels < 1) throw ParameterError("DecompositionSpec: levels must be >= 1");
    if (static_cast<int>(directions_per_level.size()) != levels)
        throw ParameterError("DecompositionSpec: directions list length != levels");
    for (int d : directions_per_level)
        if (d != 0 && d != 1 && d != 2 && d != 4 && d != 8)
            throw ParameterError("DecompositionSpec: direction count must be 0,1,2,4 or 8");
}

void nsp_analyze(const Image& image, int levels, const FilterBank& bank, Image& lowpass,
                 ImageStack& bandpass) {
    if (levels < 1) throw ParameterError("nsp_analyze: levels must be >= 1");
    const int hw = bank.pyramid_lowpass_analysis.half;
    const int dilation = 1 << (levels - 1);
    const int support = 2 * hw * dilation + 1;
    if (support > image.height || support > image.width)
        throw DimensionError("nsp_analyze: image smaller than dilated kernel support (" +
                             std::to_string(support) + ")");
    bandpass.clear();
    Image current = image;
    for (int level = 1; level <= levels; ++level) {
        const UpsampleMatrix M = UpsampleMatrix::dyadic(1 << (level - 1));
        bandpass.push_back(circular_convolve(current, bank.pyramid_highpass_analysis, M));
        current = circular_convolve(current, bank.pyramid_lowpass_analysis, M);
    }
    lowpass = std::move(current);
}

Image nsp_synthesize(const Image& lowpass, const ImageStack& bandpass,
                     const FilterBank& bank) {
    const int levels = static_cast<int>(bandpass.size());
    if (levels < 1) throw DimensionError("nsp_synthesize: no bandpass bands");
    Image current = lowpass;
    for (int level = levels; level >= 1; --level) {
        const Image& band = bandpass[level - 1];
        if (!band.same_shape(current))
            throw DimensionError("nsp_synthesize: band size mismatch at level " +
                                 std::to_string(level));
        const UpsampleMatrix M = UpsampleMatrix::dyadic(1 << (level - 1));
        Image lo = circular_convolve(current, bank.pyramid_lowpass_synthesis, M);
        Image hi = circular_convolve(band, bank.pyramid_highpass_synthesis, M);
        current = lo + hi;
    }
    return current;
}

namespace {

int dfb_depth(int n_directions) {
    switch (n_directions) {
        case 2: return 1;
        case 4: return 2;
        case 8: return 3;
        default:
            throw ParameterError("nsdfb: direction count must be 2, 4 or 8, got " +
                                 std::to_string(n_directions));
    }
}

// Upsampling matrix for tree level (0-based): identity, then iterated
// quincunx.
UpsampleMatrix dfb_level_matrix(int tree_level) {
    UpsampleMatrix M = UpsampleMatrix::identity();
    for (int i = 0; i < tree_level; ++i) M = M.times(UpsampleMatrix::quincunx());
    return M;
}

void nsdfb_analyze_rec(const Image& x, int depth, int tree_level, const FilterBank& bank,
                       ImageStack& out) {
    if (depth == 0) {
        out.push_back(x);
        return;
    }
    const UpsampleMatrix M = dfb_level_matrix(tree_level);
    Image c0 = circular_convolve(x, bank.fan_analysis_pair[0], M);
    Image c1 = circular_convolve(x, bank.fan_analysis_pair[1], M);
    nsdfb_analyze_rec(c0, depth - 1, tree_level + 1, bank, out);
    nsdfb_analyze_rec(c1, depth - 1, tree_level + 1, bank, out);
}

Image nsdfb_synthesize_rec(const ImageStack& channels, std::size_t first, int depth,
                           int tree_level, const FilterBank& bank) {
    if (depth == 0) return channels[first];
    const std::size_t half_count = static_cast<std::size_t>(1) << (depth - 1);
    Image c0 = nsdfb_synthesize_rec(channels, first, depth - 1, tree_level + 1, bank);
    Image c1 =
        nsdfb_synthesize_rec(channels, first + half_count, depth - 1, tree_level + 1, bank);
    const UpsampleMatrix M = dfb_level_matrix(tree_level);
    return circular_convolve(c0, bank.fan_synthesis_pair[0], M) +
           circular_convolve(c1, bank.fan_synthesis_pair[1], M);
}

}  // namespace

ImageStack nsdfb_analyze(const Image& band, int n_directions, const FilterBank& bank) {
    const int depth = dfb_depth(n_directions);
    ImageStack out;
    out.reserve(static_cast<std::size_t>(n_directions));
    nsdfb_analyze_rec(band, depth, 0, bank, out);
    return out;
}

Image nsdfb_synthesize(const ImageStack& channels, const FilterBank& bank) {
    const int n = static_cast<int>(channels.size());
    const int depth = dfb_depth(n);
    for (const Image& ch : channels)
        if (!ch.same_shape(channels[0]))
            throw DimensionError("nsdfb_synthesize: channel size mismatch");
    return nsdfb_synthesize_rec(channels, 0, depth, 0, bank);
}

CoeffStack nsct_forward(const Image& image, const DecompositionSpec& spec,
                        const FilterBank& bank) {
    spec.validate();
    CoeffStack stack;
    stack.spec = spec;
    Image lowpass;
    ImageStack bandpass;
    nsp_analyze(image, spec.levels, bank, lowpass, bandpass);
    stack.bands.push_back(std::move(lowpass));
    for (int level = 0; level < spec.levels; ++level) {
        const int dirs = spec.directions_per_level[level];
        if (dirs < 2) {
            stack.bands.push_back(std::move(bandpass[level]));
        } else {
            ImageStack channels = nsdfb_analyze(bandpass[level], dirs, bank);
            for (Image& ch : channels) stack.bands.push_back(std::move(ch));
        }
    }
    return stack;
}

Image nsct_inverse(const CoeffStack& stack, const FilterBank& bank) {
    stack.spec.validate();
    if (static_cast<int>(stack.bands.size()) != stack.spec.total_bands())
        throw DimensionError("nsct_inverse: band count mismatch, expected " +
                             std::to_string(stack.spec.total_bands()) + ", got " +
                             std::to_string(stack.bands.size()));
    const Image& lowpass = stack.bands[0];
    ImageStack bandpass;
    std::size_t next = 1;
    for (int level = 0; level < stack.spec.levels; ++level) {
        const int dirs = stack.spec.directions_per_level[level];
        if (dirs < 2) {
            bandpass.push_back(stack.bands[next]);
            next += 1;
        } else {
            ImageStack channels(stack.bands.begin() + next,
                                stack.bands.begin() + next + dirs);
            bandpass.push_back(nsdfb_synthesize(channels, bank));
            next += static_cast<std::size_t>(dirs);
        }
    }
    return nsp_synthesize(lowpass, bandpass, bank);
}

CoeffStack residual_label(const Image& routine, const Image& quarter,
                          const DecompositionSpec& spec, const FilterBank& bank) {
    if (!routine.same_shape(quarter))
        throw DimensionError("residual_label: image dimensions differ");
    CoeffStack r = nsct_forward(routine, spec, bank);
    CoeffStack q = nsct_forward(quarter, spec, bank);
    for (std::size_t i = 0; i < r.bands.size(); ++i) r.bands[i] = r.bands[i] - q.bands[i];
    return r;
}

std::string coeff_spec_sidecar(const DecompositionSpec& spec, const FilterBank& bank) {
    std::ostringstream out;
    out << "levels=" << spec.levels << "\n";
    out << "directions=";
    for (std::size_t i = 0; i < spec.directions_per_level.size(); ++i)
        out << (i ? "," : "") << spec.directions_per_level[i];
    out << "\n";
    out << "boundary=periodic\n";
    out << "filter_checksum=" << bank.checksum() << "\n";
    return out.str();
}

DecompositionSpec parse_coeff_spec_sidecar(const std::string& text, const FilterBank& bank) {
    DecompositionSpec spec;
    spec.directions_per_level.clear();
    std::istringstream in(text);
    std::string line;
    bool have_checksum = false;
    while (std::getline(in, line)) {
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (key == "levels") {
            spec.levels = std::stoi(value);
        } else if (key == "directions") {
            std::istringstream vs(value);
            std::string item;
            while (std::getline(vs, item, ',')) spec.directions_per_level.push_back(std::stoi(item));
        } else if (key == "filter_checksum") {
            have_checksum = true;
            if (static_cast<std::uint32_t>(std::stoul(value)) != bank.checksum())
                throw FormatError("coefficient sidecar: filter checksum mismatch", 0);
        }
    }
    if (!have_checksum) throw FormatError("coefficient sidecar: missing filter checksum", 0);
    spec.validate();
    return spec;
}

}  // namespace wavres
