#include <doctest.h>

#include <cmath>

#include "wavres/nsct.hpp"
#include "wavres/rng.hpp"

using namespace wavres;

namespace {

Image random_image(int h, int w, Rng& rng, double scale = 1.0) {
    Image img(h, w);
    for (double& v : img.data) v = scale * (rng.uniform() * 2.0 - 1.0);
    return img;
}

double rel_error(const Image& a, const Image& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a.data[i] - b.data[i];
        num += d * d;
        den += b.data[i] * b.data[i];
    }
    return std::sqrt(num / den);
}

double max_abs(const Image& a) {
    double m = 0.0;
    for (double v : a.data) m = std::max(m, std::abs(v));
    return m;
}

Image circular_shift(const Image& x, int sr, int sc) {
    Image out(x.height, x.width);
    for (int r = 0; r < x.height; ++r)
        for (int c = 0; c < x.width; ++c) {
            int rr = ((r + sr) % x.height + x.height) % x.height;
            int cc = ((c + sc) % x.width + x.width) % x.width;
            out.at(rr, cc) = x.at(r, c);
        }
    return out;
}

// brute-force circular convolution oracle (per-pixel mod indexing)
Image naive_circular_convolve(const Image& x, const Kernel2D& k) {
    Image out(x.height, x.width, 0.0);
    for (int r = 0; r < x.height; ++r)
        for (int c = 0; c < x.width; ++c) {
            double acc = 0.0;
            for (int dr = -k.half; dr <= k.half; ++dr)
                for (int dc = -k.half; dc <= k.half; ++dc) {
                    int rr = ((r - dr) % x.height + x.height) % x.height;
                    int cc = ((c - dc) % x.width + x.width) % x.width;
                    acc += k.at(dr, dc) * x.at(rr, cc);
                }
            out.at(r, c) = acc;
        }
    return out;
}

}  // namespace

TEST_SUITE("nsct") {

TEST_CASE("circular_convolve matches the brute-force oracle") {
    Rng rng(101);
    Image x = random_image(17, 23, rng);
    FilterBank bank = FilterBank::make_default();
    Image fast = circular_convolve(x, bank.pyramid_lowpass_analysis);
    Image slow = naive_circular_convolve(x, bank.pyramid_lowpass_analysis);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(fast.data[i] == doctest::Approx(slow.data[i]).epsilon(1e-14));
}

TEST_CASE("default filter bank: DC gains and vanishing moments") {
    FilterBank bank = FilterBank::make_default();
    const Kernel2D& lo = bank.pyramid_lowpass_analysis;
    const Kernel2D& hi = bank.pyramid_highpass_analysis;
    double lo_sum = 0.0;
    for (double v : lo.w) lo_sum += v;
    CHECK(lo_sum == doctest::Approx(1.0).epsilon(1e-15));
    // moments of the highpass through order 3 vanish: annihilates
    // constants and ramps
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; a + b <= 3; ++b) {
            double m = 0.0;
            for (int r = -hi.half; r <= hi.half; ++r)
                for (int c = -hi.half; c <= hi.half; ++c)
                    m += hi.at(r, c) * std::pow(r, a) * std::pow(c, b);
            CHECK(std::abs(m) < 1e-12);
        }
}

TEST_CASE("filter bank checksum is frozen") {
    FilterBank bank = FilterBank::make_default();
    // pinned after the first reference run; any coefficient change is a
    // format break for serialized stacks
    CHECK(bank.checksum() == 0xF28ACBB7u);
}

TEST_CASE("nsp: constant image puts everything in the lowpass") {
    FilterBank bank = FilterBank::make_default();
    Image x(64, 64, 0.75);
    Image lowpass;
    ImageStack bandpass;
    nsp_analyze(x, 4, bank, lowpass, bandpass);
    REQUIRE(bandpass.size() == 4);
    for (const Image& band : bandpass) CHECK(max_abs(band) < 1e-10);
    for (double v : lowpass.data) CHECK(v == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("nsp: linear ramp is annihilated away from the periodic seam") {
    FilterBank bank = FilterBank::make_default();
    Image x(64, 64);
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c) x.at(r, c) = 0.3 * r - 0.7 * c + 0.1;
    Image lowpass;
    ImageStack bandpass;
    nsp_analyze(x, 2, bank, lowpass, bandpass);
    // seam contamination accumulates across levels: level j reads values
    // within hw*(2^j - 1) of the boundary
    const int hw = bank.pyramid_highpass_analysis.half;
    for (int level = 1; level <= 2; ++level) {
        const int margin = hw * ((1 << level) - 1);
        const Image& band = bandpass[level - 1];
        for (int r = margin; r < 64 - margin; ++r)
            for (int c = margin; c < 64 - margin; ++c)
                CHECK(std::abs(band.at(r, c)) < 1e-9);
    }
}

TEST_CASE("nsp roundtrip reconstructs random images") {
    FilterBank bank = FilterBank::make_default();
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Image x = random_image(64, 64, rng);
        Image lowpass;
        ImageStack bandpass;
        nsp_analyze(x, 4, bank, lowpass, bandpass);
        Image back = nsp_synthesize(lowpass, bandpass, bank);
        CHECK(rel_error(back, x) < 1e-8);
    }
}

TEST_CASE("nsp rejects images smaller than the dilated support") {
    FilterBank bank = FilterBank::make_default();
    Image tiny(16, 16, 0.0);
    Image lowpass;
    ImageStack bandpass;
    // level 4 dilates the 7x7 kernel to 49x49 support
    CHECK_THROWS_AS(nsp_analyze(tiny, 4, bank, lowpass, bandpass), DimensionError);
}

TEST_CASE("nsp_synthesize: zero bands give a zero image") {
    FilterBank bank = FilterBank::make_default();
    Image zero(32, 32, 0.0);
    ImageStack bands{Image(32, 32, 0.0), Image(32, 32, 0.0)};
    Image out = nsp_synthesize(zero, bands, bank);
    CHECK(max_abs(out) == 0.0);
}

TEST_CASE("nsdfb splits a horizontal line into the horizontal channel") {
    FilterBank bank = FilterBank::make_default();
    Image x(64, 64, 0.0);
    for (int c = 0; c < 64; ++c) x.at(31, c) = 1.0;
    for (int c = 0; c < 64; ++c) x.at(31, c) -= 1.0 / 64.0;  // remove the mean
    ImageStack channels = nsdfb_analyze(x, 2, bank);
    REQUIRE(channels.size() == 2);
    double e0 = 0.0, e1 = 0.0;
    for (double v : channels[0].data) e0 += v * v;
    for (double v : channels[1].data) e1 += v * v;
    CHECK(e0 / (e0 + e1) > 0.8);

    // and the transposed (vertical) line lands in the other channel
    Image y(64, 64, 0.0);
    for (int r = 0; r < 64; ++r) y.at(r, 31) = 1.0 - 1.0 / 64.0;
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c)
            if (c != 31) y.at(r, c) = -1.0 / 64.0;
    ImageStack vchannels = nsdfb_analyze(y, 2, bank);
    double v0 = 0.0, v1 = 0.0;
    for (double v : vchannels[0].data) v0 += v * v;
    for (double v : vchannels[1].data) v1 += v * v;
    CHECK(v1 / (v0 + v1) > 0.8);
}

TEST_CASE("nsdfb roundtrip for 2, 4 and 8 directions") {
    FilterBank bank = FilterBank::make_default();
    Rng rng(17);
    for (int dirs : {2, 4, 8}) {
        Image x = random_image(64, 64, rng);
        ImageStack channels = nsdfb_analyze(x, dirs, bank);
        REQUIRE(static_cast<int>(channels.size()) == dirs);
        for (const Image& ch : channels) REQUIRE(ch.same_shape(x));
        Image back = nsdfb_synthesize(channels, bank);
        CHECK(rel_error(back, x) < 1e-8);
    }
}

TEST_CASE("nsdfb rejects unsupported direction counts") {
    FilterBank bank = FilterBank::make_default();
    Image x(32, 32, 0.0);
    CHECK_THROWS_AS(nsdfb_analyze(x, 3, bank), ParameterError);
    CHECK_THROWS_AS(nsdfb_analyze(x, 16, bank), ParameterError);
}

TEST_CASE("nsdfb analyze is homogeneous") {
    FilterBank bank = FilterBank::make_default();
    Rng rng(19);
    Image x = random_image(48, 48, rng);
    ImageStack cx = nsdfb_analyze(x, 4, bank);
    ImageStack cax = nsdfb_analyze(3.5 * x, 4, bank);
    for (std::size_t i = 0; i < cx.size(); ++i)
        CHECK(rel_error(cax[i], 3.5 * cx[i]) < 1e-12);
}

TEST_CASE("nsct_forward: default spec yields 15 full-size bands") {
    FilterBank bank = FilterBank::make_default();
    Rng rng(23);
    Image x = random_image(64, 64, rng);
    DecompositionSpec spec;
    REQUIRE(spec.total_bands() == 15);
    CoeffStack stack = nsct_forward(x, spec, bank);
    REQUIRE(stack.bands.size() == 15);
    for (const Image& band : stack.bands) CHECK(band.same_shape(x));
}

TEST_CASE("nsct: constant image has silent directional bands") {
    FilterBank bank = FilterBank::make_default();
    Image x(64, 64, 1.0);
    CoeffStack stack = nsct_forward(x, DecompositionSpec{}, bank);
    for (std::size_t b = 1; b < stack.bands.size(); ++b)
        CHECK(max_abs(stack.bands[b]) < 1e-10);
}

TEST_CASE("nsct perfect reconstruction on random images") {
    FilterBank bank = FilterBank::make_default();
    Rng rng(29);
    DecompositionSpec spec;
    for (int trial = 0; trial < 20; ++trial) {
        Image x = random_image(64, 64, rng);
        Image back = nsct_inverse(nsct_forward(x, spec, bank), bank);
        CHECK(rel_error(back, x) < 1e-8);
    }
}

TEST_CASE("nsct shift invariance: bands commute with circular shifts") {
    FilterBank bank = FilterBank::make_default();
    Rng rng(31);
    DecompositionSpec spec;
    Image x = random_image(64, 64, rng);
    CoeffStack tx = nsct_forward(x, spec, bank);
    for (auto [sr, sc] : {std::pair{5, 11}, std::pair{-3, 7}, std::pair{32, -17}}) {
        CoeffStack tsx = nsct_forward(circular_shift(x, sr, sc), spec, bank);
        for (std::size_t b = 0; b < tx.bands.size(); ++b) {
            Image shifted = circular_shift(tx.bands[b], sr, sc);
            CHECK(max_abs(tsx.bands[b] - shifted) < 1e-10);
        }
    }
}

TEST_CASE("nsct linearity") {
    FilterBank bank = FilterBank::make_default();
    Rng rng(37);
    DecompositionSpec spec;
    Image x = random_image(64, 64, rng);
    Image y = random_image(64, 64, rng);
    const double a = 1.7, b = -0.4;
    CoeffStack combo = nsct_forward(a * x + b * y, spec, bank);
    CoeffStack tx = nsct_forward(x, spec, bank);
    CoeffStack ty = nsct_forward(y, spec, bank);
    for (std::size_t i = 0; i < combo.bands.size(); ++i)
        CHECK(max_abs(combo.bands[i] - (a * tx.bands[i] + b * ty.bands[i])) < 1e-10);
}

TEST_CASE("nsct_inverse is linear in the stack and maps zero to zero") {
    FilterBank bank = FilterBank::make_default();
    DecompositionSpec spec;
    CoeffStack zero;
    zero.spec = spec;
    for (int i = 0; i < spec.total_bands(); ++i) zero.bands.push_back(Image(32, 32, 0.0));
    // 32x32 cannot host 4 dilated levels; use a 2-level spec here
    zero.spec.levels = 2;
    zero.spec.directions_per_level = {4, 2};
    zero.bands.resize(zero.spec.total_bands(), Image(32, 32, 0.0));
    Image out = nsct_inverse(zero, bank);
    CHECK(max_abs(out) == 0.0);
}

TEST_CASE("nsct_inverse rejects band-count mismatch") {
    FilterBank bank = FilterBank::make_default();
    CoeffStack stack;
    stack.spec = DecompositionSpec{};
    stack.bands.assign(7, Image(64, 64, 0.0));
    CHECK_THROWS_AS(nsct_inverse(stack, bank), DimensionError);
}

TEST_CASE("residual_label equals the band-wise transform difference") {
    FilterBank bank = FilterBank::make_default();
    Rng rng(41);
    DecompositionSpec spec;
    Image routine = random_image(64, 64, rng);
    Image quarter = random_image(64, 64, rng);
    CoeffStack label = residual_label(routine, quarter, spec, bank);
    CoeffStack tr = nsct_forward(routine, spec, bank);
    CoeffStack tq = nsct_forward(quarter, spec, bank);
    for (std::size_t i = 0; i < label.bands.size(); ++i)
        CHECK(max_abs(label.bands[i] - (tr.bands[i] - tq.bands[i])) == 0.0);
}

TEST_CASE("residual_label: identical pair gives a zero label") {
    FilterBank bank = FilterBank::make_default();
    Rng rng(43);
    Image x = random_image(64, 64, rng);
    CoeffStack label = residual_label(x, x, DecompositionSpec{}, bank);
    for (const Image& band : label.bands) CHECK(max_abs(band) == 0.0);
}

TEST_CASE("residual_label: constant offset lands in the lowpass band only") {
    FilterBank bank = FilterBank::make_default();
    Rng rng(47);
    Image quarter = random_image(64, 64, rng);
    Image routine = quarter;
    for (double& v : routine.data) v += 2.5;
    CoeffStack label = residual_label(routine, quarter, DecompositionSpec{}, bank);
    for (double v : label.bands[0].data) CHECK(v == doctest::Approx(2.5).epsilon(1e-10));
    for (std::size_t b = 1; b < label.bands.size(); ++b)
        CHECK(max_abs(label.bands[b]) < 1e-10);
}

TEST_CASE("coefficient sidecar roundtrip checks the filter checksum") {
    FilterBank bank = FilterBank::make_default();
    DecompositionSpec spec;
    std::string text = coeff_spec_sidecar(spec, bank);
    DecompositionSpec back = parse_coeff_spec_sidecar(text, bank);
    CHECK(back.levels == spec.levels);
    CHECK(back.directions_per_level == spec.directions_per_level);

    std::string corrupted = text;
    corrupted.replace(corrupted.find("filter_checksum=") + 16, 1, "9");
    CHECK_THROWS_AS(parse_coeff_spec_sidecar(corrupted, bank), FormatError);
}

}  // TEST_SUITE
