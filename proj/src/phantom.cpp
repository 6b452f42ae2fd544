#include "wavres/phantom.hpp"

#include <cmath>

#include "wavres/rng.hpp"

namespace wavres {

bool Phantom::contains(const Ellipse& e, double x, double y) const {
    const double dx = x - e.center_x;
    const double dy = y - e.center_y;
    const double ct = std::cos(e.rotation);
    const double st = std::sin(e.rotation);
    const double u = dx * ct + dy * st;
    const double v = -dx * st + dy * ct;
    const double ua = u / e.semi_a;
    const double vb = v / e.semi_b;
    return ua * ua + vb * vb <= 1.0;
}

double Phantom::value_at(double x, double y) const {
    double acc = 0.0;
    for (const Ellipse& e : ellipses)
        if (contains(e, x, y)) acc += e.attenuation_delta;
    return acc;
}

Image rasterize_phantom(const Phantom& phantom, int size) {
    if (size < 8) throw ParameterError("rasterize_phantom: size must be >= 8");
    Image img(size, size);
    const double step = 2.0 / size;
    for (int r = 0; r < size; ++r) {
        const double y = 1.0 - (r + 0.5) * step;
        for (int c = 0; c < size; ++c) {
            const double x = -1.0 + (c + 0.5) * step;
            img.at(r, c) = phantom.value_at(x, y);
        }
    }
    return img;
}

Phantom shepp_logan() {
    // (delta, a, b, x0, y0, phi_degrees)
    static const double table[10][6] = {
        {2.0, 0.69, 0.92, 0.0, 0.0, 0.0},
        {-0.98, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
        {-0.02, 0.1100, 0.3100, 0.22, 0.0, -18.0},
        {-0.02, 0.1600, 0.4100, -0.22, 0.0, 18.0},
        {0.01, 0.2100, 0.2500, 0.0, 0.35, 0.0},
        {0.01, 0.0460, 0.0460, 0.0, 0.10, 0.0},
        {0.01, 0.0460, 0.0460, 0.0, -0.10, 0.0},
        {0.01, 0.0460, 0.0230, -0.08, -0.605, 0.0},
        {0.01, 0.0230, 0.0230, 0.0, -0.606, 0.0},
        {0.01, 0.0230, 0.0460, 0.06, -0.605, 0.0},
    };
    Phantom p;
    for (const auto& row : table) {
        Ellipse e;
        e.attenuation_delta = row[0];
        e.semi_a = row[1];
        e.semi_b = row[2];
        e.center_x = row[3];
        e.center_y = row[4];
        e.rotation = row[5] * M_PI / 180.0;
        p.ellipses.push_back(e);
    }
    return p;
}

Phantom random_phantom(std::uint64_t seed) {
    // deterministic rejection: redraw from the next substream until the
    // ellipse sum is nonnegative on a probe grid
    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng = Rng::stream(seed, 0x9AB7u + attempt);
        Phantom p;

        Ellipse body;
        body.semi_a = 0.75 + 0.1 * rng.uniform();
        body.semi_b = 0.75 + 0.1 * rng.uniform();
        body.rotation = 0.0;
        body.attenuation_delta = 0.9 + 0.2 * rng.uniform();
        p.ellipses.push_back(body);

        const int n_inner = 3 + static_cast<int>(rng.below(4));
        for (int i = 0; i < n_inner; ++i) {
            Ellipse e;
            e.center_x = 0.4 * (rng.uniform() * 2.0 - 1.0);
            e.center_y = 0.4 * (rng.uniform() * 2.0 - 1.0);
            e.semi_a = 0.05 + 0.25 * rng.uniform();
            e.semi_b = 0.05 + 0.25 * rng.uniform();
            e.rotation = rng.uniform() * M_PI;
            e.attenuation_delta = -0.4 + 0.9 * rng.uniform();
            p.ellipses.push_back(e);
        }

        bool nonnegative = true;
        const int probe = 96;
        for (int r = 0; r < probe && nonnegative; ++r)
            for (int c = 0; c < probe; ++c) {
                double x = -1.0 + (c + 0.5) * 2.0 / probe;
                double y = 1.0 - (r + 0.5) * 2.0 / probe;
                if (p.value_at(x, y) < 0.0) {
                    nonnegative = false;
                    break;
                }
            }
        if (nonnegative) return p;
    }
}

}  // namespace wavres
