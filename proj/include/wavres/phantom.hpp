#pragma once

#include <vector>

#include "wavres/image.hpp"

namespace wavres {

// Additive ellipse in normalized coordinates: the image square is
// [-1,1] x [-1,1], x to the right, y up.
struct Ellipse {
    double center_x = 0.0;
    double center_y = 0.0;
    double semi_a = 0.5;        // along the ellipse x axis before rotation
    double semi_b = 0.5;
    double rotation = 0.0;      // radians, counterclockwise
    double attenuation_delta = 0.0;
};

struct Phantom {
    std::vector<Ellipse> ellipses;

    bool contains(const Ellipse& e, double x, double y) const;
    double value_at(double x, double y) const;
};

// Analytic ellipse-sum sampled at pixel centers.
Image rasterize_phantom(const Phantom& phantom, int size);

// The standard head phantom ellipse table.
Phantom shepp_logan();

// Randomized phantom for dataset synthesis: a soft-tissue disc plus a few
// random ellipses, nonnegative attenuation everywhere.
Phantom random_phantom(std::uint64_t seed);

}  // namespace wavres
