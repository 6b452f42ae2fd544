#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wavres/image.hpp"

namespace wavres {

enum class BeamType { Parallel, Fan };

// Acquisition geometry over the normalized [-1,1]^2 image square.
// Distances and detector spacing share those units.
struct GeometryConfig {
    BeamType beam = BeamType::Parallel;
    int n_views = 180;
    int n_detectors = 128;
    double view_range = 0.0;        // 0 -> default: pi parallel, 2*pi fan
    double detector_spacing = 0.0;  // 0 -> default: 2/n_detectors
    double source_to_isocenter = 3.0;  // fan only
    double source_to_detector = 6.0;   // fan only

    double spacing() const {
        return detector_spacing > 0.0 ? detector_spacing : 2.0 / n_detectors;
    }
    double range() const {
        if (view_range > 0.0) return view_range;
        return beam == BeamType::Parallel ? M_PI : 2.0 * M_PI;
    }
    void validate() const;
};

// Line-integral measurements, view-major.
struct Sinogram {
    GeometryConfig geometry;
    std::vector<double> data;  // n_views * n_detectors

    Sinogram() = default;
    explicit Sinogram(const GeometryConfig& g)
        : geometry(g),
          data(static_cast<std::size_t>(g.n_views) * g.n_detectors, 0.0) {}

    double& at(int view, int det) {
        return data[static_cast<std::size_t>(view) * geometry.n_detectors + det];
    }
    double at(int view, int det) const {
        return data[static_cast<std::size_t>(view) * geometry.n_detectors + det];
    }
};

// Discretized line integrals: interpolated sampling along each ray with a
// step of half a pixel width. Linear in the image.
Sinogram forward_project(const Image& image, const GeometryConfig& geometry);

// Exact adjoint of forward_project: the same ray traversal with the
// bilinear weights transposed. Needed for CG on the normal equations.
Image backproject(const Sinogram& sino, int image_size);

// Geometry sidecar (key=value text) used next to serialized sinograms.
// `extras` lets producers record acquisition provenance (seed, I0);
// unknown keys are ignored on parse.
std::string geometry_sidecar(
    const GeometryConfig& g,
    const std::vector<std::pair<std::string, std::string>>& extras = {});
GeometryConfig parse_geometry_sidecar(const std::string& text);
void save_sinogram(const std::string& path, const Sinogram& sino,
                   const std::vector<std::pair<std::string, std::string>>& extras = {});
Sinogram load_sinogram(const std::string& path);  // expects path + ".geom" sidecar

}  // namespace wavres
