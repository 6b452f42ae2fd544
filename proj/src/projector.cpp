#include "wavres/projector.hpp"

#include <cmath>
#include <sstream>

#include "wavres/binio.hpp"

namespace wavres {

void GeometryConfig::validate() const {
    if (n_views < 1) throw ParameterError("geometry: n_views must be >= 1");
    if (n_detectors < 2) throw ParameterError("geometry: n_detectors must be >= 2");
    if (beam == BeamType::Fan) {
        if (source_to_isocenter <= 0.0 || source_to_detector <= 0.0)
            throw ParameterError("geometry: fan distances must be positive");
        if (source_to_detector <= source_to_isocenter)
            throw ParameterError("geometry: source_to_detector must exceed source_to_isocenter");
    }
}

namespace {

struct Ray {
    double ox, oy;  // origin
    double dx, dy;  // unit direction
    double t0, t1;  // clipped parameter range; t1 <= t0 means a miss
};

// Clip the ray to the [-1,1]^2 image square (slab method).
void clip_to_square(Ray& ray) {
    double t0 = -1e30, t1 = 1e30;
    const double axes[2][2] = {{ray.ox, ray.dx}, {ray.oy, ray.dy}};
    for (const auto& [o, d] : axes) {
        if (std::abs(d) < 1e-12) {
            if (o < -1.0 || o > 1.0) {
                ray.t0 = 0.0;
                ray.t1 = -1.0;
                return;
            }
        } else {
            double ta = (-1.0 - o) / d;
            double tb = (1.0 - o) / d;
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
        }
    }
    ray.t0 = t0;
    ray.t1 = t1;
}

Ray ray_for(const GeometryConfig& g, int view, int det) {
    Ray ray{};
    const double angle = g.range() * view / g.n_views;
    const double s = (det - (g.n_detectors - 1) / 2.0) * g.spacing();
    const double ct = std::cos(angle);
    const double st = std::sin(angle);
    if (g.beam == BeamType::Parallel) {
        ray.ox = s * ct;
        ray.oy = s * st;
        ray.dx = -st;
        ray.dy = ct;
    } else {
        const double sx = g.source_to_isocenter * ct;
        const double sy = g.source_to_isocenter * st;
        // flat detector centered on the ray through the isocenter
        const double px = (g.source_to_isocenter - g.source_to_detector) * ct - s * st;
        const double py = (g.source_to_isocenter - g.source_to_detector) * st + s * ct;
        double dx = px - sx;
        double dy = py - sy;
        const double len = std::sqrt(dx * dx + dy * dy);
        ray.ox = sx;
        ray.oy = sy;
        ray.dx = dx / len;
        ray.dy = dy / len;
    }
    clip_to_square(ray);
    return ray;
}

}  // namespace

Sinogram forward_project(const Image& image, const GeometryConfig& geometry) {
    geometry.validate();
    if (image.height != image.width) throw DimensionError("forward_project: image must be square");
    const int size = image.height;
    const double step = 1.0 / size;  // half pixel width in normalized units
    Sinogram sino(geometry);

#pragma omp parallel for schedule(static)
    for (int view = 0; view < geometry.n_views; ++view) {
        for (int det = 0; det < geometry.n_detectors; ++det) {
            const Ray ray = ray_for(geometry, view, det);
            if (ray.t1 <= ray.t0) continue;
            const int n_samples = static_cast<int>((ray.t1 - ray.t0) / step);
            double acc = 0.0;
            for (int i = 0; i < n_samples; ++i) {
                const double t = ray.t0 + (i + 0.5) * step;
                const double x = ray.ox + t * ray.dx;
                const double y = ray.oy + t * ray.dy;
                const double col_f = (x + 1.0) * 0.5 * size - 0.5;
                const double row_f = (1.0 - y) * 0.5 * size - 0.5;
                const int c0 = static_cast<int>(std::floor(col_f));
                const int r0 = static_cast<int>(std::floor(row_f));
                const double fc = col_f - c0;
                const double fr = row_f - r0;
                for (int dr = 0; dr <= 1; ++dr)
                    for (int dc = 0; dc <= 1; ++dc) {
                        const int r = r0 + dr;
                        const int c = c0 + dc;
                        if (r < 0 || r >= size || c < 0 || c >= size) continue;
                        const double w = (dr ? fr : 1.0 - fr) * (dc ? fc : 1.0 - fc);
                        acc += w * image.at(r, c);
                    }
            }
            sino.at(view, det) = acc * step;
        }
    }
    return sino;
}

Image backproject(const Sinogram& sino, int image_size) {
    const GeometryConfig& geometry = sino.geometry;
    geometry.validate();
    if (image_size < 1) throw DimensionError("backproject: bad image size");
    const int size = image_size;
    const double step = 1.0 / size;
    Image out(size, size, 0.0);

    // serial scatter: exact transpose of the forward traversal, and the
    // accumulation order never depends on thread count
    for (int view = 0; view < geometry.n_views; ++view) {
        for (int det = 0; det < geometry.n_detectors; ++det) {
            const Ray ray = ray_for(geometry, view, det);
            if (ray.t1 <= ray.t0) continue;
            const int n_samples = static_cast<int>((ray.t1 - ray.t0) / step);
            const double v = sino.at(view, det) * step;
            if (v == 0.0) continue;
            for (int i = 0; i < n_samples; ++i) {
                const double t = ray.t0 + (i + 0.5) * step;
                const double x = ray.ox + t * ray.dx;
                const double y = ray.oy + t * ray.dy;
                const double col_f = (x + 1.0) * 0.5 * size - 0.5;
                const double row_f = (1.0 - y) * 0.5 * size - 0.5;
                const int c0 = static_cast<int>(std::floor(col_f));
                const int r0 = static_cast<int>(std::floor(row_f));
                const double fc = col_f - c0;
                const double fr = row_f - r0;
                for (int dr = 0; dr <= 1; ++dr)
                    for (int dc = 0; dc <= 1; ++dc) {
                        const int r = r0 + dr;
                        const int c = c0 + dc;
                        if (r < 0 || r >= size || c < 0 || c >= size) continue;
                        const double w = (dr ? fr : 1.0 - fr) * (dc ? fc : 1.0 - fc);
                        out.at(r, c) += w * v;
                    }
            }
        }
    }
    return out;
}

std::string geometry_sidecar(const GeometryConfig& g,
                             const std::vector<std::pair<std::string, std::string>>& extras) {
    std::ostringstream out;
    char buf[32];
    out << "beam=" << (g.beam == BeamType::Parallel ? "parallel" : "fan") << "\n";
    out << "n_views=" << g.n_views << "\n";
    out << "n_detectors=" << g.n_detectors << "\n";
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << key << "=" << buf << "\n";
    };
    put("view_range", g.range());
    put("spacing", g.spacing());
    if (g.beam == BeamType::Fan) {
        put("source_to_isocenter", g.source_to_isocenter);
        put("source_to_detector", g.source_to_detector);
    }
    for (const auto& [key, value] : extras) out << key << "=" << value << "\n";
    return out.str();
}

GeometryConfig parse_geometry_sidecar(const std::string& text) {
    GeometryConfig g;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "beam") {
            if (value == "parallel")
                g.beam = BeamType::Parallel;
            else if (value == "fan")
                g.beam = BeamType::Fan;
            else
                throw FormatError("geometry sidecar: unknown beam type " + value, 0);
        } else if (key == "n_views") {
            g.n_views = std::stoi(value);
        } else if (key == "n_detectors") {
            g.n_detectors = std::stoi(value);
        } else if (key == "view_range") {
            g.view_range = std::stod(value);
        } else if (key == "spacing") {
            g.detector_spacing = std::stod(value);
        } else if (key == "source_to_isocenter") {
            g.source_to_isocenter = std::stod(value);
        } else if (key == "source_to_detector") {
            g.source_to_detector = std::stod(value);
        }
    }
    g.validate();
    return g;
}

void save_sinogram(const std::string& path, const Sinogram& sino,
                   const std::vector<std::pair<std::string, std::string>>& extras) {
    Image as_image(sino.geometry.n_views, sino.geometry.n_detectors);
    as_image.data = sino.data;
    save_image(path, as_image);
    const std::string sidecar = geometry_sidecar(sino.geometry, extras);
    write_file_bytes(path + ".geom",
                     std::vector<std::uint8_t>(sidecar.begin(), sidecar.end()));
}

Sinogram load_sinogram(const std::string& path) {
    Image as_image = load_image(path);
    auto sidecar_bytes = read_file_bytes(path + ".geom");
    GeometryConfig g =
        parse_geometry_sidecar(std::string(sidecar_bytes.begin(), sidecar_bytes.end()));
    if (as_image.height != g.n_views || as_image.width != g.n_detectors)
        throw FormatError("sinogram shape does not match geometry sidecar", 6);
    Sinogram sino(g);
    sino.data = std::move(as_image.data);
    return sino;
}

}  // namespace wavres
