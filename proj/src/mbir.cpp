#include "wavres/mbir.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace wavres {

void TVParams::validate() const {
    if (lambda < 0.0) throw ParameterError("TVParams: lambda must be >= 0");
    if (rho <= 0.0) throw ParameterError("TVParams: rho must be > 0");
    if (outer_iters < 1 || cg_iters < 1 || chambolle_iters < 1)
        throw ParameterError("TVParams: iteration counts must be >= 1");
    if (!(chambolle_step > 0.0 && chambolle_step <= 0.25))
        throw ParameterError("TVParams: chambolle_step must lie in (0, 1/4]");
    if (tolerance < 0.0) throw ParameterError("TVParams: tolerance must be >= 0");
}

namespace {

// forward differences, replicate boundary (zero difference on the last
// row/column)
void gradient(const Image& u, Image& gr, Image& gc) {
    const int H = u.height, W = u.width;
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            gr.at(r, c) = r + 1 < H ? u.at(r + 1, c) - u.at(r, c) : 0.0;
            gc.at(r, c) = c + 1 < W ? u.at(r, c + 1) - u.at(r, c) : 0.0;
        }
}

// negative adjoint of the gradient above
void divergence(const Image& pr, const Image& pc, Image& out) {
    const int H = pr.height, W = pr.width;
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            double d = 0.0;
            if (r == 0) d += pr.at(r, c);
            else if (r == H - 1) d += -pr.at(r - 1, c);
            else d += pr.at(r, c) - pr.at(r - 1, c);
            if (c == 0) d += pc.at(r, c);
            else if (c == W - 1) d += -pc.at(r, c - 1);
            else d += pc.at(r, c) - pc.at(r, c - 1);
            out.at(r, c) = d;
        }
}

}  // namespace

double tv_value(const Image& image) {
    const int H = image.height, W = image.width;
    double acc = 0.0;
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            const double dr = r + 1 < H ? image.at(r + 1, c) - image.at(r, c) : 0.0;
            const double dc = c + 1 < W ? image.at(r, c + 1) - image.at(r, c) : 0.0;
            acc += std::sqrt(dr * dr + dc * dc);
        }
    return acc;
}

Image tv_prox_chambolle(const Image& v, double weight, const TVParams& params) {
    params.validate();
    if (weight < 0.0) throw ParameterError("tv_prox_chambolle: weight must be >= 0");
    if (weight == 0.0) return v;

    const int H = v.height, W = v.width;
    Image pr(H, W, 0.0), pc(H, W, 0.0);
    Image div_p(H, W, 0.0), gr(H, W, 0.0), gc(H, W, 0.0), arg(H, W, 0.0);
    const double tau = params.chambolle_step;

    for (int iter = 0; iter < params.chambolle_iters; ++iter) {
        divergence(pr, pc, div_p);
        for (std::size_t i = 0; i < arg.data.size(); ++i)
            arg.data[i] = div_p.data[i] - v.data[i] / weight;
        gradient(arg, gr, gc);
        for (std::size_t i = 0; i < pr.data.size(); ++i) {
            const double mag = std::sqrt(gr.data[i] * gr.data[i] + gc.data[i] * gc.data[i]);
            const double denom = 1.0 + tau * mag;
            pr.data[i] = (pr.data[i] + tau * gr.data[i]) / denom;
            pc.data[i] = (pc.data[i] + tau * gc.data[i]) / denom;
        }
    }
    divergence(pr, pc, div_p);
    Image out(H, W);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = v.data[i] - weight * div_p.data[i];
    return out;
}

void cg_normal_solve(const GeometryConfig& geometry, int image_size, double rho,
                     const Image& rhs, Image& x, int cg_iters) {
    auto apply = [&](const Image& img) {
        Sinogram s = forward_project(img, geometry);
        Image out = backproject(s, image_size);
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += rho * img.data[i];
        return out;
    };
    Image r = rhs - apply(x);
    Image p = r;
    double rs = dot(r, r);
    if (rs == 0.0) return;
    for (int iter = 0; iter < cg_iters; ++iter) {
        Image ap = apply(p);
        const double denom = dot(p, ap);
        if (denom <= 0.0) break;
        const double alpha = rs / denom;
        for (std::size_t i = 0; i < x.data.size(); ++i) {
            x.data[i] += alpha * p.data[i];
            r.data[i] -= alpha * ap.data[i];
        }
        const double rs_new = dot(r, r);
        if (rs_new == 0.0) break;
        const double beta = rs_new / rs;
        for (std::size_t i = 0; i < p.data.size(); ++i)
            p.data[i] = r.data[i] + beta * p.data[i];
        rs = rs_new;
    }
}

std::pair<Image, std::vector<ObjectiveEntry>> admm_tv_reconstruct(
    const Sinogram& sino, int image_size, const TVParams& params,
    const std::optional<Image>& x0) {
    params.validate();
    sino.geometry.validate();
    if (image_size < 2) throw DimensionError("admm_tv_reconstruct: bad image size");

    Image x = x0 ? *x0 : fbp_reconstruct(sino, image_size);
    if (x.height != image_size || x.width != image_size)
        throw DimensionError("admm_tv_reconstruct: x0 does not match image size");

    Image z = x;
    Image u(image_size, image_size, 0.0);
    const Image atb = backproject(sino, image_size);

    std::vector<ObjectiveEntry> log;
    double previous_total = 0.0;
    for (int outer = 0; outer < params.outer_iters; ++outer) {
        // x-update: (At A + rho I) x = At b + rho (z - u)
        Image rhs = atb;
        for (std::size_t i = 0; i < rhs.data.size(); ++i)
            rhs.data[i] += params.rho * (z.data[i] - u.data[i]);
        cg_normal_solve(sino.geometry, image_size, params.rho, rhs, x, params.cg_iters);

        // z-update: TV prox at x + u
        Image xu = x + u;
        z = tv_prox_chambolle(xu, params.lambda / params.rho, params);

        // scaled dual ascent
        for (std::size_t i = 0; i < u.data.size(); ++i)
            u.data[i] += x.data[i] - z.data[i];

        Sinogram ax = forward_project(x, sino.geometry);
        double data_term = 0.0;
        for (std::size_t i = 0; i < ax.data.size(); ++i) {
            const double d = ax.data[i] - sino.data[i];
            data_term += d * d;
        }
        data_term *= 0.5;
        const double tv_term = params.lambda * tv_value(x);
        const double total = data_term + tv_term;
        if (!std::isfinite(total))
            throw DivergenceError("admm_tv_reconstruct: non-finite objective", outer);
        log.push_back({outer, data_term, tv_term, total});

        if (params.tolerance > 0.0 && outer > 0) {
            const double rel = std::abs(total - previous_total) /
                               std::max(std::abs(previous_total), 1e-30);
            if (rel < params.tolerance) break;
        }
        previous_total = total;
    }
    return {z, log};
}

std::vector<std::pair<double, double>> mbir_lambda_grid(
    const Sinogram& sino, int image_size, const Image& reference, const TVParams& base,
    const std::vector<double>& lambdas) {
    if (reference.height != image_size || reference.width != image_size)
        throw DimensionError("mbir_lambda_grid: reference size mismatch");
    std::vector<std::pair<double, double>> results;
    const double ref_norm = norm2(reference);
    for (double lambda : lambdas) {
        TVParams params = base;
        params.lambda = lambda;
        auto [rec, log] = admm_tv_reconstruct(sino, image_size, params);
        const double err = norm2(rec - reference) / ref_norm;
        results.emplace_back(lambda, err);
    }
    return results;
}

std::string objective_log_csv(const std::vector<ObjectiveEntry>& log) {
    std::ostringstream out;
    out << "iteration,data_term,tv_term,total\n";
    char buf[96];
    for (const ObjectiveEntry& e : log) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", e.iteration, e.data_term,
                      e.tv_term, e.total);
        out << buf;
    }
    return out.str();
}

}  // namespace wavres
