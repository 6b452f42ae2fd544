#pragma once

#include <optional>
#include <vector>

#include "wavres/fbp.hpp"
#include "wavres/projector.hpp"

namespace wavres {

struct TVParams {
    double lambda = 0.05;       // regularization weight
    double rho = 1.0;           // ADMM penalty
    int outer_iters = 30;
    int cg_iters = 8;
    int chambolle_iters = 25;
    double chambolle_step = 0.125;  // must stay in (0, 1/4]
    double tolerance = 0.0;         // relative objective change; 0 disables

    void validate() const;
};

struct ObjectiveEntry {
    int iteration;
    double data_term;
    double tv_term;
    double total;
};

// Isotropic discrete total variation: forward differences with replicate
// boundary.
double tv_value(const Image& image);

// Proximal operator of weight*TV via Chambolle's dual fixed-point
// iteration.
Image tv_prox_chambolle(const Image& v, double weight, const TVParams& params);

// cg_iters conjugate-gradient steps on (At A + rho I) x = rhs, warm
// started at x. The ADMM x-update below runs on this.
void cg_normal_solve(const GeometryConfig& geometry, int image_size, double rho,
                     const Image& rhs, Image& x, int cg_iters);

// Least-squares + TV solved by ADMM; the x-update runs cg_iters conjugate
// gradient steps on (At A + rho I). Returns the TV-feasible split
// variable and the per-iteration objective log. x0 defaults to FBP.
std::pair<Image, std::vector<ObjectiveEntry>> admm_tv_reconstruct(
    const Sinogram& sino, int image_size, const TVParams& params,
    const std::optional<Image>& x0 = std::nullopt);

// Lambda grid search against a known reference: returns (lambda, nrmse)
// pairs, rho fixed as configured.
std::vector<std::pair<double, double>> mbir_lambda_grid(
    const Sinogram& sino, int image_size, const Image& reference, const TVParams& base,
    const std::vector<double>& lambdas);

std::string objective_log_csv(const std::vector<ObjectiveEntry>& log);

}  // namespace wavres
