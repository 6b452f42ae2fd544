#pragma once

#include <cstdint>

#include "wavres/projector.hpp"

namespace wavres {

// Photon-starvation noise on post-log data. Per ray: sample
// N ~ Poisson(I0 * exp(-p)) and return -ln(max(N,1)/I0). Each ray draws
// from its own derived stream, so the result is reproducible and
// independent of evaluation order.
Sinogram inject_low_dose_noise(const Sinogram& sino, double incident_photons,
                               std::uint64_t seed);

}  // namespace wavres
